"""Zonal expansion coefficients and certification on spheres and products.

A kernel on the d-sphere (argument: the dot product ``x``), optionally
crossed with an abelian carrier or a second sphere, is expanded against
the normalized Gegenbauer basis.  Positive definiteness of the kernel is
equivalent to positive definiteness of every expansion coefficient (a
scalar sign in the pure-sphere case, a spectral test on the abelian
factor otherwise) together with summability of the coefficient masses,
and both directions are made computational here.
"""

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .abelian import AbelianGrid, SampledFunction, bochner_test, fourier
from .report import CERTIFIED_NOT_PD, CERTIFIED_PD, INCONCLUSIVE, CertReport
from .settings import DEFAULT, NumericSettings
from .special import SphereBasis, gegenbauer_table

__all__ = [
    "KernelField",
    "SchoenbergSeries",
    "d_schoenberg",
    "synthesize",
    "synthesize_tensor",
    "certify_sphere_time",
    "certify_sphere_sphere",
    "schoenberg_bound",
]


@dataclass
class KernelField:
    """A kernel sampled or defined in closed form on a product of factors.

    ``first`` is a :class:`SphereBasis` or an :class:`AbelianGrid`;
    ``second`` may be another factor or ``None``.  Exactly one of ``fn``
    and ``values`` must be given; ``fn`` is evaluated lazily on the
    factors' sample coordinates (quadrature nodes for spheres, grid
    points for abelian carriers).
    """

    first: object
    second: object = None
    fn: Callable | None = None
    values: np.ndarray | None = None
    _tensor: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if (self.fn is None) == (self.values is None):
            raise ValueError("provide exactly one of fn and values")

    @staticmethod
    def _coords(factor) -> np.ndarray:
        return factor.nodes if isinstance(factor, SphereBasis) else factor.points

    def tensor(self) -> np.ndarray:
        """Samples over the factor coordinates; shape (m1,) or (m1, m2)."""
        if self._tensor is not None:
            return self._tensor
        x1 = self._coords(self.first)
        if self.values is not None:
            vals = np.asarray(self.values)
            expected = (len(x1),) if self.second is None else (len(x1), len(self._coords(self.second)))
            if vals.shape != expected:
                raise ValueError(f"sample tensor has shape {vals.shape}, expected {expected}")
        elif self.second is None:
            vals = np.asarray(self.fn(x1))
        else:
            x2 = self._coords(self.second)
            vals = np.asarray(self.fn(x1[:, None], x2[None, :]))
        if not np.all(np.isfinite(vals)):
            raise ValueError("kernel samples are not finite")
        self._tensor = vals
        return vals


@dataclass
class SchoenbergSeries:
    """Truncated zonal expansion of a kernel.

    ``coeffs[n]`` is the degree-n coefficient: a scalar when the second
    factor is trivial, else one value per point of ``grid``.
    """

    basis: SphereBasis
    grid: AbelianGrid | None
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs)
        want = self.basis.max_degree + 1
        if self.coeffs.shape[0] != want:
            raise ValueError(f"expected {want} coefficient rows, got {self.coeffs.shape[0]}")
        if self.grid is not None and self.coeffs.shape[1] != self.grid.size:
            raise ValueError("coefficient columns do not match the grid")

    @property
    def scalar(self) -> bool:
        return self.grid is None

    def degree_masses(self) -> np.ndarray:
        """Per-degree sup norms; stands in for the coefficient at the identity."""
        if self.scalar:
            return np.abs(self.coeffs)
        return np.max(np.abs(self.coeffs), axis=1)

    def coefficient(self, n: int) -> SampledFunction:
        if self.scalar:
            raise ValueError("series has scalar coefficients")
        return SampledFunction(self.grid, self.coeffs[n])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "point", "re", "im"])
            coeffs = np.atleast_2d(self.coeffs.T).T if self.scalar else self.coeffs
            for n in range(coeffs.shape[0]):
                row = np.atleast_1d(coeffs[n])
                pts = [0] if self.scalar else self.grid.points
                for p, v in zip(pts, row):
                    v = complex(v)
                    writer.writerow([n, p, format(v.real, ".17g"), format(v.imag, ".17g")])

    @classmethod
    def from_csv(cls, basis: SphereBasis, grid: AbelianGrid | None, path) -> "SchoenbergSeries":
        n_rows = basis.max_degree + 1
        width = 1 if grid is None else grid.size
        coeffs = np.zeros((n_rows, width), dtype=complex)
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["n", "point", "re", "im"]:
                raise ValueError(f"unexpected CSV header {header!r}")
            col = {}
            for n, p, re, im in reader:
                n = int(n)
                j = col.setdefault(n, 0)
                coeffs[n, j] = complex(float(re), float(im))
                col[n] = j + 1
        if grid is None:
            return cls(basis, None, coeffs[:, 0])
        return cls(basis, grid, coeffs)


def d_schoenberg(f: KernelField, n_max: int | None = None,
                 settings: NumericSettings = DEFAULT) -> SchoenbergSeries:
    """Expansion coefficients of a kernel on sphere x (abelian | nothing).

    ``coeffs[n](u) = dim_n * sum_j w_j f(x_j, u) c_n(d, x_j)``; exact for
    kernels polynomial in x of degree at most 2*quad_order - 1 - n_max.
    """
    basis = f.first
    if not isinstance(basis, SphereBasis):
        raise TypeError("first factor must be a sphere")
    if isinstance(f.second, SphereBasis):
        raise TypeError("use certify_sphere_sphere for two sphere factors")
    if n_max is None:
        n_max = basis.max_degree
    if n_max > basis.max_degree:
        raise ValueError("truncation exceeds the basis degree")
    vals = f.tensor()
    table = basis.zonal_table[: n_max + 1] * basis.weights   # (N+1, m)
    dims = basis.harmonic_dims[: n_max + 1]
    coeffs = dims[:, None] * (table @ np.atleast_2d(vals.T).T)
    if f.second is None:
        coeffs = coeffs[:, 0]
    out_basis = basis if n_max == basis.max_degree else SphereBasis.create(
        basis.d, n_max, basis.quad_order)
    return SchoenbergSeries(out_basis, f.second, coeffs)


def synthesize(series: SchoenbergSeries, x, u=None):
    """Evaluate the truncated expansion at dot product x (and group element u)."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise ValueError("dot product outside [-1, 1]")
    table = gegenbauer_table(series.basis.d, series.basis.max_degree, x)
    if series.scalar:
        return np.tensordot(series.coeffs, table, axes=(0, 0))
    if u is None:
        raise ValueError("series has an abelian factor; a group element is required")
    col = series.coeffs[:, series.grid.index_of_point(u)]
    return np.tensordot(col, table, axes=(0, 0))


def synthesize_tensor(series: SchoenbergSeries) -> np.ndarray:
    """Expansion evaluated back on the quadrature nodes (x grid points)."""
    table = series.basis.zonal_table
    if series.scalar:
        return series.coeffs @ table
    return table.T @ series.coeffs


def _hermitian_defect_in_u(vals: np.ndarray, grid: AbelianGrid) -> float:
    flipped = vals[:, grid.negation_indices()]
    return float(np.max(np.abs(flipped - np.conj(vals))))


def certify_sphere_time(f: KernelField, n_max: int | None = None,
                        tol: float | None = None,
                        settings: NumericSettings = DEFAULT,
                        cross_check: bool = False) -> CertReport:
    """Certify a kernel on sphere x abelian carrier.

    Expands in the zonal basis and runs the spectral test on every
    coefficient function.  certified-PD requires every coefficient to
    pass and the truncation tail to be negligible; a failing coefficient
    yields certified-not-PD with the (degree, frequency) witness; an
    unresolved tail yields inconclusive.

    With ``cross_check=True`` the transform order is swapped (transform
    over the group first, then expand) and the two coefficient tables are
    required to agree; they are the same sums reordered, so disagreement
    flags a numerical problem rather than a property of the kernel.
    """
    if tol is None:
        tol = settings.cert_tol
    basis, grid = f.first, f.second
    if not isinstance(grid, AbelianGrid):
        raise TypeError("second factor must be an abelian carrier")
    vals = f.tensor()
    scale = float(np.max(np.abs(vals)))
    defect = _hermitian_defect_in_u(vals, grid)
    if defect > 1e-9 * max(scale, 1.0):
        raise ValueError(f"kernel is not Hermitian in the group variable "
                         f"(defect {defect:.3e})")

    series = d_schoenberg(f, n_max, settings)
    n_max = series.basis.max_degree
    masses = series.degree_masses()
    tail_estimate = float(masses[-1])
    tail_tol = settings.tail_rel * float(masses.sum())
    tolerances = {"tol": tol, "tail_tol": tail_tol}

    if cross_check:
        swapped = np.array([fourier(SampledFunction(grid, vals[j])).values
                            for j in range(vals.shape[0])])
        direct = np.array([fourier(series.coefficient(n)).values
                           for n in range(n_max + 1)])
        table = series.basis.zonal_table * series.basis.weights
        redone = series.basis.harmonic_dims[:, None] * (table @ swapped)
        gap = np.max(np.abs(redone - direct))
        if gap > 1e-8 * max(scale, 1.0):
            raise RuntimeError(f"transform-order cross-check failed (gap {gap:.3e})")

    worst = None
    min_value = np.inf
    inconclusive = []
    for n in range(n_max + 1):
        rep = bochner_test(series.coefficient(n), tol=tol, settings=settings)
        if rep.min_value < min_value:
            min_value = rep.min_value
            worst = (n, rep.witness)
        if rep.verdict == CERTIFIED_NOT_PD:
            return CertReport(CERTIFIED_NOT_PD, witness=(n, rep.witness),
                              min_value=rep.min_value, tolerances=tolerances,
                              truncation=n_max, tail_estimate=tail_estimate)
        if rep.verdict == INCONCLUSIVE:
            inconclusive.append((n, rep.detail))
    if inconclusive:
        n, why = inconclusive[0]
        return CertReport(INCONCLUSIVE, witness=worst, min_value=float(min_value),
                          tolerances=tolerances, truncation=n_max,
                          tail_estimate=tail_estimate,
                          detail=f"coefficient {n}: {why}")
    if tail_estimate > tail_tol:
        return CertReport(INCONCLUSIVE, witness=worst, min_value=float(min_value),
                          tolerances=tolerances, truncation=n_max,
                          tail_estimate=tail_estimate,
                          detail="truncation insufficient: last coefficient mass "
                                 "above the tail tolerance")
    return CertReport(CERTIFIED_PD, witness=worst, min_value=float(min_value),
                      tolerances=tolerances, truncation=n_max,
                      tail_estimate=tail_estimate)


def certify_scalar_series(series: SchoenbergSeries, tol: float | None = None,
                          settings: NumericSettings = DEFAULT) -> CertReport:
    """Sign test for a pure-sphere expansion (trivial second factor)."""
    if tol is None:
        tol = settings.cert_tol
    coeffs = np.real_if_close(series.coeffs)
    masses = series.degree_masses()
    tail_estimate = float(masses[-1])
    tail_tol = settings.tail_rel * float(masses.sum())
    tolerances = {"tol": tol, "tail_tol": tail_tol}
    kmin = int(np.argmin(coeffs.real))
    vmin = float(coeffs.real[kmin])
    if vmin < -tol:
        return CertReport(CERTIFIED_NOT_PD, witness=kmin, min_value=vmin,
                          tolerances=tolerances, truncation=series.basis.max_degree,
                          tail_estimate=tail_estimate)
    if tail_estimate > tail_tol:
        return CertReport(INCONCLUSIVE, witness=kmin, min_value=vmin,
                          tolerances=tolerances, truncation=series.basis.max_degree,
                          tail_estimate=tail_estimate,
                          detail="truncation insufficient")
    return CertReport(CERTIFIED_PD, witness=kmin, min_value=vmin,
                      tolerances=tolerances, truncation=series.basis.max_degree,
                      tail_estimate=tail_estimate)


def certify_sphere_sphere(f: KernelField, n1: int | None = None, n2: int | None = None,
                          tol: float | None = None,
                          settings: NumericSettings = DEFAULT) -> CertReport:
    """Certify a kernel on a product of two spheres.

    The double coefficient table
    ``B[n, m] = dim_n dim_m sum_{j,k} w_j w_k f(x_j, y_k) c_n(x_j) c_m(y_k)``
    must be entrywise nonnegative with negligible marginal tails.
    """
    if tol is None:
        tol = settings.cert_tol
    b1, b2 = f.first, f.second
    if not isinstance(b1, SphereBasis) or not isinstance(b2, SphereBasis):
        raise TypeError("both factors must be spheres")
    n1 = b1.max_degree if n1 is None else n1
    n2 = b2.max_degree if n2 is None else n2
    vals = f.tensor()
    if np.max(np.abs(vals.imag)) if np.iscomplexobj(vals) else 0.0:
        raise ValueError("kernel must be real-valued on a product of spheres")
    vals = vals.real

    t1 = b1.zonal_table[: n1 + 1] * b1.weights
    t2 = b2.zonal_table[: n2 + 1] * b2.weights
    B = (b1.harmonic_dims[: n1 + 1, None] * b2.harmonic_dims[None, : n2 + 1]) * (t1 @ vals @ t2.T)

    tail1 = float(np.max(np.abs(B[-1, :])))
    tail2 = float(np.max(np.abs(B[:, -1])))
    tail_estimate = max(tail1, tail2)
    tail_tol = settings.tail_rel * float(np.abs(B).sum())
    tolerances = {"tol": tol, "tail_tol": tail_tol}
    kmin = np.unravel_index(int(np.argmin(B)), B.shape)
    vmin = float(B[kmin])
    witness = (int(kmin[0]), int(kmin[1]))
    if vmin < -tol:
        return CertReport(CERTIFIED_NOT_PD, witness=witness, min_value=vmin,
                          tolerances=tolerances, truncation=max(n1, n2),
                          tail_estimate=tail_estimate)
    if tail_estimate > tail_tol:
        return CertReport(INCONCLUSIVE, witness=witness, min_value=vmin,
                          tolerances=tolerances, truncation=max(n1, n2),
                          tail_estimate=tail_estimate, detail="truncation insufficient")
    return CertReport(CERTIFIED_PD, witness=witness, min_value=vmin,
                      tolerances=tolerances, truncation=max(n1, n2),
                      tail_estimate=tail_estimate)


def coefficient_table(f: KernelField, n1: int, n2: int) -> np.ndarray:
    """The double table used by :func:`certify_sphere_sphere`."""
    b1, b2 = f.first, f.second
    t1 = b1.zonal_table[: n1 + 1] * b1.weights
    t2 = b2.zonal_table[: n2 + 1] * b2.weights
    return (b1.harmonic_dims[: n1 + 1, None] * b2.harmonic_dims[None, : n2 + 1]) * (
        t1 @ f.tensor().real @ t2.T)


def schoenberg_bound(series: SchoenbergSeries):
    """Pointwise bound sum_n |coeffs[n](u)|, dominating |f(x, u)| over x."""
    if series.scalar:
        return float(np.sum(np.abs(series.coeffs)))
    return SampledFunction(series.grid, np.sum(np.abs(series.coeffs), axis=0))
