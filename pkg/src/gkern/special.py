"""Zonal special functions on spheres.

Normalized Gegenbauer (ultraspherical) polynomials ``c_n(d, x)`` with
``c_n(d, 1) = 1``, the dimensions of the spaces of degree-``n`` spherical
harmonics, the probability measure on ``[-1, 1]`` induced by projecting
the uniform measure of the d-sphere onto one coordinate, and the Gaussian
quadrature rule for that measure.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "surface_measure",
    "gegenbauer_c",
    "gegenbauer_table",
    "harmonic_dim",
    "build_quadrature",
    "SphereBasis",
    "ArccosSeries",
    "arccos_coeffs",
]


def surface_measure(d: int) -> float:
    """Total surface measure of the unit d-sphere, 2*pi^((d+1)/2)/Gamma((d+1)/2)."""
    if d < 0:
        raise ValueError(f"sphere dimension must be >= 0, got {d}")
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def _check_x_domain(x: np.ndarray) -> None:
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise ValueError("argument outside [-1, 1]")


def gegenbauer_c(d: int, n: int, x):
    """Normalized Gegenbauer polynomial c_n(d, x) with c_n(d, 1) = 1.

    Evaluated by a three-term recurrence carried directly on the
    normalized values; the raw polynomials grow like C_n(1) and would
    overflow long before n does any harm here.  For d = 1 the recurrence
    degenerates to the Chebyshev one, i.e. c_n(1, x) = cos(n arccos x).
    """
    table = gegenbauer_table(d, n, x)
    return table[n]


def gegenbauer_table(d: int, n_max: int, x):
    """All normalized Gegenbauer values c_0..c_{n_max} at once.

    Returns an array of shape ``(n_max + 1,) + shape(x)``.
    """
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {d}")
    if n_max < 0:
        raise ValueError(f"degree must be >= 0, got {n_max}")
    x = np.asarray(x, dtype=float)
    _check_x_domain(x)

    out = np.empty((n_max + 1,) + x.shape, dtype=float)
    out[0] = 1.0
    if n_max == 0:
        return out
    out[1] = x
    lam = 0.5 * (d - 1)
    for n in range(2, n_max + 1):
        # c_n = [2(n + lam - 1) x c_{n-1} - (n - 1) c_{n-2}] / (n + 2 lam - 1)
        out[n] = (2.0 * (n + lam - 1.0) * x * out[n - 1] - (n - 1.0) * out[n - 2]) / (
            n + 2.0 * lam - 1.0
        )
    return out


def harmonic_dim(d: int, n: int) -> int:
    """Dimension of the space of degree-n spherical harmonics on the d-sphere.

    Exact integer; Python integers cannot overflow.
    """
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {d}")
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if n == 0:
        return 1
    if n == 1:
        return d + 1
    return math.comb(d + n, d) - math.comb(d + n - 2, d)


def _recurrence_beta(d: int, k: int) -> float:
    """Monic three-term recurrence coefficient beta_k for the sphere weight.

    The projected sphere measure on [-1, 1] is the ultraspherical weight
    with parameter lam = (d-1)/2; beta_k = k(k+d-2)/((2k+d-1)(2k+d-3)),
    except the d = 1 (Chebyshev) case where beta_1 = 1/2.
    """
    if d == 1 and k == 1:
        return 0.5
    return k * (k + d - 2.0) / ((2.0 * k + d - 1.0) * (2.0 * k + d - 3.0))


def build_quadrature(d: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """m-node Gaussian rule for the projected measure of the d-sphere.

    Nodes are the eigenvalues of the symmetric tridiagonal recurrence
    matrix, weights the squared first eigenvector components (the measure
    has total mass 1).  Exact on polynomials of degree <= 2m - 1.
    """
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {d}")
    if m < 1:
        raise ValueError(f"quadrature order must be >= 1, got {m}")
    if m == 1:
        return np.zeros(1), np.ones(1)
    off = np.sqrt([_recurrence_beta(d, k) for k in range(1, m)])
    nodes, vecs = eigh_tridiagonal(np.zeros(m), off)
    weights = vecs[0] ** 2
    return nodes, weights


@dataclass(frozen=True)
class SphereBasis:
    """Sphere dimension, truncation degree and the matching quadrature rule.

    The rule integrates against the probability measure obtained by
    projecting the uniform distribution on the d-sphere to one coordinate;
    by default its order is 2(max_degree + 1) so that products of basis
    polynomials up to degree 2*max_degree + 1 integrate exactly.
    """

    d: int
    max_degree: int
    quad_order: int
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def create(cls, d: int, max_degree: int, quad_order: int | None = None) -> "SphereBasis":
        if max_degree < 0:
            raise ValueError(f"max_degree must be >= 0, got {max_degree}")
        if quad_order is None:
            quad_order = 2 * (max_degree + 1)
        nodes, weights = build_quadrature(d, quad_order)
        basis = cls(d, max_degree, quad_order, nodes, weights)
        basis.validate()
        return basis

    def validate(self, tol: float = 1e-12) -> None:
        if abs(self.weights.sum() - 1.0) > tol:
            raise ValueError("quadrature weights do not sum to 1")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")
        if np.any(np.abs(self.nodes) >= 1):
            raise ValueError("quadrature nodes must lie in (-1, 1)")

    @cached_property
    def zonal_table(self) -> np.ndarray:
        """c_n(d, x_j) for n <= max_degree over the quadrature nodes; shape (N+1, m)."""
        return gegenbauer_table(self.d, self.max_degree, self.nodes)

    @cached_property
    def harmonic_dims(self) -> np.ndarray:
        """Spherical harmonic space dimensions for n <= max_degree, as floats."""
        return np.array([harmonic_dim(self.d, n) for n in range(self.max_degree + 1)], dtype=float)

    def integrate(self, values: np.ndarray) -> complex:
        """Quadrature of samples taken at ``nodes`` (leading axis)."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


@dataclass(frozen=True)
class ArccosSeries:
    """Truncated Maclaurin series of arccos.

    ``coefficients[k]`` multiplies x^k; the constant term is pi/2, even
    powers vanish and odd powers carry strictly negative coefficients.
    """

    n_terms: int
    coefficients: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        _check_x_domain(x)
        return np.polynomial.polynomial.polyval(x, self.coefficients)


def arccos_coeffs(n_terms: int) -> ArccosSeries:
    """Series coefficients of arccos up to x^n_terms.

    The x^(2n+1) coefficient is -(1/2)_n / (n! (2n+1)), accumulated as a
    running product to avoid factorial overflow.
    """
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    coeffs = np.zeros(n_terms + 1)
    coeffs[0] = math.pi / 2.0
    ratio = 1.0  # (1/2)_n / n!
    n = 0
    while 2 * n + 1 <= n_terms:
        coeffs[2 * n + 1] = -ratio / (2 * n + 1)
        n += 1
        ratio *= (n - 0.5) / n
    return ArccosSeries(n_terms, coeffs)
