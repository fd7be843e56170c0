"""Power-series positivity on spheres of every dimension.

The composition exp(-a * arccos x) = e^(-a pi/2) sum_n r_n(a) x^n / n!
has coefficient polynomials r_n that obey a partition-style recursion
with squared double factorials; they are monic of degree n, have
nonnegative integer coefficients, and alternate parity with n.  Mixtures
of decaying exponentials therefore expand with nonnegative coefficients
in the dot product, which is exactly membership in the class of kernels
positive definite on spheres of every dimension.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .report import CERTIFIED_NOT_PD, CERTIFIED_PD, INCONCLUSIVE, CertReport
from .settings import DEFAULT, NumericSettings

__all__ = [
    "RnPolynomials",
    "rn_table",
    "exp_arccos_coeffs",
    "CMMixture",
    "cm_mixture_coeffs",
    "psi_infinity_check",
]


@dataclass(frozen=True)
class RnPolynomials:
    """Exact integer coefficient table of the polynomials r_0 .. r_{max_n}.

    ``table[n][j]`` is the coefficient of a^j in r_n; entries are Python
    integers, so no overflow is possible.
    """

    max_n: int
    table: tuple

    def __getitem__(self, n: int) -> tuple:
        return self.table[n]

    def evaluate(self, n: int, a: float) -> float:
        acc = 0.0
        for c in reversed(self.table[n]):
            acc = acc * a + c
        return acc

    def render(self, n: int) -> str:
        """Human-readable polynomial, highest power first, e.g. a^3+a."""
        coeffs = self.table[n]
        parts = []
        for j in range(len(coeffs) - 1, -1, -1):
            c = coeffs[j]
            if c == 0:
                continue
            if j == 0:
                parts.append(str(c))
            else:
                head = "" if c == 1 else str(c)
                parts.append(f"{head}a" if j == 1 else f"{head}a^{j}")
        return "+".join(parts) if parts else "0"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "power", "coefficient"])
            for n, coeffs in enumerate(self.table):
                for j, c in enumerate(coeffs):
                    if c != 0:
                        writer.writerow([n, j, c])


def _odd_double_factorial_sq(kmax: int) -> list:
    """((2k-1)!!)^2 for k = 0..kmax, with (-1)!! = 1."""
    out = [1]
    for k in range(1, kmax + 1):
        out.append(out[-1] * (2 * k - 1) * (2 * k - 1))
    return out


def rn_table(max_n: int) -> RnPolynomials:
    """Build r_0..r_{max_n} by the recursion

        r_{n+1}(a) = a * sum_{k=0..n//2} C(n, 2k) ((2k-1)!!)^2 r_{n-2k}(a)

    in exact integer arithmetic, starting from r_0 = 1.
    """
    if max_n < 0:
        raise ValueError(f"max_n must be >= 0, got {max_n}")
    dfsq = _odd_double_factorial_sq(max_n // 2 + 1)
    table = [(1,)]
    for n in range(max_n):
        acc = [0] * (n + 1)   # coefficients of sum before the leading a-shift
        for k in range(n // 2 + 1):
            c = math.comb(n, 2 * k) * dfsq[k]
            for j, rj in enumerate(table[n - 2 * k]):
                acc[j] += c * rj
        table.append((0, *acc))  # multiply by a
    return RnPolynomials(max_n, tuple(table))


def exp_arccos_coeffs(a: float, max_n: int) -> np.ndarray:
    """Power series coefficients of exp(-a arccos x) up to x^max_n.

    Term n is e^(-a pi/2) r_n(a)/n!, evaluated through the normalized
    recursion t_{n+1} = a/(n+1) * sum_k ((2k-1)!!/(2k)!!) t_{n-2k} so that
    no factorial is ever formed; every term is strictly positive.
    """
    if a <= 0:
        raise ValueError(f"decay rate must be positive, got {a}")
    if max_n < 0:
        raise ValueError(f"max_n must be >= 0, got {max_n}")
    ratios = np.empty(max_n // 2 + 2)
    ratios[0] = 1.0
    for k in range(1, len(ratios)):
        ratios[k] = ratios[k - 1] * (2 * k - 1) / (2 * k)
    t = np.empty(max_n + 1)
    t[0] = 1.0
    for n in range(max_n):
        acc = 0.0
        for k in range(n // 2 + 1):
            acc += ratios[k] * t[n - 2 * k]
        t[n + 1] = a * acc / (n + 1)
    return math.exp(-a * math.pi / 2.0) * t


@dataclass(frozen=True)
class CMMixture:
    """Finite mixture of decaying exponentials sum_k w_k exp(-a_k theta)."""

    atoms: tuple   # ((a_k, w_k), ...)

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("mixture needs at least one atom")
        total = 0.0
        for a, w in self.atoms:
            if a < 0:
                raise ValueError(f"decay rates must be >= 0, got {a}")
            if w <= 0:
                raise ValueError(f"weights must be positive, got {w}")
            total += w
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {total!r}")

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return sum(w * np.exp(-a * theta) for a, w in self.atoms)


def cm_mixture_coeffs(mix: CMMixture, max_n: int) -> np.ndarray:
    """c_n = sum_k w_k e^(-a_k pi/2) r_n(a_k) for n <= max_n.

    These are the unnormalized series coefficients of the mixture in the
    dot product (divide by n! for the x^n coefficient); they are
    nonnegative by construction.  Formed from the normalized recursion
    and an explicit factorial, so usable up to max_n ~ 165 before the
    factorial leaves double range.
    """
    out = np.zeros(max_n + 1)
    facts = np.cumprod(np.concatenate([[1.0], np.arange(1, max_n + 1, dtype=float)]))
    for a, w in mix.atoms:
        if a == 0.0:
            out[0] += w    # constant atom: r_n(0) = 0 for n >= 1
            continue
        out += w * exp_arccos_coeffs(a, max_n) * facts
    return out


def psi_infinity_check(coeffs, tol: float | None = None,
                       tail_tol: float | None = None,
                       settings: NumericSettings = DEFAULT) -> CertReport:
    """Membership test for power series positive definite on every sphere.

    The x^n coefficients must all be nonnegative (within ``tol``) and the
    partial sums must look converged: the last coefficient must not
    exceed ``tail_tol`` relative to the total coefficient mass.  Negative
    coefficients give certified-not-PD with the offending degree as
    witness; an unconverged tail gives inconclusive.
    """
    if tol is None:
        tol = settings.cert_tol
    coeffs = np.asarray(coeffs, dtype=float)
    mass = float(np.sum(np.abs(coeffs)))
    if tail_tol is None:
        tail_tol = settings.series_tail_rel * max(mass, 1e-300)
    tolerances = {"tol": tol, "tail_tol": tail_tol}
    kmin = int(np.argmin(coeffs)) if len(coeffs) else 0
    vmin = float(coeffs[kmin]) if len(coeffs) else 0.0
    tail = float(abs(coeffs[-1])) if len(coeffs) else 0.0
    if vmin < -tol:
        return CertReport(CERTIFIED_NOT_PD, witness=kmin, min_value=vmin,
                          tolerances=tolerances, truncation=len(coeffs) - 1,
                          tail_estimate=tail)
    if tail > tail_tol:
        return CertReport(INCONCLUSIVE, witness=kmin, min_value=vmin,
                          tolerances=tolerances, truncation=len(coeffs) - 1,
                          tail_estimate=tail,
                          detail="partial sums not converged at this truncation")
    return CertReport(CERTIFIED_PD, witness=kmin, min_value=vmin,
                      tolerances=tolerances, truncation=len(coeffs) - 1,
                      tail_estimate=tail)
