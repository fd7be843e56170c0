"""Shared numeric tolerances and truncation defaults.

Every certifier in the package reads its knobs from a single
:class:`NumericSettings` record so that reports can echo the exact
tolerances a verdict was produced under.
"""

from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class NumericSettings:
    """Global numeric policy.

    Tolerances are absolute unless the name says otherwise.
    """

    quad_tol: float = 1e-12      # quadrature / eigensolver acceptance
    cert_tol: float = 1e-9       # slack on transform nonnegativity
    tail_rel: float = 1e-8       # truncation tail, relative to total coefficient mass
    boundary_rel: float = 1e-6   # window-edge decay guard, relative to max|f|
    series_tail_rel: float = 1e-2  # convergence guard for power-series membership checks
    max_degree: int = 64         # default spherical truncation
    probe_trials: int = 200
    probe_points: int = 10

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT = NumericSettings()
