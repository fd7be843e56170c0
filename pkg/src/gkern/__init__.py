"""Positive definite kernels on spheres and abelian groups: construction,
zonal/spectral expansion, and certification with independent Gram-matrix
falsification."""

from .abelian import (AbelianGrid, SampledFunction, bochner_test, fourier,
                      inverse_fourier, linnik_check, linnik_density)
from .fourier_tails import (PeriodizationSpec, conclusion_demo,
                            fourier_lower_bound_check, ln_norm, periodize)
from .gneiting import (CMMixture, RnPolynomials, cm_mixture_coeffs,
                       exp_arccos_coeffs, psi_infinity_check, rn_table)
from .gram import PointConfig, gram_matrix, min_eigenvalue, randomized_pd_probe
from .products import SpectralFamily, chg_synthesize, chg_synthesize_tensor, gneiting_certify
from .report import CERTIFIED_NOT_PD, CERTIFIED_PD, INCONCLUSIVE, CertReport
from .schoenberg import (KernelField, SchoenbergSeries, certify_sphere_sphere,
                         certify_sphere_time, d_schoenberg, schoenberg_bound,
                         synthesize, synthesize_tensor)
from .settings import DEFAULT, NumericSettings
from .special import (ArccosSeries, SphereBasis, arccos_coeffs, build_quadrature,
                      gegenbauer_c, harmonic_dim, surface_measure)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
