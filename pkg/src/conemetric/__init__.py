"""Spherical cone metrics with three cone points on the Riemann sphere."""

from .divisor import (Divisor, ReducibilityClass, classify_reducibility, irreducible_exists,
                      trace_condition_value)
from .errors import *  # noqa: F401,F403
from .hopf import HopfDifferential, evaluate_Q, hopf_from_divisor, schwarzian
from .metriceval import (ExplicitMetric, IrreducibleMetric, conical_order_estimate,
                         curvature_sample, metric_source, sample_grid, schwarzian_residual,
                         total_area)
from .monodromy import (classify_deformation, compute_monodromy, lemma_a_value, standard_triple,
                        unitarize)
from .pathint import IntegratorConfig, PathSpec, integrate_frame
from .reducible import solve_h1, solve_h1_system, solve_h3
from .surface import SurfaceMetric, SurfaceSpec, total_abs_curvature

__version__ = "0.1.0"
