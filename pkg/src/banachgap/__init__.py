"""Certified openings, gap metrics and related constants for finite-dimensional normed spaces."""

from .banach_mazur import bm_upper, prop61_check, prop62_embed
from .config import DEFAULT, BudgetExceeded, Config
from .constructions import (douady_pair, estimate_642, example_310, example_314, identity_642,
                            identity_map, kadets_bound, kadets_glue, mazur_maps)
from .distance import dist_bounds, dist_lp
from .indices import IndexSetA, build_index_set, h_index, prop621_check
from .kernels import BACKEND
from .norms import (DirectSum, Dual, Lp, NormedSpace, Pullback, Quotient, WeightedLp,
                    from_dict, from_functionals)
from .openings import (GapReport, Method, borsuk_extremal, dg_metric, duality_check,
                       hilbert_theta, inclination, lambda0, lambda_gap, omega, omega0, theta,
                       theta0)
from .operator_opening import (OperatorGapReport, dop_metric, inverse_bound_check, lambda_proj,
                               minimal_projection, prop53_check, r0_bounds, r_bounds)
from .operators import Interval, LinearMap, markus_check, min_modulus, op_norm, regular_type_demo
from .subspaces import Subspace, annihilator, certified_extremum, sphere_net

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BudgetExceeded", "Config", "DEFAULT", "DirectSum", "Dual", "GapReport",
    "IndexSetA", "Interval", "LinearMap", "Lp", "Method", "NormedSpace", "OperatorGapReport",
    "Pullback", "Quotient", "Subspace", "WeightedLp", "annihilator", "bm_upper",
    "borsuk_extremal", "build_index_set", "certified_extremum", "dg_metric", "dist_bounds",
    "dist_lp", "dop_metric", "douady_pair", "duality_check", "estimate_642", "example_310",
    "example_314", "from_dict", "from_functionals", "h_index", "hilbert_theta", "identity_642",
    "identity_map", "inclination", "inverse_bound_check", "kadets_bound", "kadets_glue",
    "lambda0", "lambda_gap", "lambda_proj", "markus_check", "mazur_maps", "min_modulus",
    "minimal_projection", "omega", "omega0", "op_norm", "prop53_check", "prop61_check",
    "prop621_check", "prop62_embed", "r0_bounds", "r_bounds", "regular_type_demo", "sphere_net",
    "theta", "theta0",
]
