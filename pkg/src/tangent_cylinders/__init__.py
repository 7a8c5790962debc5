"""Find, extend and certify configurations of mutually touching cylinders in R^d."""

from .algebra import (
    PairResidual,
    TangencyClass,
    classify_pair,
    gram_P,
    gram_Q,
    residual_with_gradient,
    tangency_F,
    tangency_G,
)
from .bounds import (
    bounds_table,
    component_bound_general,
    component_bound_unit,
    milnor_thom_bound,
    parallel_family_bound,
    parameter_count_prediction,
    theorem_bound_general,
    theorem_bound_unit,
    three_sign_bound,
)
from .config_io import ConfigFormatError, VerificationReport, export_mesh, load, save, verify
from .geometry import (
    canonical_rotate,
    direction,
    dist_squared_rational,
    line_distance,
    oracle_distance,
    point_at,
)
from .model import Configuration, Cylinder, LineParam, RotationMap
from .solver import (
    Gauge,
    NonGenericPair,
    SearchSpec,
    SolverReport,
    Status,
    extend_configuration,
    gauge_fix,
    jacobian,
    lm_refine,
    multi_start_search,
    residual_vector,
)

__version__ = "0.1.0"
