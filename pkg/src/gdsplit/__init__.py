"""Numerical exploration of generalized dominated splittings on tori."""

from .cocycle import (
    RestrictedNormPair,
    ScaledMatrix,
    a_n,
    a_profile,
    b_k,
    b_profile,
    cocycle_restricted,
    restricted_conorm,
    restricted_norm,
    sandwich_constant,
)
from .errors import GdsError, NumericError, ParameterError
from .grids import GridSpec
from .splittings import (
    SplittingSpec,
    check_invariance,
    constant_splitting,
    principal_angles,
    splitting_from_terms,
)
from .systems import (
    CAT_MATRIX,
    GOLDEN_STABLE,
    GOLDEN_UNSTABLE,
    ProductSystem,
    build_circle_map_g,
    build_rotation,
    build_toral,
    closed_form_log_derivative,
    example_3_1,
    orbit,
)

__version__ = "0.1.0"
