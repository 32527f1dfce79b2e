"""Extended metric spaces, maps, controls, products and coproducts."""

from .checks import MetricCheck, check_metric
from .controls import (
    AffineCheck,
    AffineFit,
    AffineWitness,
    ConstantCheck,
    ControlProfile,
    MapClassification,
    check_affine_upper,
    classify_map,
    closeness_distance,
    control_profile,
    lipschitz_constant,
    min_affine_lower,
    min_affine_upper,
    surjectivity_radius,
)
from .fibers import FiberDistances, fiber_distance_matrix, preimage_distances
from .products import CoproductResult, ProductResult, coproduct, product_linf
from .space import (
    INF,
    FiniteExtMetricSpace,
    MappedPair,
    compose,
    format_point_id,
    identity_map,
    inclusion,
    restrict,
    restrict_indices,
    retarget,
    same_space,
)
