"""Augmented weighted Rips graphs, factorisation checks and maximal-metric synthesis."""

from .augmented import (
    RipsResult,
    StabilisationReport,
    augmented_rips,
    image_subspace,
    stabilisation_report,
)
from .checks import Report, check_ext_qi, check_image_qi, check_lower, nearest_image_retraction
from .maximal import (
    MaximalMetricResult,
    PrecedesVerdict,
    precedes_on_family,
    ratio_statistic,
    synthesize_maximal_metric,
)
from .weights import DoublingCertificate, ThetaKind, WeightFunction, doubling_certificate
