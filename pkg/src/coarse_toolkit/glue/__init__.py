"""Coarse gluing and coequaliser spaces."""

from .gluing import (
    CoequaliserResult,
    ComparisonReport,
    GluingResult,
    coarse_glue,
    coeq_space,
    double_glue_comparison,
)
