"""Kernel and quotient filtrations, equaliser sublevels and stability profiling."""

from ..metric_core.fibers import fiber_distance_matrix
from .profiles import (
    CSV_COLUMNS,
    FiltrationProfile,
    ProfileRecord,
    RecordKind,
    TrendReport,
    default_sigma_grid,
    kernel_stability_profile,
    pair_witness_distance,
    quotient_stability_profile,
    stabilisation_trend,
    write_profiles_csv,
)
from .sublevels import (
    KernelSublevel,
    QuotientResult,
    SublevelResult,
    eq_sublevel,
    kernel_sublevel,
    quotient_graph,
    quotient_space,
)
from .windows import Window, resolve_window
from .zhang import ZhangResult, zhang_delta, zhang_table
