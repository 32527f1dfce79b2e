"""
Coarse-quotient witnesses: for every x and every y' within epsilon of fx,
some w near x has f(w) within R of y'. `zhang_delta` finds the least such
nearness over a window.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from ..core.documents import json_number
from ..core.errors import DomainError
from ..metric_core.fibers import fiber_distance_matrix
from ..metric_core.space import INF, MappedPair, format_point_id
from .windows import Window, resolve_window

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZhangResult:
    """
    Least delta for given (R, epsilon), or infeasibility.

    `pair` is (x, y'): the pair forcing delta when feasible, a pair without
    any witness otherwise.
    """

    R: float
    epsilon: float
    feasible: bool
    delta: float
    pair: Optional[List[str]] = None
    window_size: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "R": json_number(self.R),
            "epsilon": json_number(self.epsilon),
            "feasible": self.feasible,
            "delta": json_number(self.delta),
            "pair": self.pair,
            "window_size": self.window_size,
        }


def zhang_delta(f: MappedPair, R: float, epsilon: float, window: Optional[Window] = None) -> ZhangResult:
    """
    Minimal delta with N_epsilon(fx) inside N_R(f(N_delta(x))) for every x in the window.

    Witnesses w range over the whole source; delta is a realized source distance.
    """
    if not (R >= 0 and epsilon >= 0):
        raise DomainError("R and epsilon must be nonnegative")
    window = resolve_window(f.source, window)
    idx = window.indices
    tol = f.tolerance
    Y = f.target
    if idx.size == 0:
        return ZhangResult(R, epsilon, True, 0.0, window_size=0)

    fibers = fiber_distance_matrix(f)
    # reach[x, y'] = d_X(x, f^-1(N_R(y')))
    within_R = Y.dist[fibers.image, :] <= R + tol
    required = Y.dist[f.assign[idx], :] <= epsilon + tol
    targets = np.flatnonzero(required.any(axis=0))
    reach = np.full((idx.size, targets.size), INF)
    for k, y in enumerate(targets):
        columns = within_R[:, y]
        if columns.any():
            reach[:, k] = fibers.matrix[np.ix_(idx, np.flatnonzero(columns))].min(axis=1)

    need = np.where(required[:, targets], reach, -INF)
    a, k = np.unravel_index(int(np.argmax(need)), need.shape)
    delta = float(need[a, k])
    pair = [format_point_id(f.source.points[idx[a]]), format_point_id(Y.points[targets[k]])]
    feasible = bool(np.isfinite(delta))
    logger.debug("zhang delta(R=%g, eps=%g) = %s over %d points", R, epsilon, delta, idx.size)
    return ZhangResult(R, epsilon, feasible, max(delta, 0.0), pair, window_size=window.size)


def zhang_table(
    f: MappedPair,
    R: float,
    epsilons: Sequence[float],
    window: Union[None, Window, Callable[[float], Window]] = None,
) -> List[ZhangResult]:
    """zhang_delta over several epsilons; `window` may depend on epsilon."""
    results = []
    for epsilon in epsilons:
        current = window(epsilon) if callable(window) else window
        results.append(zhang_delta(f, R, epsilon, current))
    return results
