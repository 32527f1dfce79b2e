"""
Augmented weighted Rips graphs Rips^Theta_sigma(Y; f) and their path metrics.

Internal edges join points of Y at distance at most sigma with weight
Theta(d_Y). Augmented edges join image points with weight one more than the
distance between their fibers.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.config import get_settings
from ..core.documents import json_number
from ..core.errors import PreconditionError
from ..filtration.windows import Window, resolve_window
from ..graph_metric.weighted_graph import EdgeKind, GraphBuilder, WeightedGraph, path_metric
from ..metric_core.controls import surjectivity_radius
from ..metric_core.fibers import fiber_distance_matrix, preimage_distances
from ..metric_core.space import INF, FiniteExtMetricSpace, MappedPair, format_point_id
from .weights import WeightFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RipsResult:
    """
    The augmented Rips graph, its path metric on Y, and the internal edges
    left out because their weight exceeded `cap`.
    """

    factor: MappedPair
    theta: WeightFunction
    sigma: float
    graph: WeightedGraph
    space: FiniteExtMetricSpace
    cap: float
    omitted: np.ndarray = field(repr=False, default=None)

    @property
    def omitted_count(self) -> int:
        return 0 if self.omitted is None else int(self.omitted.shape[0])

    def omitted_mask(self) -> np.ndarray:
        """Boolean matrix of pairs whose internal edge was omitted."""
        n = self.space.size
        mask = np.zeros((n, n), dtype=bool)
        if self.omitted_count:
            mask[self.omitted[:, 0], self.omitted[:, 1]] = True
            mask[self.omitted[:, 1], self.omitted[:, 0]] = True
        return mask

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta": self.theta.to_dict(),
            "sigma": json_number(self.sigma),
            "vertices": self.graph.order,
            "edges": self.graph.kind_counts(),
            "cap": json_number(self.cap),
            "omitted_internal_edges": self.omitted_count,
        }


def require_coarsely_surjective(f: MappedPair) -> float:
    """Return the surjectivity radius, raising when it is infinite."""
    r = surjectivity_radius(f)
    if not np.isfinite(r):
        raise PreconditionError("map is not coarsely surjective on this truncation")
    return r


def augmented_rips(
    f: MappedPair,
    theta: WeightFunction,
    sigma: float = INF,
    cap: Optional[float] = None,
) -> RipsResult:
    """
    Build Rips^Theta_sigma(Y; f) and its path metric on Y.

    Internal edges heavier than `cap` (default from settings) are omitted with a
    warning; a pair joined by such an edge always has a cheaper connection
    through lighter edges or no finite one at all.
    """
    require_coarsely_surjective(f)
    if not sigma >= 0:
        raise PreconditionError(f"sigma must be nonnegative, got {sigma}")
    cap = get_settings().exp2_cap if cap is None else cap
    Y = f.target
    builder = GraphBuilder(Y.points)

    iu, ju = np.triu_indices(Y.size, 1)
    d = Y.dist[iu, ju]
    internal = np.isfinite(d) & (d <= sigma + Y.tolerance)
    iu, ju, d = iu[internal], ju[internal], d[internal]
    weight = theta.values(d)
    over = weight > cap
    if over.any():
        warnings.warn(f"{int(over.sum())} internal edges above weight cap {cap:g} omitted")
    builder.add_edges(iu[~over], ju[~over], weight[~over], EdgeKind.INTERNAL)
    omitted = np.stack([iu[over], ju[over]], axis=1)

    if f.source.size:
        image = f.image_indices
        between = preimage_distances(f, fiber_distance_matrix(f))
        ku, lu = np.triu_indices(image.size, 1)
        y_finite = np.isfinite(Y.dist[image[ku], image[lu]])
        x_finite = np.isfinite(between[ku, lu])
        keep = y_finite & x_finite
        builder.add_edges(image[ku[keep]], image[lu[keep]], between[ku[keep], lu[keep]] + 1.0, EdgeKind.AUGMENTED)

    graph = builder.build()
    space = path_metric(graph, name=f"Y^{theta.kind.value}_{sigma:g}")
    logger.debug("augmented Rips at sigma=%g: %s", sigma, graph.kind_counts())
    return RipsResult(f, theta, sigma, graph, space, cap, omitted)


def image_subspace(
    f: MappedPair,
    theta: WeightFunction,
    sigma: float = INF,
    rips: Optional[RipsResult] = None,
) -> FiniteExtMetricSpace:
    """U^Theta_sigma: the path metric of the subgraph spanned by f(X)."""
    rips = rips or augmented_rips(f, theta, sigma)
    image_points = [f.target.points[i] for i in f.image_indices]
    return path_metric(rips.graph.induced(image_points), name="U")


@dataclass(frozen=True)
class StabilisationRecord:
    sigma: float
    max_discrepancy: float
    chain_ok: bool
    witness: Optional[List[str]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma": json_number(self.sigma),
            "max_discrepancy": json_number(self.max_discrepancy),
            "chain_ok": self.chain_ok,
            "witness_pair": self.witness,
        }


@dataclass(frozen=True)
class StabilisationReport:
    """Pointwise comparison of the finite-scale metrics with the limit metric."""

    records: List[StabilisationRecord]
    isometric_from: Optional[float]
    window_size: int

    @property
    def chain_ok(self) -> bool:
        return all(record.chain_ok for record in self.records)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "records": [record.to_dict() for record in self.records],
            "isometric_from": None if self.isometric_from is None else json_number(self.isometric_from),
            "window_size": self.window_size,
            "chain_ok": self.chain_ok,
        }


def stabilisation_report(
    f: MappedPair,
    theta: WeightFunction,
    sigma_grid: Sequence[float],
    window: Optional[Window] = None,
) -> StabilisationReport:
    """
    Compare each scale of the grid with the limit metric on the window.

    Records the largest gap between the two and whether the metrics are
    nonincreasing along the grid and bounded below by the limit.
    """
    window = resolve_window(f.target, window)
    idx = window.indices
    limit = augmented_rips(f, theta, INF).space.dist[np.ix_(idx, idx)]
    tol = f.tolerance
    records = []
    previous = None
    isometric_from = None
    for sigma in sorted(sigma_grid):
        current = augmented_rips(f, theta, sigma).space.dist[np.ix_(idx, idx)]
        chain_ok = bool(np.all(limit <= current + tol))
        if previous is not None:
            chain_ok = chain_ok and bool(np.all(current <= previous + tol))
        with np.errstate(invalid="ignore"):
            gap = np.where(np.isinf(current) & np.isinf(limit), 0.0, current - limit)
        witness = None
        worst = 0.0
        if gap.size:
            a, b = np.unravel_index(int(np.argmax(gap)), gap.shape)
            worst = float(gap[a, b])
            if worst > tol:
                witness = [format_point_id(f.target.points[idx[a]]), format_point_id(f.target.points[idx[b]])]
        if worst <= tol and isometric_from is None:
            isometric_from = float(sigma)
        elif worst > tol:
            isometric_from = None
        records.append(StabilisationRecord(float(sigma), max(worst, 0.0), chain_ok, witness))
        previous = current
    return StabilisationReport(records, isometric_from, window.size)
