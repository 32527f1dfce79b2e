"""Seeded random instances for the coequaliser and Rips trials."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.config import get_settings
from ..core.errors import DomainError
from ..metric_core.space import INF, FiniteExtMetricSpace, MappedPair
from .groups import l1_metric

logger = logging.getLogger(__name__)


def discrete_copy(Y: FiniteExtMetricSpace) -> MappedPair:
    """Y's points with every distinct pair at INF, mapped to Y by the identity."""
    dist = np.full((Y.size, Y.size), INF)
    np.fill_diagonal(dist, 0.0)
    X = FiniteExtMetricSpace(Y.points, dist, labels=Y.labels, name=f"disc({Y.name})")
    return MappedPair(X, Y, np.arange(Y.size), name="id")


def random_grid_space(
    rng: np.random.Generator,
    size: int,
    side: int,
    name: str,
    components: int = 1,
) -> FiniteExtMetricSpace:
    """
    Distinct integer points of a side x side grid under l1, optionally split into components.

    Each point is a path-metric vertex of the grid graph, so distances are integral
    and at most 2 (side - 1); points in different components are at INF.
    """
    if size > side * side:
        raise DomainError(f"cannot place {size} points on a {side}x{side} grid")
    cells = rng.choice(side * side, size=size, replace=False)
    cells.sort()
    coords = np.stack([cells // side, cells % side], axis=1)
    dist = l1_metric(coords)
    if components > 1:
        parts = rng.integers(0, components, size=size)
        dist[parts[:, None] != parts[None, :]] = INF
    points = tuple((int(a), int(b)) for a, b in coords)
    return FiniteExtMetricSpace(points, dist, name=name)


@dataclass(frozen=True, eq=False)
class CoequaliserInstance:
    seed: int
    A: FiniteExtMetricSpace
    X: FiniteExtMetricSpace
    f: MappedPair
    g: MappedPair


def random_instance(
    seed: Optional[int] = None,
    max_source: int = 10,
    max_target: int = 20,
    max_distance: int = 20,
    split_probability: float = 0.25,
) -> CoequaliserInstance:
    """Random parallel maps f, g: A -> X between small integer spaces."""
    seed = get_settings().default_seed if seed is None else seed
    rng = np.random.default_rng(seed)
    side = max_distance // 2 + 1
    n_x = int(rng.integers(1, max_target + 1))
    n_a = int(rng.integers(1, max_source + 1))
    split = 2 if rng.random() < split_probability else 1
    X = random_grid_space(rng, n_x, side, "X", components=split)
    A = random_grid_space(rng, n_a, side, "A", components=split)
    f = MappedPair(A, X, rng.integers(0, n_x, size=n_a), name="f")
    g = MappedPair(A, X, rng.integers(0, n_x, size=n_a), name="g")
    logger.debug("coequaliser instance seed=%d: |A|=%d |X|=%d", seed, n_a, n_x)
    return CoequaliserInstance(seed, A, X, f, g)


@dataclass(frozen=True, eq=False)
class RipsInstance:
    seed: int
    f: MappedPair
    radius: int

    @property
    def X(self) -> FiniteExtMetricSpace:
        return self.f.source

    @property
    def Y(self) -> FiniteExtMetricSpace:
        return self.f.target


def greedy_net(Y: FiniteExtMetricSpace, radius: int) -> np.ndarray:
    """Rows of Y, chosen in order, such that every point is within `radius` of one."""
    covered = np.zeros(Y.size, dtype=bool)
    net = []
    for i in range(Y.size):
        if not covered[i]:
            net.append(i)
            covered |= Y.dist[i] <= radius
    return np.array(net, dtype=np.int64)


def random_rips_instance(
    seed: Optional[int] = None,
    max_source: int = 40,
    max_radius: int = 2,
    target_side: int = 6,
) -> RipsInstance:
    """
    A map from a random grid space onto a greedy net of a random connected grid space.

    The image is an r-net of Y with r <= max_radius, so f is coarsely surjective.
    """
    seed = get_settings().default_seed if seed is None else seed
    rng = np.random.default_rng(seed)
    n_y = int(rng.integers(2, target_side * target_side // 2 + 1))
    Y = random_grid_space(rng, n_y, target_side, "Y")
    radius = int(rng.integers(0, max_radius + 1))
    net = greedy_net(Y, radius)
    n_x = int(rng.integers(net.size, max(net.size, max_source) + 1))
    X = random_grid_space(rng, n_x, 8, "X")
    assign = np.concatenate([net, rng.choice(net, size=n_x - net.size)])
    f = MappedPair(X, Y, rng.permutation(assign), name="f")
    logger.debug("rips instance seed=%d: |X|=%d |Y|=%d r=%d", seed, n_x, n_y, radius)
    return RipsInstance(seed, f, radius)
