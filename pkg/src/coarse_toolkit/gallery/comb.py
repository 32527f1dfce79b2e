"""
The comb: teeth of growing height over a ray, with gaps growing within each stage.

Stage n runs j = 1..n: attach a tooth of height n at the current position x,
then move x to x + j. The ray is truncated at the final position.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Tuple

import numpy as np

from ..core.errors import DomainError
from ..filtration.windows import Window
from ..graph_metric.weighted_graph import GraphBuilder, WeightedGraph, path_metric
from ..metric_core.space import FiniteExtMetricSpace, MappedPair
from .family import TruncationFamily, TruncationInstance
from .groups import l1_metric

logger = logging.getLogger(__name__)

Point = Tuple[int, int]


def comb_stages(n_max: int) -> Tuple[Tuple[Tuple[int, ...], ...], int]:
    """Tooth positions per stage and the final position."""
    if n_max < 1:
        raise DomainError(f"n_max must be at least 1, got {n_max}")
    x = 0
    stages = []
    for n in range(1, n_max + 1):
        teeth = []
        for j in range(1, n + 1):
            teeth.append(x)
            x += j
        stages.append(tuple(teeth))
    return tuple(stages), x


@dataclass(frozen=True, eq=False)
class Comb:
    """A truncated comb with its path metric X, the l1 metric Y and the identity f: X -> Y."""

    n_max: int
    stages: Tuple[Tuple[int, ...], ...]
    x_final: int
    graph: WeightedGraph
    X: FiniteExtMetricSpace
    Y: FiniteExtMetricSpace
    f: MappedPair

    @cached_property
    def tooth_stage(self) -> Dict[int, int]:
        """Tooth position -> stage."""
        return {x: n for n, teeth in enumerate(self.stages, start=1) for x in teeth}

    def tip(self, x: int) -> Point:
        return (x, self.tooth_stage[x])

    def locate_pair(self, sigma: int, n: int) -> Tuple[Point, Point]:
        """
        Tips (x, n) and (x + sigma + 1, n) of consecutive teeth, the first on stage n.

        Within stage n the gaps are 1..n-1; the gap after its last tooth is n and
        leads to stage n + 1, whose first tooth is taller.
        """
        if not 1 <= n <= self.n_max:
            raise DomainError(f"stage {n} is not in the truncation (n_max={self.n_max})")
        gap = sigma + 1
        teeth = self.stages[n - 1]
        if gap <= n - 1:
            return (teeth[gap - 1], n), (teeth[gap], n)
        if gap == n and n < self.n_max:
            return (teeth[-1], n), (teeth[-1] + n, n)
        raise DomainError(f"no consecutive teeth at gap {gap} starting on stage {n}")

    def window(self) -> Window:
        """Everything except the last stage's teeth."""
        last = set(self.stages[-1])
        rows = [i for i, (x, h) in enumerate(self.X.points) if h == 0 or x not in last]
        return Window(np.array(rows), f"comb without stage {self.n_max} teeth")


def comb_points(n_max: int) -> Tuple[List[Point], Tuple[Tuple[int, ...], ...], int]:
    stages, x_final = comb_stages(n_max)
    points = {(x, 0) for x in range(x_final + 1)}
    for n, teeth in enumerate(stages, start=1):
        points.update((x, h) for x in teeth for h in range(1, n + 1))
    return sorted(points), stages, x_final


def comb_graph(n_max: int) -> Tuple[WeightedGraph, Tuple[Tuple[int, ...], ...], int]:
    """Unit edges along the ray and up every tooth."""
    points, stages, x_final = comb_points(n_max)
    builder = GraphBuilder(points)
    for x, h in points:
        if h == 0 and x > 0:
            builder.add_edge((x - 1, 0), (x, 0), 1)
        elif h > 0:
            builder.add_edge((x, h - 1), (x, h), 1)
    return builder.build(), stages, x_final


def comb(n_max: int) -> Comb:
    """The comb truncated after stage n_max."""
    graph, stages, x_final = comb_graph(n_max)
    X = path_metric(graph, name="comb")
    Y = FiniteExtMetricSpace(X.points, l1_metric(np.array(X.points)), name="comb_l1")
    f = MappedPair(X, Y, np.arange(X.size), name="f")
    logger.debug("comb n_max=%d: %d points, ray to %d", n_max, X.size, x_final)
    return Comb(n_max, stages, x_final, graph, X, Y, f)


@dataclass(frozen=True, eq=False)
class CombRetraction:
    """f: comb -> ray, (x, y) -> x, with the section s: x -> (x, 0)."""

    comb: Comb
    ray: FiniteExtMetricSpace
    f: MappedPair
    section: MappedPair


def comb_retraction(n_max: int) -> CombRetraction:
    c = comb(n_max)
    positions = np.arange(c.x_final + 1)
    ray = FiniteExtMetricSpace(
        tuple(int(x) for x in positions),
        np.abs(positions[:, None] - positions[None, :]).astype(np.float64),
        name="ray",
    )
    f = MappedPair.from_mapping(c.X, ray, lambda p: p[0], name="f")
    section = MappedPair.from_mapping(ray, c.X, lambda x: (x, 0), name="s")
    return CombRetraction(c, ray, f, section)


class CombFamily(TruncationFamily):
    """The identity from the comb's path metric to its l1 metric."""

    param_name = "n_max"

    def generate(self, value) -> TruncationInstance:
        c = comb(int(value))
        return TruncationInstance(
            param=value,
            spaces={"X": c.X, "Y": c.Y},
            maps={"f": c.f},
            window=c.window(),
            extra={"comb": c},
        )


class CombRetractionFamily(TruncationFamily):
    """The projection of the comb onto its ray."""

    param_name = "n_max"

    def generate(self, value) -> TruncationInstance:
        retraction = comb_retraction(int(value))
        return TruncationInstance(
            param=value,
            spaces={"X": retraction.comb.X, "ray": retraction.ray},
            maps={"f": retraction.f, "s": retraction.section},
            window=retraction.comb.window(),
            extra={"comb": retraction.comb},
        )
