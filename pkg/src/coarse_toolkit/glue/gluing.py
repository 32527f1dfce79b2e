"""
Coarse gluing, coequaliser spaces and the comparison maps between them.

Every construction here is a weighted graph: the metric skeleton of each
input space contributes internal edges, and each source point a contributes a
unit glued edge between its two images. The result is the path metric.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from ..core.errors import DomainError
from ..graph_metric.weighted_graph import EdgeKind, GraphBuilder, WeightedGraph, path_metric, skeleton_edges
from ..metric_core.controls import AffineWitness, ConstantCheck, check_affine_upper, closeness_distance, lipschitz_constant
from ..metric_core.products import LEFT, RIGHT
from ..metric_core.space import FiniteExtMetricSpace, MappedPair, compose, format_point_id, identity_map, same_space

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GluingResult:
    """X glued to Y along A, with the two 1-Lipschitz inclusions."""

    space: FiniteExtMetricSpace
    graph: WeightedGraph
    left: MappedPair
    right: MappedPair


@dataclass(frozen=True, eq=False)
class CoequaliserResult:
    """Coeq(f, g) with its quotient map q and the closeness of q.f and q.g."""

    space: FiniteExtMetricSpace
    graph: WeightedGraph
    quotient: MappedPair
    closeness: float


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    """The four checks relating the double gluing to Coeq(f, g)."""

    r_lipschitz: ConstantCheck
    s_lipschitz: ConstantCheck
    rs_identity: ConstantCheck
    sr_closeness: ConstantCheck
    double: FiniteExtMetricSpace = field(repr=False, default=None)

    @property
    def checks(self) -> List[ConstantCheck]:
        return [self.r_lipschitz, self.s_lipschitz, self.rs_identity, self.sr_closeness]

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "checks": [check.to_dict() for check in self.checks]}


def _add_internal(builder: GraphBuilder, X: FiniteExtMetricSpace, offset: int) -> None:
    src, dst, weight = skeleton_edges(X)
    builder.add_edges(src + offset, dst + offset, weight, EdgeKind.INTERNAL)


def coarse_glue(f: MappedPair, g: MappedPair) -> GluingResult:
    """
    X glued to Y along f: A -> X and g: A -> Y.

    Vertices are (0, x) and (1, y); each a in A adds a unit edge ((0, fa), (1, ga)).
    """
    if not same_space(f.source, g.source):
        raise DomainError("gluing maps must share their source")
    X, Y = f.target, g.target
    n = X.size
    builder = GraphBuilder([(LEFT, x) for x in X.points] + [(RIGHT, y) for y in Y.points])
    _add_internal(builder, X, 0)
    _add_internal(builder, Y, n)
    builder.add_edges(f.assign, n + g.assign, 1.0, EdgeKind.GLUED)
    graph = builder.build()
    space = path_metric(graph, name=f"{X.name}+{Y.name}")
    logger.debug("glued %d + %d points along %d", X.size, Y.size, f.source.size)
    return GluingResult(
        space=space,
        graph=graph,
        left=MappedPair(X, space, np.arange(n), name="i1"),
        right=MappedPair(Y, space, n + np.arange(Y.size), name="i2"),
    )


def _require_parallel(f: MappedPair, g: MappedPair) -> None:
    if not (same_space(f.source, g.source) and same_space(f.target, g.target)):
        raise DomainError("coequaliser maps must share source and target")


def coeq_space(f: MappedPair, g: MappedPair) -> CoequaliserResult:
    """X glued to itself along unit edges (fa, ga); q is the identity on points."""
    _require_parallel(f, g)
    X = f.target
    builder = GraphBuilder(X.points)
    _add_internal(builder, X, 0)
    builder.add_edges(f.assign, g.assign, 1.0, EdgeKind.GLUED)
    graph = builder.build()
    space = path_metric(graph, name="coeq")
    quotient = MappedPair(X, space, np.arange(X.size), name="q")
    closeness = closeness_distance(compose(f, quotient), compose(g, quotient))
    return CoequaliserResult(space=space, graph=graph, quotient=quotient, closeness=closeness)


def _lipschitz_check(name: str, h: MappedPair, constant: float) -> ConstantCheck:
    check = check_affine_upper(h, AffineWitness(constant, 0.0))
    observed, pair = lipschitz_constant(h)
    return ConstantCheck(
        name=name,
        ok=check.ok,
        claimed=constant,
        observed=observed,
        witness=check.worst_pair if not check.ok else pair,
    )


def double_glue_comparison(f: MappedPair, g: MappedPair) -> ComparisonReport:
    """
    Compare X glued to X along A + X with Coeq(f, g).

    The double gluing lives on X x {0, 1} with unit edges ((x,0),(x,1)) and
    ((fa,0),(ga,1)); r projects to Coeq(f, g) and s is x -> (x, 0). Checks that
    r is 1-Lipschitz, s is 2-Lipschitz, r.s is the identity and s.r is 1-close
    to the identity.
    """
    _require_parallel(f, g)
    X = f.target
    n = X.size
    builder = GraphBuilder([(x, 0) for x in X.points] + [(x, 1) for x in X.points])
    _add_internal(builder, X, 0)
    _add_internal(builder, X, n)
    builder.add_edges(np.arange(n), n + np.arange(n), 1.0, EdgeKind.GLUED)
    builder.add_edges(f.assign, n + g.assign, 1.0, EdgeKind.GLUED)
    double = path_metric(builder.build(), name="double")

    coeq = coeq_space(f, g).space
    r = MappedPair(double, coeq, np.concatenate([np.arange(n), np.arange(n)]), name="r")
    s = MappedPair(coeq, double, np.arange(n), name="s")

    rs = compose(s, r)
    mismatches = np.flatnonzero(rs.assign != np.arange(n))
    rs_check = ConstantCheck(
        name="rs_identity",
        ok=mismatches.size == 0,
        claimed=0.0,
        observed=float(mismatches.size),
        witness=[format_point_id(X.points[mismatches[0]])] if mismatches.size else None,
    )

    sr = compose(r, s)
    identity = identity_map(double)
    gaps = double.dist[sr.assign, identity.assign]
    worst = int(np.argmax(gaps)) if gaps.size else 0
    observed = closeness_distance(sr, identity)
    sr_check = ConstantCheck(
        name="sr_closeness",
        ok=observed <= 1 + double.tolerance,
        claimed=1.0,
        observed=observed,
        witness=[format_point_id(double.points[worst])] if gaps.size else None,
    )

    report = ComparisonReport(
        r_lipschitz=_lipschitz_check("r_lipschitz", r, 1.0),
        s_lipschitz=_lipschitz_check("s_lipschitz", s, 2.0),
        rs_identity=rs_check,
        sr_closeness=sr_check,
        double=double,
    )
    if not report.ok:
        logger.warning("double gluing comparison failed: %s", report.to_dict())
    return report
