"""
Finite extended metric spaces and maps between them.

Distances are stored as a read-only float64 matrix with `math.inf` as the
infinite distance. When every finite distance is an integer below 2**53 the
space is on the integer path and all comparisons are exact; otherwise they use
the configured absolute tolerance.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, Hashable, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from ..core.config import get_settings
from ..core.documents import (
    MapDocument,
    SpaceDocument,
    check_square,
    decode_distance,
    encode_distance,
    parse_document,
)
from ..core.errors import DomainError, SchemaError

logger = logging.getLogger(__name__)

INF = math.inf
EXACT_LIMIT = 2.0**53

PointId = Hashable


def format_point_id(point: PointId) -> str:
    """Render a point id as the string used in JSON documents and reports."""
    if isinstance(point, str):
        return point
    if isinstance(point, tuple):
        return "(" + ",".join(format_point_id(part) for part in point) + ")"
    if isinstance(point, (np.integer, int)):
        return str(int(point))
    return str(point)


def _validate_matrix(points: Tuple[PointId, ...], dist: np.ndarray) -> None:
    n = len(points)
    if dist.shape != (n, n):
        raise DomainError(f"distance matrix has shape {dist.shape}, expected ({n}, {n})")
    if len(set(points)) != n:
        raise DomainError("point ids must be unique")
    if n == 0:
        return
    if np.isnan(dist).any():
        raise DomainError("distance matrix contains NaN")
    if (dist < 0).any():
        raise DomainError("distances must be nonnegative")
    if np.any(np.diagonal(dist) != 0):
        raise DomainError("dist(p, p) must be 0")
    if not np.array_equal(dist, dist.T):
        i, j = np.argwhere(dist != dist.T)[0]
        raise DomainError(f"asymmetric distance between {points[i]!r} and {points[j]!r}")
    off_diagonal = ~np.eye(n, dtype=bool)
    if (dist[off_diagonal] == 0).any():
        i, j = np.argwhere((dist == 0) & off_diagonal)[0]
        raise DomainError(f"distinct points {points[i]!r} and {points[j]!r} at distance 0")


@dataclass(frozen=True, eq=False)
class FiniteExtMetricSpace:
    """
    A finite set of points with an extended metric.

    Construction checks shape, symmetry, the zero diagonal and identity of
    indiscernibles. The triangle inequality is cubic to verify and is left to
    `check_metric`.
    """

    points: Tuple[PointId, ...]
    dist: np.ndarray
    labels: Mapping[PointId, str] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        points = tuple(self.points)
        dist = np.array(self.dist, dtype=np.float64, copy=True)
        if not points:
            dist = dist.reshape(0, 0)
        _validate_matrix(points, dist)
        dist.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "labels", dict(self.labels))

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def index(self) -> Dict[PointId, int]:
        """Point id -> row index."""
        return {point: i for i, point in enumerate(self.points)}

    @cached_property
    def integral(self) -> bool:
        """True when every finite distance is an exactly representable integer."""
        finite = self.dist[np.isfinite(self.dist)]
        return bool(np.all(finite == np.round(finite)) and np.all(finite < EXACT_LIMIT))

    @property
    def tolerance(self) -> float:
        """Comparison slack: 0 on the integer path, the configured tolerance otherwise."""
        return 0.0 if self.integral else get_settings().tolerance

    def indices(self, points: Iterable[PointId]) -> np.ndarray:
        """Row indices of `points`; unknown points raise DomainError."""
        try:
            return np.array([self.index[p] for p in points], dtype=np.int64)
        except KeyError as exc:
            raise DomainError(f"unknown point {exc.args[0]!r}") from exc

    def distance(self, p: PointId, q: PointId) -> float:
        i, j = self.indices([p, q])
        return float(self.dist[i, j])

    def realized_distances(self) -> np.ndarray:
        """Sorted distinct finite positive distances."""
        if self.size < 2:
            return np.empty(0)
        upper = self.dist[np.triu_indices(self.size, 1)]
        return np.unique(upper[np.isfinite(upper)])

    @cached_property
    def skeleton_pairs(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Pairs (u, v), u < v, at finite distance not realized by a two-step detour.

        A pair is dropped when d(u,w) + d(w,v) <= d(u,v) for some third point w.
        Dropped pairs are joined by strictly shorter pairs, so the kept ones
        determine the whole metric.
        """
        D = self.dist
        n = self.size
        tol = self.tolerance
        src, dst = [np.empty(0, dtype=np.int64)], [np.empty(0, dtype=np.int64)]
        for u in range(n - 1):
            via = D[u][:, None] + D
            via[u, :] = INF
            np.fill_diagonal(via, INF)
            best = via.min(axis=0)
            keep = np.isfinite(D[u]) & (best > D[u] + tol)
            keep[: u + 1] = False
            v = np.flatnonzero(keep)
            src.append(np.full(v.size, u, dtype=np.int64))
            dst.append(v)
        src_all, dst_all = np.concatenate(src), np.concatenate(dst)
        weight = D[src_all, dst_all]
        for array in (src_all, dst_all, weight):
            array.setflags(write=False)
        return src_all, dst_all, weight

    @property
    def diameter(self) -> float:
        """Largest finite distance (0 for spaces with fewer than two points)."""
        realized = self.realized_distances()
        return float(realized[-1]) if realized.size else 0.0

    def label(self, point: PointId) -> str:
        return self.labels.get(point, format_point_id(point))

    def to_dict(self) -> Dict[str, Any]:
        """Convert the space to its JSON document form."""
        integral = self.integral
        data: Dict[str, Any] = {
            "points": [format_point_id(p) for p in self.points],
            "dist": [[encode_distance(v, integral) for v in row] for row in self.dist.tolist()],
        }
        if self.labels:
            data["labels"] = {format_point_id(p): text for p, text in self.labels.items()}
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], name: str = "") -> "FiniteExtMetricSpace":
        """Create a space from its JSON document form; ids become strings."""
        doc = parse_document(SpaceDocument, data)
        check_square(doc)
        dist = np.array([[decode_distance(v) for v in row] for row in doc.dist], dtype=np.float64)
        try:
            return cls(points=tuple(doc.points), dist=dist, labels=doc.labels, name=name)
        except DomainError as exc:
            raise SchemaError(str(exc), "/dist") from exc

    def to_json(self) -> str:
        """Convert the space to a JSON string."""
        return json.dumps(self.to_dict())


def same_space(X: FiniteExtMetricSpace, Y: FiniteExtMetricSpace) -> bool:
    """True when X and Y have the same points in the same order and equal distances."""
    return X is Y or (X.points == Y.points and np.array_equal(X.dist, Y.dist))


@dataclass(frozen=True, eq=False)
class MappedPair:
    """
    A total map between two finite spaces, stored as target row indices.

    Preimages and the matrix of image distances are derived on first use.
    """

    source: FiniteExtMetricSpace
    target: FiniteExtMetricSpace
    assign: np.ndarray
    name: str = ""

    def __post_init__(self):
        assign = np.array(self.assign, dtype=np.int64, copy=True).reshape(-1)
        if assign.size != self.source.size:
            raise DomainError(
                f"map assigns {assign.size} points but the source has {self.source.size}"
            )
        if assign.size and (assign.min() < 0 or assign.max() >= self.target.size):
            raise DomainError("map assigns a point outside the target")
        assign.setflags(write=False)
        object.__setattr__(self, "assign", assign)

    @classmethod
    def from_mapping(
        cls,
        source: FiniteExtMetricSpace,
        target: FiniteExtMetricSpace,
        mapping: Union[Mapping[PointId, PointId], Callable[[PointId], PointId]],
        name: str = "",
    ) -> "MappedPair":
        """Build a map from a point-id mapping or a function on point ids."""
        lookup = mapping if callable(mapping) else mapping.__getitem__
        try:
            images = [lookup(p) for p in source.points]
        except KeyError as exc:
            raise DomainError(f"map is not total: no image for {exc.args[0]!r}") from exc
        return cls(source, target, target.indices(images), name=name)

    def __call__(self, point: PointId) -> PointId:
        return self.target.points[self.assign[self.source.index[point]]]

    @cached_property
    def image_indices(self) -> np.ndarray:
        """Sorted target indices of the image."""
        return np.unique(self.assign)

    @cached_property
    def preimages(self) -> Dict[int, np.ndarray]:
        """Target index -> source indices mapped onto it (image points only)."""
        order = np.argsort(self.assign, kind="stable")
        targets, starts = np.unique(self.assign[order], return_index=True)
        groups = np.split(order, starts[1:]) if order.size else []
        return {int(t): group for t, group in zip(targets, groups)}

    @cached_property
    def image_distances(self) -> np.ndarray:
        """d_Y(fx, fx') for every source pair."""
        out = self.target.dist[np.ix_(self.assign, self.assign)]
        out.setflags(write=False)
        return out

    @property
    def tolerance(self) -> float:
        if self.source.integral and self.target.integral:
            return 0.0
        return get_settings().tolerance

    def to_dict(self, source_name: str = "X", target_name: str = "Y") -> Dict[str, Any]:
        """Convert the map to its JSON document form."""
        return {
            "source": source_name,
            "target": target_name,
            "assign": {
                format_point_id(p): format_point_id(self.target.points[t])
                for p, t in zip(self.source.points, self.assign.tolist())
            },
        }

    @classmethod
    def from_dict(
        cls,
        data: Dict[str, Any],
        spaces: Mapping[str, FiniteExtMetricSpace],
    ) -> "MappedPair":
        """Create a map from its JSON form, resolving space names in `spaces`."""
        doc = parse_document(MapDocument, data)
        for key in ("source", "target"):
            if getattr(doc, key) not in spaces:
                raise SchemaError(f"unknown space {getattr(doc, key)!r}", f"/{key}")
        source, target = spaces[doc.source], spaces[doc.target]
        missing = [p for p in source.points if p not in doc.assign]
        if missing:
            raise SchemaError(f"no image for {missing[0]!r}", "/assign")
        for p, q in doc.assign.items():
            if q not in target.index:
                raise SchemaError(f"unknown target point {q!r}", f"/assign/{p}")
        return cls.from_mapping(source, target, doc.assign)

    def to_json(self, source_name: str = "X", target_name: str = "Y") -> str:
        return json.dumps(self.to_dict(source_name, target_name))


def restrict(X: FiniteExtMetricSpace, points: Sequence[PointId], name: str = "") -> FiniteExtMetricSpace:
    """The induced subspace on `points`, in the given order."""
    idx = X.indices(points)
    return restrict_indices(X, idx, name=name)


def restrict_indices(X: FiniteExtMetricSpace, idx: np.ndarray, name: str = "") -> FiniteExtMetricSpace:
    """The induced subspace on the rows `idx`."""
    idx = np.asarray(idx, dtype=np.int64)
    labels = {X.points[i]: X.labels[X.points[i]] for i in idx if X.points[i] in X.labels}
    return FiniteExtMetricSpace(
        points=tuple(X.points[i] for i in idx),
        dist=X.dist[np.ix_(idx, idx)],
        labels=labels,
        name=name or X.name,
    )


def inclusion(sub: FiniteExtMetricSpace, X: FiniteExtMetricSpace, name: str = "") -> MappedPair:
    """The inclusion of a subspace (by point ids) into X."""
    return MappedPair(sub, X, X.indices(sub.points), name=name or "inclusion")


def identity_map(X: FiniteExtMetricSpace) -> MappedPair:
    return MappedPair(X, X, np.arange(X.size), name="id")


def compose(f: MappedPair, g: MappedPair) -> MappedPair:
    """g after f."""
    if not same_space(f.target, g.source):
        raise DomainError("cannot compose: target of the first map is not the source of the second")
    name = f"{g.name}.{f.name}" if f.name and g.name else ""
    return MappedPair(f.source, g.target, g.assign[f.assign], name=name)


def retarget(f: MappedPair, target: FiniteExtMetricSpace) -> MappedPair:
    """Same assignment into a remetrised copy of f's target."""
    if target.points != f.target.points:
        raise DomainError("retarget needs the same target point set")
    return MappedPair(f.source, target, f.assign, name=f.name)


def upper_pairs(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Index arrays of the unordered pairs i < j."""
    return np.triu_indices(n, 1)


def pair_ids(X: FiniteExtMetricSpace, i: int, j: int) -> List[str]:
    return [format_point_id(X.points[i]), format_point_id(X.points[j])]
