"""
Finitely generated groups through their word-metric balls.

The Heisenberg group is stored as integer triples with
(x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y').
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from ..core.errors import DomainError
from ..filtration.windows import Window
from ..graph_metric.weighted_graph import GraphBuilder, WeightedGraph
from ..metric_core.space import FiniteExtMetricSpace, MappedPair
from .family import TruncationFamily, TruncationInstance

logger = logging.getLogger(__name__)

Element = Tuple[int, int, int]

IDENTITY: Element = (0, 0, 0)
GENERATORS: Tuple[Element, ...] = (
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
)


def multiply(g: Element, h: Element) -> Element:
    return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])


def inverse(g: Element) -> Element:
    return (-g[0], -g[1], -g[2] + g[0] * g[1])


def commutator(g: Element, h: Element) -> Element:
    """g h g^-1 h^-1."""
    return multiply(multiply(multiply(g, h), inverse(g)), inverse(h))


def word_lengths(radius: int) -> Dict[Element, int]:
    """Breadth-first word lengths of every element of length at most `radius`."""
    if radius < 0:
        raise DomainError(f"radius must be non-negative, got {radius}")
    lengths = {IDENTITY: 0}
    frontier = deque([IDENTITY])
    while frontier:
        g = frontier.popleft()
        step = lengths[g] + 1
        if step > radius:
            continue
        for s in GENERATORS:
            h = multiply(g, s)
            if h not in lengths:
                lengths[h] = step
                frontier.append(h)
    return lengths


def enumerate_words_ball(radius: int) -> Set[Element]:
    """Every product of at most `radius` generators, by brute force over words."""
    ball = {IDENTITY}
    for length in range(1, radius + 1):
        for word in itertools.product(GENERATORS, repeat=length):
            g = IDENTITY
            for s in word:
                g = multiply(g, s)
            ball.add(g)
    return ball


def ball_sizes(max_radius: int) -> Dict[int, int]:
    """|B(R)| for R = 0..max_radius."""
    counts = np.bincount(list(word_lengths(max_radius).values()), minlength=max_radius + 1)
    return {radius: int(total) for radius, total in enumerate(np.cumsum(counts))}


class LengthTable:
    """Word lengths of B(radius) as a dense lookup over (x, y, z) offsets."""

    def __init__(self, radius: int):
        lengths = word_lengths(radius)
        keys = np.array(list(lengths), dtype=np.int64)
        self.radius = radius
        self.low = keys.min(axis=0)
        shape = keys.max(axis=0) - self.low + 1
        self.table = np.full(tuple(shape), -1, dtype=np.int64)
        shifted = keys - self.low
        self.table[shifted[:, 0], shifted[:, 1], shifted[:, 2]] = list(lengths.values())

    def lookup(self, dx: np.ndarray, dy: np.ndarray, dz: np.ndarray) -> np.ndarray:
        values = self.table[dx - self.low[0], dy - self.low[1], dz - self.low[2]]
        if (values < 0).any():
            raise DomainError(f"offset outside the length table of radius {self.radius}")
        return values


@dataclass(frozen=True, eq=False)
class HeisenbergBall:
    """The ball B(R) of H, the l1 ball of Z^2 of the same radius and the projection f."""

    R: int
    E: FiniteExtMetricSpace
    G: FiniteExtMetricSpace
    f: MappedPair
    lengths: np.ndarray

    def interior(self, radius: int) -> Window:
        return Window(np.flatnonzero(self.lengths <= radius), f"B({radius}) inside B({self.R})")


def heisenberg(R: int) -> HeisenbergBall:
    """
    B(R) with its word metric.

    Distances d(g, h) = |g^-1 h| come from a length table of radius 2R, where
    g^-1 h = (x' - x, y' - y, z' - z - x (y' - y)).
    """
    if R < 1:
        raise DomainError(f"R must be at least 1, got {R}")
    table = LengthTable(2 * R)
    ball = sorted(g for g in word_lengths(R))
    P = np.array(ball, dtype=np.int64)
    dx = P[None, :, 0] - P[:, None, 0]
    dy = P[None, :, 1] - P[:, None, 1]
    dz = P[None, :, 2] - P[:, None, 2] - P[:, None, 0] * dy
    E = FiniteExtMetricSpace(tuple(ball), table.lookup(dx, dy, dz), name="heisenberg")
    G = lattice_ball(2, R, name="z2")
    f = MappedPair.from_mapping(E, G, lambda g: g[:2], name="f")
    lengths = table.lookup(P[:, 0], P[:, 1], P[:, 2])
    logger.debug("heisenberg R=%d: %d elements", R, E.size)
    return HeisenbergBall(R, E, G, f, lengths)


def heisenberg_cayley_ball(R: int) -> WeightedGraph:
    """
    Cayley graph of H for a, b and every nonzero power of z, restricted to B(R).

    Powers of z join all elements of B(R) with the same (x, y).
    """
    ball = sorted(word_lengths(R))
    members = set(ball)
    builder = GraphBuilder(ball)
    for g in ball:
        for s in ((1, 0, 0), (0, 1, 0)):
            h = multiply(g, s)
            if h in members:
                builder.add_edge(g, h, 1)
    for _, coset in itertools.groupby(ball, key=lambda g: g[:2]):
        for g, h in itertools.combinations(list(coset), 2):
            builder.add_edge(g, h, 1)
    return builder.build()


def l1_metric(coords: np.ndarray) -> np.ndarray:
    """Pairwise l1 distances of integer coordinate rows."""
    coords = np.asarray(coords, dtype=np.int64)
    if coords.ndim == 1:
        coords = coords[:, None]
    return np.abs(coords[:, None, :] - coords[None, :, :]).sum(axis=-1).astype(np.float64)


def lattice_points(k: int, N: int) -> np.ndarray:
    """Lexicographically ordered points of Z^k with l1 norm at most N."""
    if k < 1 or N < 0:
        raise DomainError(f"need k >= 1 and N >= 0, got k={k}, N={N}")
    grid = np.array(list(itertools.product(range(-N, N + 1), repeat=k)), dtype=np.int64)
    return grid[np.abs(grid).sum(axis=1) <= N]


def lattice_ball(k: int, N: int, name: str = "") -> FiniteExtMetricSpace:
    """The word-metric ball of radius N in Z^k."""
    coords = lattice_points(k, N)
    points = tuple(tuple(int(c) for c in row) for row in coords)
    return FiniteExtMetricSpace(points, l1_metric(coords), name=name or f"z{k}")


def octahedral_size(R: int) -> int:
    """|B(R)| in Z^3."""
    return (2 * R + 1) * (2 * R * R + 2 * R + 3) // 3


def ball_growth(sizes: Mapping[int, int], radii: Optional[Iterable[int]] = None) -> float:
    """Least-squares slope of log |B(R)| against log R."""
    chosen = sorted(radii) if radii is not None else sorted(r for r in sizes if r > 0)
    if len(chosen) < 2:
        raise DomainError("growth exponent needs at least two radii")
    if any(r <= 0 for r in chosen):
        raise DomainError("growth radii must be positive")
    slope, _ = np.polyfit(np.log(chosen), np.log([sizes[r] for r in chosen]), 1)
    return float(slope)


@dataclass(frozen=True, eq=False)
class LatticeQuotient:
    """Coordinate projection from the Z^k ball onto the Z^m ball of the same radius."""

    k: int
    m: int
    N: int
    X: FiniteExtMetricSpace
    Y: FiniteExtMetricSpace
    f: MappedPair

    def zhang_window(self, epsilon: float) -> Window:
        norms = np.abs(np.array(self.X.points)).sum(axis=1)
        return Window(np.flatnonzero(norms <= self.N - epsilon), f"|x|_1 <= {self.N} - {epsilon:g}")


def lattice_quotient(k: int, m: int, N: int) -> LatticeQuotient:
    if not 1 <= m <= k or N < 1:
        raise DomainError(f"need 1 <= m <= k and N >= 1, got k={k}, m={m}, N={N}")
    X = lattice_ball(k, N, name=f"z{k}")
    Y = lattice_ball(m, N, name=f"z{m}")
    f = MappedPair.from_mapping(X, Y, lambda p: p[:m], name="f")
    return LatticeQuotient(k, m, N, X, Y, f)


class HeisenbergFamily(TruncationFamily):
    """Projections H -> Z^2 on growing balls; the window keeps B(R - interior_margin)."""

    param_name = "R"

    def __init__(self, values: Sequence[int], interior_margin: int = 0):
        super().__init__(values)
        self.interior_margin = interior_margin

    def generate(self, value) -> TruncationInstance:
        ball = heisenberg(int(value))
        return TruncationInstance(
            param=value,
            spaces={"X": ball.E, "Y": ball.G},
            maps={"f": ball.f},
            window=ball.interior(max(int(value) - self.interior_margin, 0)),
            extra={"ball": ball},
        )


class LatticeQuotientFamily(TruncationFamily):
    param_name = "N"

    def __init__(self, values: Sequence[int], k: int = 2, m: int = 1):
        super().__init__(values)
        self.k = k
        self.m = m

    def generate(self, value) -> TruncationInstance:
        quotient = lattice_quotient(self.k, self.m, int(value))
        return TruncationInstance(
            param=value,
            spaces={"X": quotient.X, "Y": quotient.Y},
            maps={"f": quotient.f},
            window=Window.whole(quotient.X),
            extra={"quotient": quotient},
        )
