"""Reusable hypothesis strategies for finite metric spaces and maps."""

import os
import sys

import numpy as np
from hypothesis import strategies as st

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from coarse_toolkit.metric_core.space import FiniteExtMetricSpace, MappedPair
from coarse_toolkit.gallery.groups import l1_metric


@st.composite
def grid_spaces(draw, min_size: int = 1, max_size: int = 8, side: int = 6, name: str = "X"):
    """Distinct points of a side x side grid with the l1 metric."""
    cells = draw(st.lists(st.integers(0, side * side - 1), min_size=min_size, max_size=max_size, unique=True))
    cells.sort()
    coords = np.array([[c // side, c % side] for c in cells], dtype=np.int64)
    points = tuple((int(a), int(b)) for a, b in coords)
    return FiniteExtMetricSpace(points, l1_metric(coords), name=name)


@st.composite
def maps_between(draw, source, target):
    """Any total map from `source` to `target`."""
    assign = draw(st.lists(st.integers(0, target.size - 1), min_size=source.size, max_size=source.size))
    return MappedPair(source, target, np.array(assign, dtype=np.int64), name="f")


@st.composite
def parallel_maps(draw, max_source: int = 5, max_target: int = 8):
    """Two maps A -> X with a common source and target."""
    A = draw(grid_spaces(max_size=max_source, name="A"))
    X = draw(grid_spaces(max_size=max_target, name="X"))
    return draw(maps_between(A, X)), draw(maps_between(A, X))


@st.composite
def weighted_edge_lists(draw, n: int, max_edges: int = 15, max_weight: int = 9):
    """Edges (u, v, w) on vertices 0..n-1 with positive integer weights."""
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1, max_weight))
    return draw(st.lists(pairs, max_size=max_edges))
