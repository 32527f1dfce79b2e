"""Distances from points to fibers of a map."""

from dataclasses import dataclass

import numpy as np

from .space import MappedPair


@dataclass(frozen=True, eq=False)
class FiberDistances:
    """
    M[x, k] = d_X(x, f^-1(image[k])) for every source point x and image point.

    `image` holds target indices in increasing order; `column` maps a target
    index to its column in M.
    """

    image: np.ndarray
    matrix: np.ndarray

    def column(self, target_index: int) -> int:
        k = int(np.searchsorted(self.image, target_index))
        if k >= self.image.size or self.image[k] != target_index:
            raise KeyError(target_index)
        return k


def fiber_distance_matrix(f: MappedPair) -> FiberDistances:
    """Point-to-fiber distances of f, one min-reduction over the fiber-sorted columns."""
    n = f.source.size
    if n == 0:
        return FiberDistances(image=np.empty(0, dtype=np.int64), matrix=np.empty((0, 0)))
    order = np.argsort(f.assign, kind="stable")
    image, starts = np.unique(f.assign[order], return_index=True)
    matrix = np.minimum.reduceat(f.source.dist[:, order], starts, axis=1)
    matrix.setflags(write=False)
    return FiberDistances(image=image, matrix=matrix)


def preimage_distances(f: MappedPair, fibers: FiberDistances = None) -> np.ndarray:
    """P[k, l] = d_X(f^-1(image[k]), f^-1(image[l])), the set-to-set infimum."""
    fibers = fibers or fiber_distance_matrix(f)
    if f.source.size == 0:
        return np.empty((0, 0))
    order = np.argsort(f.assign, kind="stable")
    _, starts = np.unique(f.assign[order], return_index=True)
    return np.minimum.reduceat(fibers.matrix[order], starts, axis=0)
