"""Cubes onto squares: a coarse equivalence that is not a quasi-isometry."""

from dataclasses import dataclass

import numpy as np

from ..core.errors import DomainError
from ..filtration.windows import Window
from ..metric_core.space import FiniteExtMetricSpace, MappedPair
from .family import TruncationFamily, TruncationInstance
from .groups import l1_metric


@dataclass(frozen=True, eq=False)
class CubesSquares:
    N: int
    X: FiniteExtMetricSpace
    Y: FiniteExtMetricSpace
    f: MappedPair


def integer_line(values: np.ndarray, name: str) -> FiniteExtMetricSpace:
    """Integers with the absolute-difference metric."""
    return FiniteExtMetricSpace(tuple(int(v) for v in values), l1_metric(values), name=name)


def cubes_squares(N: int) -> CubesSquares:
    """X = {n^3}, Y = {n^2} for 1 <= n <= N, and f: n^3 -> n^2."""
    if N < 2:
        raise DomainError(f"N must be at least 2, got {N}")
    n = np.arange(1, N + 1, dtype=np.int64)
    X = integer_line(n**3, "cubes")
    Y = integer_line(n**2, "squares")
    return CubesSquares(N, X, Y, MappedPair(X, Y, np.arange(N), name="f"))


class CubesFamily(TruncationFamily):
    param_name = "N"

    def generate(self, value) -> TruncationInstance:
        cs = cubes_squares(int(value))
        return TruncationInstance(
            param=value,
            spaces={"X": cs.X, "Y": cs.Y},
            maps={"f": cs.f},
            window=Window.whole(cs.X),
            extra={"cubes": cs},
        )
