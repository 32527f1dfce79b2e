"""Interior windows of truncated spaces."""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ..metric_core.space import FiniteExtMetricSpace


@dataclass(frozen=True, eq=False)
class Window:
    """
    Source rows on which truncation checks are trusted.

    Attributes:
        indices: Row indices into the source space, increasing.
        description: Human-readable rule that selected them.
    """

    indices: np.ndarray
    description: str = "all points"

    def __post_init__(self):
        indices = np.unique(np.asarray(self.indices, dtype=np.int64))
        indices.setflags(write=False)
        object.__setattr__(self, "indices", indices)

    @property
    def size(self) -> int:
        return int(self.indices.size)

    @classmethod
    def whole(cls, X: FiniteExtMetricSpace) -> "Window":
        return cls(np.arange(X.size), "all points")

    @classmethod
    def of_points(cls, X: FiniteExtMetricSpace, points: Sequence, description: str) -> "Window":
        return cls(X.indices(points), description)

    def to_dict(self) -> Dict[str, Any]:
        return {"description": self.description, "size": self.size}


def resolve_window(X: FiniteExtMetricSpace, window: Optional[Window]) -> Window:
    return window if window is not None else Window.whole(X)
