"""Truncation families: growing finite spaces standing in for infinite examples."""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Sequence

from ..filtration.windows import Window
from ..metric_core.space import FiniteExtMetricSpace, MappedPair, format_point_id

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TruncationInstance:
    """One member of a family: named spaces and maps plus the trusted window of the main source."""

    param: float
    spaces: Dict[str, FiniteExtMetricSpace]
    maps: Dict[str, MappedPair]
    window: Window
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_bundle(self) -> Dict[str, Any]:
        """Spaces, maps and the interior window (over "X") in pipeline bundle form."""
        names = {id(space): name for name, space in self.spaces.items()}
        X = self.spaces["X"]
        return {
            "spaces": {name: space.to_dict() for name, space in self.spaces.items()},
            "maps": {
                name: f.to_dict(names[id(f.source)], names[id(f.target)])
                for name, f in self.maps.items()
            },
            "windows": {
                "interior": {
                    "space": "X",
                    "points": [format_point_id(X.points[i]) for i in self.window.indices],
                    "description": self.window.description,
                }
            },
        }


class TruncationFamily(ABC):
    """Base class for truncation families indexed by one parameter."""

    param_name: str = "n"

    def __init__(self, values: Sequence[float]):
        """
        Initialize the family.

        Args:
            values: Increasing truncation parameters.
        """
        self.values = tuple(values)

    @abstractmethod
    def generate(self, value) -> TruncationInstance:
        """Build the truncation for one parameter value."""

    def instances(self) -> Iterator[TruncationInstance]:
        for value in self.values:
            logger.debug("%s: generating %s=%s", type(self).__name__, self.param_name, value)
            yield self.generate(value)

    def is_monotone(self, space: str = "X") -> bool:
        """Each truncation's point set contains the previous one."""
        previous: List = []
        for instance in self.instances():
            points = set(instance.spaces[space].points)
            if not set(previous) <= points:
                return False
            previous = list(points)
        return True
