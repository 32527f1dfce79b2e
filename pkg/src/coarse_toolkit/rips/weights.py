"""
Weight functions for augmented Rips graphs.

A weight function is increasing with values in [1, inf). Its doubling
certificate (r, C) records Theta(t + 2r) <= C * Theta(t) on a realized grid.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.documents import json_number
from ..core.errors import DomainError, PreconditionError

ArrayLike = Union[float, np.ndarray]


class ThetaKind(str, Enum):
    EXP2 = "exp2"
    ONE = "one"
    LINEAR_PLUS = "linear"
    TABLE = "table"


@dataclass(frozen=True)
class DoublingCertificate:
    """Theta(t + 2r) <= C * Theta(t) for every t of `grid_size` grid points."""

    r: float
    C: float
    grid_size: int
    worst_t: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": json_number(self.r),
            "C": json_number(self.C),
            "grid_size": self.grid_size,
            "worst_t": None if self.worst_t is None else json_number(self.worst_t),
        }


@dataclass(frozen=True)
class WeightFunction:
    """Theta: one of the built-in kinds or a table over realized distances."""

    kind: ThetaKind
    table: Tuple[Tuple[float, float], ...] = ()
    certificate: Optional[DoublingCertificate] = None

    def __post_init__(self):
        if self.kind is ThetaKind.TABLE:
            if not self.table:
                raise DomainError("a table weight function needs at least one entry")
            keys = [t for t, _ in self.table]
            values = [v for _, v in self.table]
            if any(b <= a for a, b in zip(keys, keys[1:])):
                raise DomainError("table keys must be increasing")
            if any(v < 1 for v in values) or any(b < a for a, b in zip(values, values[1:])):
                raise DomainError("table values must be nondecreasing and at least 1")

    @classmethod
    def exp2(cls) -> "WeightFunction":
        return cls(ThetaKind.EXP2)

    @classmethod
    def one(cls) -> "WeightFunction":
        return cls(ThetaKind.ONE)

    @classmethod
    def linear_plus(cls) -> "WeightFunction":
        return cls(ThetaKind.LINEAR_PLUS)

    @classmethod
    def from_table(cls, values: Mapping[float, float]) -> "WeightFunction":
        return cls(ThetaKind.TABLE, tuple(sorted((float(t), float(v)) for t, v in values.items())))

    @classmethod
    def from_name(cls, name: str) -> "WeightFunction":
        try:
            kind = ThetaKind(name)
        except ValueError as exc:
            raise DomainError(f"unknown weight function {name!r}") from exc
        if kind is ThetaKind.TABLE:
            raise DomainError("table weight functions need explicit values")
        return cls(kind)

    def values(self, t: ArrayLike) -> np.ndarray:
        """Theta applied elementwise; EXP2 overflows to INF."""
        t = np.asarray(t, dtype=np.float64)
        if self.kind is ThetaKind.EXP2:
            with np.errstate(over="ignore"):
                return np.exp2(t)
        if self.kind is ThetaKind.ONE:
            return np.ones_like(t)
        if self.kind is ThetaKind.LINEAR_PLUS:
            return t + 1.0
        keys = np.array([k for k, _ in self.table])
        vals = np.array([v for _, v in self.table])
        pos = np.searchsorted(keys, t)
        pos_clipped = np.minimum(pos, keys.size - 1)
        hit = (pos < keys.size) & (keys[pos_clipped] == t)
        if not np.all(hit):
            missing = t[~hit].reshape(-1)[0]
            raise PreconditionError(f"weight table has no value at t={missing}")
        return vals[pos_clipped]

    def __call__(self, t: float) -> float:
        return float(self.values(t))

    def defined_at(self, t: float) -> bool:
        if self.kind is not ThetaKind.TABLE:
            return True
        return any(k == t for k, _ in self.table)

    def is_weight_function_on(self, grid: Sequence[float]) -> bool:
        """Values at least 1 and nondecreasing over the grid."""
        grid = [t for t in sorted(grid) if self.defined_at(t)]
        values = self.values(np.array(grid))
        return bool(np.all(values >= 1) and np.all(np.diff(values) >= 0))

    def dominates_identity(self, grid: Sequence[float]) -> bool:
        """t <= Theta(t) at every grid point."""
        grid = np.array([t for t in grid if self.defined_at(t)], dtype=np.float64)
        return bool(np.all(grid <= self.values(grid)))

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value}
        if self.table:
            data["table"] = [[json_number(t), json_number(v)] for t, v in self.table]
        if self.certificate:
            data["certificate"] = self.certificate.to_dict()
        return data


def doubling_certificate(theta: WeightFunction, r: float, grid: Sequence[float]) -> DoublingCertificate:
    """
    Least C with Theta(t + 2r) <= C * Theta(t) over the grid.

    Table weights skip grid points where Theta(t + 2r) is undefined.
    """
    if not r >= 0 or not np.isfinite(r):
        raise PreconditionError(f"doubling certificate needs a finite r >= 0, got {r}")
    ts = np.array(
        sorted({float(t) for t in grid} | {0.0}),
        dtype=np.float64,
    )
    ts = ts[[theta.defined_at(t) and theta.defined_at(t + 2 * r) for t in ts]]
    if ts.size == 0:
        return DoublingCertificate(r=r, C=1.0, grid_size=0)
    with np.errstate(over="ignore", invalid="ignore"):
        ratios = theta.values(ts + 2 * r) / theta.values(ts)
    ratios = np.where(np.isnan(ratios), 1.0, ratios)
    k = int(np.argmax(ratios))
    return DoublingCertificate(r=r, C=float(ratios[k]), grid_size=int(ts.size), worst_t=float(ts[k]))
