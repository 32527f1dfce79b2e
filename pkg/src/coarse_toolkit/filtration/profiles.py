"""
Stability profiles of the kernel and quotient filtrations.

For sigma <= tau on a grid, the inclusion density n(sigma, tau) is the least n
with K_tau inside the l-infinity n-neighbourhood of K_sigma, and the bonding
distortion r(sigma, tau) is the largest d_{Q_sigma} over pairs with
d_{Q_tau} <= 1. Both are restricted to pairs inside a window; witnesses for
the kernel range over the whole truncation.
"""

import csv
import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, TextIO, Tuple

import numpy as np

from ..core.config import get_settings
from ..core.documents import json_number
from ..core.errors import DomainError
from ..metric_core.fibers import FiberDistances, fiber_distance_matrix
from ..metric_core.space import INF, MappedPair, format_point_id
from .sublevels import quotient_space
from .windows import Window, resolve_window

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["sigma", "tau", "record_kind", "value", "window_size", "truncation_param"]
PAIR_CHUNK = 1 << 22


class RecordKind(str, Enum):
    INCLUSION_DENSITY = "inclusion_density"
    BONDING_DISTORTION = "bonding_distortion"


@dataclass(frozen=True)
class ProfileRecord:
    sigma: float
    tau: float
    value: float
    witness: Optional[List[str]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sigma": json_number(self.sigma),
            "tau": json_number(self.tau),
            "value": json_number(self.value),
            "witness_pair": self.witness,
        }


@dataclass(frozen=True)
class FiltrationProfile:
    """Per-(sigma, tau) records of one kind over a grid, valid on a window."""

    kind: RecordKind
    sigma_grid: Tuple[float, ...]
    records: Tuple[ProfileRecord, ...]
    window: str
    window_size: int
    truncation_param: Optional[float] = None

    def value(self, sigma: float, tau: float) -> float:
        for record in self.records:
            if record.sigma == sigma and record.tau == tau:
                return record.value
        raise KeyError((sigma, tau))

    def record(self, sigma: float, tau: float) -> ProfileRecord:
        for record in self.records:
            if record.sigma == sigma and record.tau == tau:
                return record
        raise KeyError((sigma, tau))

    def monotonicity_violations(self) -> List[Tuple[float, float]]:
        """Grid cells breaking "nonincreasing in sigma, nondecreasing in tau"."""
        grid = self.sigma_grid
        bad = []
        for i, sigma in enumerate(grid):
            for j in range(i, len(grid)):
                tau = grid[j]
                v = self.value(sigma, tau)
                if j + 1 < len(grid) and self.value(sigma, grid[j + 1]) < v:
                    bad.append((sigma, tau))
                if i + 1 <= j and self.value(grid[i + 1], tau) > v:
                    bad.append((sigma, tau))
        return bad

    def csv_rows(self) -> List[List[Any]]:
        return [
            [
                json_number(r.sigma),
                json_number(r.tau),
                self.kind.value,
                json_number(r.value),
                self.window_size,
                "" if self.truncation_param is None else json_number(self.truncation_param),
            ]
            for r in self.records
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "sigma_grid": [json_number(s) for s in self.sigma_grid],
            "window": self.window,
            "window_size": self.window_size,
            "truncation_param": None if self.truncation_param is None else json_number(self.truncation_param),
            "records": [r.to_dict() for r in self.records],
        }


def write_profiles_csv(profiles: Iterable[FiltrationProfile], stream: TextIO) -> None:
    """Write profiles as CSV with the standard columns."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for profile in profiles:
        writer.writerows(profile.csv_rows())


def default_sigma_grid(f: MappedPair, cap: Optional[float] = None) -> Tuple[float, ...]:
    """0 and the realized distances of the target up to `cap` (settings.sigma_cap by default)."""
    cap = get_settings().sigma_cap if cap is None else cap
    realized = f.target.realized_distances()
    return (0.0,) + tuple(float(s) for s in realized[realized <= cap])


def _check_grid(sigma_grid: Sequence[float]) -> Tuple[float, ...]:
    grid = tuple(float(s) for s in sigma_grid)
    if not grid:
        raise DomainError("sigma grid must be nonempty")
    if any(s < 0 for s in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError(f"sigma grid must be increasing and nonnegative, got {grid}")
    return grid


def _finish(profile: FiltrationProfile) -> FiltrationProfile:
    bad = profile.monotonicity_violations()
    if bad:
        warnings.warn(f"{profile.kind.value} profile is not monotone at {bad}")
    return profile


def witness_matrix(fibers: FiberDistances, f: MappedPair, sigma: float) -> np.ndarray:
    """W[x, p] = min over image points q within sigma of p of d_X(x, f^-1(q))."""
    image = fibers.image
    near = f.target.dist[np.ix_(image, image)] <= sigma + f.tolerance
    M = fibers.matrix
    W = np.empty_like(M)
    for p in range(image.size):
        W[:, p] = M[:, near[p]].min(axis=1)
    return W


def _distances_to_kernel(M: np.ndarray, W: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """l-infinity distance from each pair (xs[k], ys[k]) to K_sigma, given W for sigma."""
    out = np.empty(xs.size)
    chunk = max(1, PAIR_CHUNK // max(M.shape[1], 1))
    for start in range(0, xs.size, chunk):
        part = slice(start, start + chunk)
        out[part] = np.maximum(M[xs[part]], W[ys[part]]).min(axis=1)
    return out


def pair_witness_distance(f: MappedPair, sigma: float, pairs: Sequence[Tuple[Any, Any]]) -> np.ndarray:
    """l-infinity distance from each given pair of source points to K_sigma(f)."""
    fibers = fiber_distance_matrix(f)
    W = witness_matrix(fibers, f, sigma)
    xs = f.source.indices([p for p, _ in pairs])
    ys = f.source.indices([q for _, q in pairs])
    return _distances_to_kernel(fibers.matrix, W, xs, ys)


def kernel_stability_profile(
    f: MappedPair,
    sigma_grid: Sequence[float],
    window: Optional[Window] = None,
    truncation_param: Optional[float] = None,
) -> FiltrationProfile:
    """Inclusion densities n(sigma, tau) for every sigma <= tau on the grid."""
    grid = _check_grid(sigma_grid)
    window = resolve_window(f.source, window)
    idx = window.indices
    fibers = fiber_distance_matrix(f)
    witnesses = {sigma: witness_matrix(fibers, f, sigma) for sigma in grid} if idx.size else {}
    local = f.image_distances[np.ix_(idx, idx)]

    records = []
    for j, tau in enumerate(grid):
        a, b = np.nonzero(local <= tau + f.tolerance)
        xs, ys = idx[a], idx[b]
        for sigma in grid[: j + 1]:
            if xs.size == 0:
                records.append(ProfileRecord(sigma, tau, 0.0))
                continue
            dist = _distances_to_kernel(fibers.matrix, witnesses[sigma], xs, ys)
            k = int(np.argmax(dist))
            witness = [format_point_id(f.source.points[xs[k]]), format_point_id(f.source.points[ys[k]])]
            records.append(ProfileRecord(sigma, tau, float(dist[k]), witness if dist[k] > 0 else None))
        logger.debug("kernel profile: tau=%g, %d window pairs", tau, xs.size)
    return _finish(
        FiltrationProfile(
            kind=RecordKind.INCLUSION_DENSITY,
            sigma_grid=grid,
            records=tuple(records),
            window=window.description,
            window_size=window.size,
            truncation_param=truncation_param,
        )
    )


def quotient_stability_profile(
    f: MappedPair,
    sigma_grid: Sequence[float],
    window: Optional[Window] = None,
    truncation_param: Optional[float] = None,
) -> FiltrationProfile:
    """Bonding distortions r(sigma, tau) for every sigma <= tau on the grid."""
    grid = _check_grid(sigma_grid)
    window = resolve_window(f.source, window)
    idx = window.indices
    local = {sigma: quotient_space(f, sigma).space.dist[np.ix_(idx, idx)] for sigma in grid}

    records = []
    for j, tau in enumerate(grid):
        close = local[tau] <= 1 + f.tolerance
        for sigma in grid[: j + 1]:
            values = np.where(close, local[sigma], -INF)
            if values.size == 0:
                records.append(ProfileRecord(sigma, tau, 0.0))
                continue
            a, b = np.unravel_index(int(np.argmax(values)), values.shape)
            value = float(values[a, b])
            witness = [format_point_id(f.source.points[idx[a]]), format_point_id(f.source.points[idx[b]])]
            records.append(ProfileRecord(sigma, tau, value, witness if value > 0 else None))
    return _finish(
        FiltrationProfile(
            kind=RecordKind.BONDING_DISTORTION,
            sigma_grid=grid,
            records=tuple(records),
            window=window.description,
            window_size=window.size,
            truncation_param=truncation_param,
        )
    )


@dataclass(frozen=True)
class TrendReport:
    """Least-squares growth of a profile record across a truncation family."""

    params: Tuple[float, ...]
    values: Tuple[float, ...]
    slope: float
    intercept: float
    threshold: float
    verdict: str = field(default="bounded")

    @property
    def growing(self) -> bool:
        return self.verdict == "growing"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": [json_number(p) for p in self.params],
            "values": [json_number(v) for v in self.values],
            "slope": json_number(self.slope),
            "intercept": json_number(self.intercept),
            "threshold": json_number(self.threshold),
            "verdict": self.verdict,
        }


def stabilisation_trend(values_by_param: Mapping[float, float], threshold: Optional[float] = None) -> TrendReport:
    """
    Fit value ~ slope * param + intercept.

    The verdict is "bounded" when the slope is at most `threshold`, "growing"
    otherwise; any infinite value counts as growing.
    """
    if len(values_by_param) < 2:
        raise DomainError("a trend needs at least two truncations")
    threshold = get_settings().trend_threshold if threshold is None else threshold
    params = tuple(sorted(float(p) for p in values_by_param))
    values = tuple(float(values_by_param[p]) for p in sorted(values_by_param))
    if not all(np.isfinite(values)):
        return TrendReport(params, values, INF, INF, threshold, "growing")
    slope, intercept = np.polyfit(np.array(params), np.array(values), 1)
    verdict = "growing" if slope > threshold else "bounded"
    return TrendReport(params, values, float(slope), float(intercept), threshold, verdict)
