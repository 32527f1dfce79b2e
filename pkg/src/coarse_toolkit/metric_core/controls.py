"""
Closeness, control profiles and affine controls of maps.

All profiles are taken over realized distances only: on a finite space a
control function is determined by its values at the distances that occur.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.documents import json_number
from ..core.errors import DomainError
from .space import INF, MappedPair, pair_ids, same_space, upper_pairs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AffineWitness:
    """Slope and offset of an affine control t -> a*t + b."""

    a: float
    b: float = 0.0

    def __post_init__(self):
        if not (self.a >= 0 and self.b >= 0):
            raise DomainError(f"affine witness needs a >= 0 and b >= 0, got ({self.a}, {self.b})")

    def __call__(self, t):
        return self.a * t + self.b

    def to_dict(self) -> Dict[str, Any]:
        return {"a": json_number(self.a), "b": json_number(self.b)}


@dataclass(frozen=True)
class ControlProfile:
    """Realized-grid upper and lower control envelopes of a map."""

    upper: Tuple[Tuple[float, float], ...]
    lower: Tuple[Tuple[float, float], ...]
    surjectivity_radius: float

    def upper_at(self, t: float) -> float:
        """Envelope value at the largest grid point <= t."""
        return _envelope_at(self.upper, t)

    @property
    def has_lower_control(self) -> bool:
        """Every realized image distance bounds the source distance."""
        return all(np.isfinite(s) for _, s in self.lower)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "upper": [[json_number(t), json_number(v)] for t, v in self.upper],
            "lower": [[json_number(r), json_number(s)] for r, s in self.lower],
            "surjectivity_radius": json_number(self.surjectivity_radius),
        }


def _envelope_at(table: Sequence[Tuple[float, float]], t: float) -> float:
    value = 0.0
    for point, v in table:
        if point > t:
            break
        value = v
    return value


@dataclass(frozen=True)
class AffineCheck:
    """Outcome of checking an affine upper control; `excess` is the worst overshoot."""

    ok: bool
    witness: AffineWitness
    excess: float = 0.0
    worst_pair: Optional[List[str]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "witness": self.witness.to_dict(),
            "excess": json_number(self.excess),
            "worst_pair": self.worst_pair,
        }


@dataclass(frozen=True)
class ConstantCheck:
    """One verified claim: the claimed constant, the observed one and a witness pair."""

    name: str
    ok: bool
    claimed: float
    observed: float
    witness: Optional[List[str]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "ok": self.ok,
            "constant_claimed": json_number(self.claimed),
            "constant_observed": json_number(self.observed),
            "witness_pair": self.witness,
        }


@dataclass(frozen=True)
class AffineFit:
    """Minimal offset for a fixed slope, or infeasibility with the pair that forces it."""

    slope: float
    offset: float
    feasible: bool
    pair: Optional[List[str]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slope": json_number(self.slope),
            "offset": json_number(self.offset),
            "feasible": self.feasible,
            "pair": self.pair,
        }


def _require_parallel(f: MappedPair, g: MappedPair) -> None:
    if not (same_space(f.source, g.source) and same_space(f.target, g.target)):
        raise DomainError("maps must share source and target")


def closeness_distance(f: MappedPair, g: MappedPair) -> float:
    """sup over x of d_Y(fx, gx); 0 on an empty source."""
    _require_parallel(f, g)
    if f.source.size == 0:
        return 0.0
    return float(f.target.dist[f.assign, g.assign].max())


def _pair_arrays(f: MappedPair) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    iu, ju = upper_pairs(f.source.size)
    return iu, ju, f.source.dist[iu, ju], f.image_distances[iu, ju]


def _running_envelope(keys: np.ndarray, values: np.ndarray, grid: np.ndarray, tol: float) -> List[float]:
    """max(values[keys <= t]) for each t in grid, 0 when nothing qualifies."""
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    running = np.maximum.accumulate(values[order]) if values.size else values
    out = []
    for t in grid:
        count = int(np.searchsorted(sorted_keys, t + tol, side="right"))
        out.append(float(running[count - 1]) if count else 0.0)
    return out


def surjectivity_radius(f: MappedPair) -> float:
    """Least r with N_r(f(X)) = Y; INF when no finite r works."""
    if f.target.size == 0:
        return 0.0
    if f.image_indices.size == 0:
        return INF
    return float(f.target.dist[:, f.image_indices].min(axis=1).max())


def control_profile(f: MappedPair) -> ControlProfile:
    """
    Exact realized-grid control envelopes of f.

    upper(t) is the largest image distance over source pairs at distance <= t,
    lower(R) the largest source distance over pairs whose images are within R.
    """
    tol = f.tolerance
    _, _, dx, dy = _pair_arrays(f)

    finite_dx = dx[np.isfinite(dx)]
    upper_grid = np.concatenate([[0.0], np.unique(finite_dx)])
    mask = np.isfinite(dx)
    upper_vals = _running_envelope(dx[mask], dy[mask], upper_grid, tol)

    finite_dy = dy[np.isfinite(dy)]
    lower_grid = np.concatenate([[0.0], np.unique(finite_dy[finite_dy > 0])])
    mask = np.isfinite(dy)
    lower_vals = _running_envelope(dy[mask], dx[mask], lower_grid, tol)

    profile = ControlProfile(
        upper=tuple(zip(upper_grid.tolist(), upper_vals)),
        lower=tuple(zip(lower_grid.tolist(), lower_vals)),
        surjectivity_radius=surjectivity_radius(f),
    )
    logger.debug(
        "control profile: %d upper points, %d lower points, r=%s",
        len(profile.upper), len(profile.lower), profile.surjectivity_radius,
    )
    return profile


def check_affine_upper(f: MappedPair, w: AffineWitness) -> AffineCheck:
    """Verify d_Y(fx,fx') <= a*d_X(x,x') + b on every source pair with finite d_X."""
    iu, ju, dx, dy = _pair_arrays(f)
    finite = np.isfinite(dx)
    if not finite.any():
        return AffineCheck(ok=True, witness=w)
    excess = dy[finite] - w(dx[finite])
    k = int(np.argmax(excess))
    worst = float(excess[k])
    if worst <= f.tolerance:
        return AffineCheck(ok=True, witness=w, excess=max(worst, 0.0))
    i, j = iu[finite][k], ju[finite][k]
    return AffineCheck(ok=False, witness=w, excess=worst, worst_pair=pair_ids(f.source, i, j))


def min_affine_upper(f: MappedPair, slope_grid: Sequence[float]) -> List[AffineFit]:
    """For each slope a, the least b >= 0 with d_Y <= a*d_X + b on finite source pairs."""
    iu, ju, dx, dy = _pair_arrays(f)
    finite = np.isfinite(dx)
    iu, ju, dx, dy = iu[finite], ju[finite], dx[finite], dy[finite]
    fits = []
    for a in slope_grid:
        if dx.size == 0:
            fits.append(AffineFit(slope=a, offset=0.0, feasible=True))
            continue
        need = dy - a * dx
        k = int(np.argmax(need))
        offset = max(float(need[k]), 0.0)
        pair = pair_ids(f.source, iu[k], ju[k]) if need[k] > 0 else None
        fits.append(AffineFit(slope=a, offset=offset, feasible=bool(np.isfinite(offset)), pair=pair))
    return fits


def min_affine_lower(
    f: MappedPair,
    slope_grid: Sequence[float],
    max_offset: float = INF,
) -> List[AffineFit]:
    """
    For each slope a, the least b >= 0 with a*d_X - b <= d_Y on all pairs.

    A pair at infinite source distance with finite image distance admits no
    offset; so does an offset above `max_offset`. Infeasible fits report the
    pair maximising a*d_X - d_Y.
    """
    for a in slope_grid:
        if a <= 0:
            raise DomainError(f"slopes must be positive, got {a}")
    iu, ju, dx, dy = _pair_arrays(f)
    both_inf = np.isinf(dx) & np.isinf(dy)
    iu, ju, dx, dy = iu[~both_inf], ju[~both_inf], dx[~both_inf], dy[~both_inf]
    fits = []
    for a in slope_grid:
        if dx.size == 0:
            fits.append(AffineFit(slope=a, offset=0.0, feasible=True))
            continue
        with np.errstate(invalid="ignore"):
            need = np.where(np.isinf(dy), -INF, a * dx - dy)
        k = int(np.argmax(need))
        offset = max(float(need[k]), 0.0)
        feasible = bool(np.isfinite(offset)) and offset <= max_offset
        pair = pair_ids(f.source, iu[k], ju[k]) if need[k] > 0 else None
        fits.append(AffineFit(slope=a, offset=offset, feasible=feasible, pair=pair))
    return fits


def lipschitz_constant(f: MappedPair) -> Tuple[float, Optional[List[str]]]:
    """Largest ratio d_Y/d_X over pairs with finite positive d_X, and the pair attaining it."""
    iu, ju, dx, dy = _pair_arrays(f)
    finite = np.isfinite(dx)
    if not finite.any():
        return 0.0, None
    ratio = dy[finite] / dx[finite]
    k = int(np.argmax(ratio))
    return float(ratio[k]), pair_ids(f.source, iu[finite][k], ju[finite][k])


@dataclass(frozen=True)
class MapClassification:
    """Mono/epi/iso witnesses for a map on a finite window."""

    profile: ControlProfile
    lower_fits: List[AffineFit] = field(default_factory=list)
    upper_fits: List[AffineFit] = field(default_factory=list)

    @property
    def has_lower_control(self) -> bool:
        return self.profile.has_lower_control

    @property
    def coarsely_surjective(self) -> bool:
        return bool(np.isfinite(self.profile.surjectivity_radius))

    @property
    def coarse_equivalence(self) -> bool:
        return self.has_lower_control and self.coarsely_surjective

    @property
    def quasi_isometry(self) -> bool:
        affine_upper = any(fit.feasible for fit in self.upper_fits)
        affine_lower = any(fit.feasible for fit in self.lower_fits)
        return self.coarse_equivalence and affine_upper and affine_lower

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lower_control_table": self.profile.to_dict()["lower"],
            "surjectivity_radius": json_number(self.profile.surjectivity_radius),
            "has_lower_control": self.has_lower_control,
            "coarsely_surjective": self.coarsely_surjective,
            "coarse_equivalence": self.coarse_equivalence,
            "quasi_isometry_on_window": self.quasi_isometry,
            "lower_fits": [fit.to_dict() for fit in self.lower_fits],
            "upper_fits": [fit.to_dict() for fit in self.upper_fits],
        }


def classify_map(f: MappedPair, slope_grid: Sequence[float] = (1.0,)) -> MapClassification:
    """Witnesses for "admits a lower control" (mono) and "coarsely surjective" (epi)."""
    return MapClassification(
        profile=control_profile(f),
        lower_fits=min_affine_lower(f, slope_grid),
        upper_fits=min_affine_upper(f, slope_grid),
    )
