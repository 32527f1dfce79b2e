"""
Candidate relatively maximal metrics and the ordering of metrics on a fixed set.

d precedes d' when the identity (Y, d') -> (Y, d) is coarsely Lipschitz. On a
truncation family this is judged by whether one affine witness keeps working
as the truncation grows.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import get_settings
from ..core.documents import json_number
from ..core.errors import DomainError
from ..filtration.profiles import TrendReport, stabilisation_trend
from ..filtration.sublevels import quotient_space
from ..metric_core.controls import (
    AffineFit,
    AffineWitness,
    ConstantCheck,
    check_affine_upper,
    lipschitz_constant,
    min_affine_upper,
)
from ..metric_core.space import INF, FiniteExtMetricSpace, MappedPair
from .augmented import augmented_rips
from .checks import check_ext_qi, check_image_qi, check_lower, realized_grid
from .weights import WeightFunction

logger = logging.getLogger(__name__)

DEFAULT_SLOPES = (1.0, 2.0, 4.0, 8.0)


def _identity_between(source: FiniteExtMetricSpace, target: FiniteExtMetricSpace) -> MappedPair:
    if source.points != target.points:
        raise DomainError("metrics must live on the same point set")
    return MappedPair(source, target, np.arange(source.size), name="id")


def ratio_statistic(d: FiniteExtMetricSpace, d_prime: FiniteExtMetricSpace) -> float:
    """max d'/d over pairs with finite positive d."""
    ratio, _ = lipschitz_constant(_identity_between(d, d_prime))
    return ratio


@dataclass(frozen=True, eq=False)
class MaximalMetricResult:
    """(Y, partial^Theta_sigma) with per-arrow checks and both-way affine fits against d_Y."""

    space: FiniteExtMetricSpace
    arrows: Dict[str, List[ConstantCheck]]
    skipped: Dict[str, str] = field(default_factory=dict)
    fits_d_by_partial: List[AffineFit] = field(default_factory=list)
    fits_partial_by_d: List[AffineFit] = field(default_factory=list)
    max_ratio: float = 0.0

    @property
    def ok(self) -> bool:
        return all(check.ok for checks in self.arrows.values() for check in checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "arrows": {name: [c.to_dict() for c in checks] for name, checks in self.arrows.items()},
            "skipped": self.skipped,
            "d_Y_by_partial": [fit.to_dict() for fit in self.fits_d_by_partial],
            "partial_by_d_Y": [fit.to_dict() for fit in self.fits_partial_by_d],
            "max_ratio_partial_over_d_Y": json_number(self.max_ratio),
        }


def _lipschitz_arrow(name: str, h: MappedPair, constant: float) -> ConstantCheck:
    check = check_affine_upper(h, AffineWitness(constant, 0.0))
    observed, pair = lipschitz_constant(h)
    return ConstantCheck(name, check.ok, constant, observed, check.worst_pair or pair)


def synthesize_maximal_metric(
    f: MappedPair,
    theta: WeightFunction,
    sigma: float,
    slope_grid: Sequence[float] = DEFAULT_SLOPES,
) -> MaximalMetricResult:
    """
    Build (Y, partial^Theta_sigma) and verify X -> Q_sigma -> U -> Y_sigma -> Y_inf -> Y.

    The arrow Y_inf -> Y is checked when t <= Theta(t) holds on the grid and f
    has a finite Lipschitz constant L on the truncation, with witness (ceil(L), 0);
    otherwise it is listed under `skipped` with the reason.
    """
    rips = augmented_rips(f, theta, sigma)
    Y = f.target
    Y_sigma = rips.space
    arrows: Dict[str, List[ConstantCheck]] = {}
    skipped: Dict[str, str] = {}

    if np.isfinite(sigma):
        Q = quotient_space(f, sigma)
        arrows["X->Q_sigma"] = [_lipschitz_arrow("q_lipschitz", Q.quotient, 1.0)]
        arrows["Q_sigma->U"] = check_ext_qi(f, theta, sigma).checks
    else:
        skipped["X->Q_sigma"] = "sigma is infinite"
        skipped["Q_sigma->U"] = "sigma is infinite"
    arrows["U->Y_sigma"] = check_image_qi(f, theta, sigma).checks

    Y_inf = augmented_rips(f, theta, INF).space
    arrows["Y_sigma->Y_inf"] = [_lipschitz_arrow("limit_lipschitz", _identity_between(Y_sigma, Y_inf), 1.0)]

    lipschitz, _ = lipschitz_constant(f)
    if not theta.dominates_identity(realized_grid(Y)):
        skipped["Y_inf->Y"] = "t <= Theta(t) fails on the realized grid"
    elif not np.isfinite(lipschitz):
        skipped["Y_inf->Y"] = "f has no finite Lipschitz constant on this truncation"
    else:
        arrows["Y_inf->Y"] = check_lower(f, theta, AffineWitness(float(math.ceil(lipschitz)), 0.0)).checks

    forward = _identity_between(Y_sigma, Y)
    backward = _identity_between(Y, Y_sigma)
    result = MaximalMetricResult(
        space=Y_sigma,
        arrows=arrows,
        skipped=skipped,
        fits_d_by_partial=min_affine_upper(forward, slope_grid),
        fits_partial_by_d=min_affine_upper(backward, slope_grid),
        max_ratio=ratio_statistic(Y, Y_sigma),
    )
    if not result.ok:
        logger.warning("factorisation checks failed: %s", result.to_dict()["arrows"])
    return result


@dataclass(frozen=True)
class PrecedesVerdict:
    """
    Whether d precedes d' consistently across a truncation family.

    `offsets[a]` lists the minimal b per truncation for slope a.
    """

    params: Tuple[float, ...]
    offsets: Dict[float, Tuple[float, ...]]
    trends: Dict[float, TrendReport]
    consistent: bool
    witness: Optional[AffineWitness] = None
    divergence_slope: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": [json_number(p) for p in self.params],
            "offsets": {str(json_number(a)): [json_number(b) for b in bs] for a, bs in self.offsets.items()},
            "trends": {str(json_number(a)): t.to_dict() for a, t in self.trends.items()},
            "consistent": self.consistent,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "divergence_slope": json_number(self.divergence_slope),
        }


def precedes_on_family(
    family: Sequence[Tuple[float, FiniteExtMetricSpace, FiniteExtMetricSpace]],
    slope_grid: Sequence[float] = DEFAULT_SLOPES,
    threshold: Optional[float] = None,
) -> PrecedesVerdict:
    """
    Judge d <= a*d' + b across truncations (param, d, d').

    Consistent when for some slope the minimal offsets stay finite and do not
    grow across the family; the witness uses the largest offset seen.
    """
    if not family:
        raise DomainError("empty truncation family")
    threshold = get_settings().trend_threshold if threshold is None else threshold
    params = tuple(float(param) for param, _, _ in family)
    offsets: Dict[float, List[float]] = {float(a): [] for a in slope_grid}
    for _, d, d_prime in family:
        for fit in min_affine_upper(_identity_between(d_prime, d), slope_grid):
            offsets[float(fit.slope)].append(fit.offset)

    trends: Dict[float, TrendReport] = {}
    witness = None
    for a, bs in offsets.items():
        if len(bs) >= 2:
            trends[a] = stabilisation_trend(dict(zip(params, bs)), threshold)
            bounded = not trends[a].growing
        else:
            bounded = bool(np.isfinite(bs[0]))
        if bounded and all(np.isfinite(bs)) and witness is None:
            witness = AffineWitness(a, max(bs))
    divergence = 0.0
    if witness is None and trends:
        divergence = min(t.slope for t in trends.values())
    return PrecedesVerdict(
        params=params,
        offsets={a: tuple(bs) for a, bs in offsets.items()},
        trends=trends,
        consistent=witness is not None,
        witness=witness,
        divergence_slope=divergence,
    )
