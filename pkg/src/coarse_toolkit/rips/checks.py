"""
Verification of the constants in the factorisation
X -> Q_sigma(f) -> U^Theta_sigma -> Y^Theta_sigma -> Y^Theta_inf -> Y.

Each check returns a report; failed inequalities are reported, not raised.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.documents import json_number
from ..core.errors import PreconditionError
from ..filtration.sublevels import quotient_space
from ..metric_core.controls import (
    AffineWitness,
    ConstantCheck,
    check_affine_upper,
    control_profile,
)
from ..metric_core.space import INF, FiniteExtMetricSpace, MappedPair, format_point_id
from .augmented import RipsResult, augmented_rips, image_subspace, require_coarsely_surjective
from .weights import DoublingCertificate, WeightFunction, doubling_certificate

logger = logging.getLogger(__name__)


def _ids(X: FiniteExtMetricSpace, *rows: int) -> List[str]:
    return [format_point_id(X.points[int(i)]) for i in rows]


def realized_grid(Y: FiniteExtMetricSpace) -> np.ndarray:
    """0 and every realized distance of Y."""
    return np.concatenate([[0.0], Y.realized_distances()])


@dataclass(frozen=True)
class Report:
    """A named list of constant checks."""

    checks: List[ConstantCheck]
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    def check(self, name: str) -> ConstantCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "checks": [c.to_dict() for c in self.checks], **self.details}


def _ratio_check(
    name: str,
    numerator: np.ndarray,
    denominator: np.ndarray,
    constant: float,
    tol: float,
    X: FiniteExtMetricSpace,
) -> ConstantCheck:
    """numerator <= constant * denominator over upper pairs with finite denominator."""
    iu, ju = np.triu_indices(numerator.shape[0], 1)
    top, bottom = numerator[iu, ju], denominator[iu, ju]
    finite = np.isfinite(bottom)
    if not finite.any():
        return ConstantCheck(name, True, constant, 0.0)
    iu, ju, top, bottom = iu[finite], ju[finite], top[finite], bottom[finite]
    excess = top - constant * bottom
    k = int(np.argmax(excess))
    ok = bool(excess[k] <= tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bottom > 0, top / bottom, np.where(top > 0, INF, 0.0))
    m = int(np.argmax(ratio))
    witness = _ids(X, iu[k], ju[k]) if not ok else _ids(X, iu[m], ju[m])
    return ConstantCheck(name, ok, constant, float(ratio[m]), witness)


def check_ext_qi(f: MappedPair, theta: WeightFunction, sigma: float) -> Report:
    """
    Q_sigma(f) -> U^Theta_sigma is (Theta(sigma) + 1)-Lipschitz with lower
    control t -> (t - 1) / 2, checked as d_Q <= 2 d_U + 1.
    """
    require_coarsely_surjective(f)
    if not np.isfinite(sigma):
        raise PreconditionError("the quotient comparison needs a finite sigma")
    rips = augmented_rips(f, theta, sigma)
    U = image_subspace(f, theta, sigma, rips)
    Q = quotient_space(f, sigma).space
    g = np.searchsorted(f.image_indices, f.assign)
    DU = U.dist[np.ix_(g, g)]
    DQ = Q.dist
    tol = max(Q.tolerance, U.tolerance)
    constant = theta(sigma) + 1.0
    upper = _ratio_check("upper_lipschitz", DU, DQ, constant, tol, f.source)

    iu, ju = np.triu_indices(Q.size, 1)
    du, dq = DU[iu, ju], DQ[iu, ju]
    finite = np.isfinite(du)
    if finite.any():
        slack = 2 * du[finite] + 1 - dq[finite]
        k = int(np.argmin(slack))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(du[finite] > 0, (dq[finite] - 1) / du[finite], 0.0)
        lower = ConstantCheck(
            "lower_control",
            bool(slack[k] >= -tol),
            2.0,
            float(ratio.max()),
            _ids(f.source, iu[finite][k], ju[finite][k]),
        )
        min_slack = float(slack[k])
    else:
        lower = ConstantCheck("lower_control", True, 2.0, 0.0)
        min_slack = INF
    report = Report([upper, lower], {"theta_sigma_plus_one": json_number(constant), "lower_slack": json_number(min_slack)})
    if not report.ok:
        logger.warning("quotient comparison failed at sigma=%g: %s", sigma, report.to_dict())
    return report


def nearest_image_retraction(f: MappedPair) -> np.ndarray:
    """
    For each point of Y, the position in f(X) of its nearest image point.

    Ties go to the earliest image point, so image points map to themselves.
    """
    image = f.image_indices
    return np.argmin(f.target.dist[:, image], axis=1)


def _certificate(theta: WeightFunction, r: float, Y: FiniteExtMetricSpace) -> DoublingCertificate:
    if theta.certificate is not None and theta.certificate.r >= r:
        return theta.certificate
    return doubling_certificate(theta, r, realized_grid(Y))


def check_image_qi(f: MappedPair, theta: WeightFunction, sigma: float) -> Report:
    """
    The retraction phi: Y^Theta_sigma -> U^Theta_sigma onto nearest image points.

    Checks phi is C-Lipschitz on every edge, phi restricted to the image is the
    identity, the inclusion of U is 1-Lipschitz, and every point of Y has an
    internal edge of weight at most Theta(r) into f(X).
    """
    r = require_coarsely_surjective(f)
    Y = f.target
    if sigma < r - Y.tolerance:
        raise PreconditionError(f"sigma={sigma} is below the surjectivity radius {r}")
    certificate = _certificate(theta, r, Y)
    C = certificate.C
    rips = augmented_rips(f, theta, sigma)
    U = image_subspace(f, theta, sigma, rips)
    image = f.image_indices
    phi = nearest_image_retraction(f)
    tol = max(U.tolerance, rips.space.tolerance)

    graph = rips.graph
    moved = U.dist[phi[graph.src], phi[graph.dst]]
    if graph.size:
        excess = moved - C * graph.weight
        k = int(np.argmax(excess))
        ratio = moved / graph.weight
        m = int(np.argmax(ratio))
        ok = bool(excess[k] <= tol)
        witness = _ids(Y, graph.src[k], graph.dst[k]) if not ok else _ids(Y, graph.src[m], graph.dst[m])
        phi_check = ConstantCheck("phi_lipschitz", ok, C, float(ratio[m]), witness)
    else:
        phi_check = ConstantCheck("phi_lipschitz", True, C, 0.0)

    fixed = phi[image] == np.arange(image.size)
    retraction = ConstantCheck(
        "phi_retraction",
        bool(fixed.all()),
        0.0,
        float((~fixed).sum()),
        None if fixed.all() else _ids(Y, image[np.flatnonzero(~fixed)[0]]),
    )

    inclusion = _ratio_check("inclusion_lipschitz", rips.space.dist[np.ix_(image, image)], U.dist, 1.0, tol, U)

    bound = theta(r)
    outside = np.setdiff1d(np.arange(Y.size), image)
    worst_weight, worst_point = 0.0, None
    for y in outside:
        d = Y.dist[y, image]
        usable = d[d <= sigma + Y.tolerance]
        weight = float(theta.values(usable).min()) if usable.size else INF
        if weight > worst_weight:
            worst_weight, worst_point = weight, int(y)
    cosurjective = ConstantCheck(
        "cosurjective_weight",
        worst_weight <= bound + tol,
        bound,
        worst_weight,
        None if worst_point is None else _ids(Y, worst_point),
    )
    return Report(
        [phi_check, retraction, inclusion, cosurjective],
        {"surjectivity_radius": json_number(r), "certificate": certificate.to_dict()},
    )


def check_lower(f: MappedPair, theta: WeightFunction, witness: Optional[AffineWitness] = None) -> Report:
    """
    Y^Theta_inf -> Y: every Rips edge of weight w joins points with
    d_Y <= a*w + b + w, and the limit metric is at most Theta(d_Y).
    """
    Y = f.target
    if not theta.dominates_identity(realized_grid(Y)):
        raise PreconditionError("t <= Theta(t) fails on the realized grid")
    if witness is None:
        raise PreconditionError("an affine upper witness for f is required")
    verdict = check_affine_upper(f, witness)
    if not verdict.ok:
        raise PreconditionError(f"affine witness {witness} does not bound f: {verdict.worst_pair}")

    rips: RipsResult = augmented_rips(f, theta, INF)
    graph = rips.graph
    tol = max(Y.tolerance, rips.space.tolerance)
    dy = Y.dist[graph.src, graph.dst]
    if graph.size:
        bound = witness(graph.weight) + graph.weight
        excess = dy - bound
        k = int(np.argmax(excess))
        edge_check = ConstantCheck(
            "edge_upper_control",
            bool(excess[k] <= tol),
            witness.a + 1.0,
            float(np.max(dy / graph.weight)),
            _ids(Y, graph.src[k], graph.dst[k]),
        )
    else:
        edge_check = ConstantCheck("edge_upper_control", True, witness.a + 1.0, 0.0)

    iu, ju = np.triu_indices(Y.size, 1)
    d = Y.dist[iu, ju]
    keep = np.isfinite(d) & ~rips.omitted_mask()[iu, ju]
    limit = rips.space.dist[iu[keep], ju[keep]]
    allowed = theta.values(d[keep])
    if keep.any():
        excess = limit - allowed
        k = int(np.argmax(excess))
        theta_check = ConstantCheck(
            "limit_below_theta",
            bool(excess[k] <= tol),
            1.0,
            float(np.max(limit / allowed)),
            _ids(Y, iu[keep][k], ju[keep][k]),
        )
    else:
        theta_check = ConstantCheck("limit_below_theta", True, 1.0, 0.0)

    identity = MappedPair(rips.space, Y, np.arange(Y.size), name="id")
    table = control_profile(identity).to_dict()["lower"]
    return Report(
        [edge_check, theta_check],
        {"lower_control_table": table, "omitted_internal_edges": rips.omitted_count, "witness": witness.to_dict()},
    )
