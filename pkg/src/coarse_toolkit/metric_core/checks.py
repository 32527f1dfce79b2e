"""Exhaustive validation of metric-space invariants."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .space import FiniteExtMetricSpace, format_point_id


@dataclass(frozen=True)
class MetricCheck:
    ok: bool
    issues: List[str] = field(default_factory=list)
    worst_triangle: Optional[List[str]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"ok": self.ok, "issues": self.issues, "worst_triangle": self.worst_triangle}


def check_metric(X: FiniteExtMetricSpace) -> MetricCheck:
    """
    Check symmetry, zero diagonal, identity of indiscernibles and the triangle
    inequality with INF absorbing. One vectorized pass per middle point.
    """
    D = X.dist
    n = X.size
    tol = X.tolerance
    issues = []
    if n == 0:
        return MetricCheck(ok=True)
    if not np.array_equal(D, D.T):
        issues.append("asymmetric")
    if np.any(np.diagonal(D) != 0):
        issues.append("nonzero diagonal")
    if np.any(D[~np.eye(n, dtype=bool)] == 0):
        issues.append("distinct points at distance 0")

    worst_excess = 0.0
    worst = None
    for q in range(n):
        via = D[:, q, None] + D[None, q, :]
        bad = D > via + tol
        if bad.any():
            excess = np.where(bad, D - via, -np.inf)
            i, j = np.unravel_index(int(np.argmax(excess)), excess.shape)
            if excess[i, j] > worst_excess:
                worst_excess = float(excess[i, j])
                worst = [format_point_id(X.points[k]) for k in (i, q, j)]
    if worst is not None:
        issues.append(f"triangle inequality fails by {worst_excess}")
    return MetricCheck(ok=not issues, issues=issues, worst_triangle=worst)
