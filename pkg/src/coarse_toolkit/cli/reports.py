"""Scenario reports: assertion records, JSON/CSV rendering and atomic writes."""

import io
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.documents import json_number
from ..filtration.profiles import FiltrationProfile, write_profiles_csv

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
PROFILE_FILE = "profile.csv"


def to_jsonable(value: Any) -> Any:
    """Plain JSON values; infinities become "inf", integral floats become ints."""
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return json_number(float(value))
    return value


@dataclass
class AssertionRecord:
    """One checked claim: the anchor it belongs to, what was expected and what was seen."""

    anchor: str
    name: str
    ok: bool
    observed: Any = None
    expected: Any = None
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "anchor": self.anchor,
            "name": self.name,
            "status": "pass" if self.ok else "fail",
            "observed": to_jsonable(self.observed),
            "expected": to_jsonable(self.expected),
            "detail": to_jsonable(self.detail),
        }


class AssertionRecorder:
    """Collects assertion records for one scenario run."""

    def __init__(self, scenario: str):
        self.scenario = scenario
        self.records: List[AssertionRecord] = []

    def record(
        self,
        anchor: str,
        name: str,
        ok: bool,
        observed: Any = None,
        expected: Any = None,
        **detail: Any,
    ) -> bool:
        """
        Record an assertion.

        Args:
            anchor: The claim the assertion exercises.
            name: Short name of the assertion within the scenario.
            ok: Whether it held.
            observed: The measured value.
            expected: The bound or value it was compared with.
            **detail: Witnesses and other context.

        Returns:
            `ok`, so callers can branch on it.
        """
        ok = bool(ok)
        self.records.append(AssertionRecord(anchor, name, ok, observed, expected, detail))
        level = logging.DEBUG if ok else logging.WARNING
        logger.log(level, "%s/%s: %s (observed=%s, expected=%s)", self.scenario, name,
                   "pass" if ok else "FAIL", observed, expected)
        return ok

    @property
    def ok(self) -> bool:
        return all(record.ok for record in self.records)

    @property
    def failures(self) -> List[AssertionRecord]:
        return [record for record in self.records if not record.ok]


@dataclass
class ScenarioReport:
    scenario: str
    anchor: str
    params: Dict[str, Any]
    assertions: List[AssertionRecord]
    data: Dict[str, Any] = field(default_factory=dict)
    profiles: List[FiltrationProfile] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(record.ok for record in self.assertions)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "anchor": self.anchor,
            "params": to_jsonable(self.params),
            "status": "pass" if self.ok else "fail",
            "assertions": [record.to_dict() for record in self.assertions],
            "data": to_jsonable(self.data),
            "profiles": [profile.to_dict() for profile in self.profiles],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def profile_csv(self) -> Optional[str]:
        if not self.profiles:
            return None
        stream = io.StringIO()
        write_profiles_csv(self.profiles, stream)
        return stream.getvalue()


def atomic_write_text(path: Path, text: str) -> None:
    """Write to a temporary sibling and rename over `path`."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, path)


def write_report(report: ScenarioReport, out_dir: Path) -> Path:
    """Write `<out_dir>/<scenario>/report.json` and, when there are profiles, profile.csv."""
    target = Path(out_dir) / report.scenario
    csv_text = report.profile_csv()
    if csv_text is not None:
        atomic_write_text(target / PROFILE_FILE, csv_text)
    atomic_write_text(target / REPORT_FILE, report.to_json())
    logger.info("wrote %s (%s)", target / REPORT_FILE, "pass" if report.ok else "fail")
    return target
