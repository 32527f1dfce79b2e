"""Command-line pipeline, bundles, scenario registry and report writing."""

from .bundles import Bundle, bundle_from_dict, read_bundle
from .reports import AssertionRecord, AssertionRecorder, ScenarioReport, write_report
from .scenarios import SCENARIOS, CompositeScenario, Scenario, get_scenario, run_scenario
