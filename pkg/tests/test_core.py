"""Tests for settings, errors and JSON documents."""

import json
import math
import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from coarse_toolkit.core import (
    CoarseToolkitError,
    DomainError,
    SchemaError,
    ToolkitSettings,
    configure,
    get_settings,
)
from coarse_toolkit.core.documents import (
    BundleDocument,
    SpaceDocument,
    decode_distance,
    encode_distance,
    json_number,
    json_pointer,
    parse_document,
)


@pytest.fixture
def restore_settings():
    saved = get_settings()
    yield
    configure(saved)


def test_default_settings():
    """Defaults match the documented constants."""
    settings = ToolkitSettings()
    assert settings.tolerance == 1e-9
    assert settings.exp2_cap == 2.0**40
    assert settings.default_seed == 20251215
    assert settings.dense_threshold == 0.25
    assert settings.oracle_max_vertices == 300
    assert settings.output_dir == "reports"


def test_settings_are_frozen():
    """Settings cannot be mutated in place."""
    settings = ToolkitSettings()
    with pytest.raises(Exception):
        settings.tolerance = 1.0


def test_configure_overrides(restore_settings):
    """configure() swaps the process-wide settings."""
    updated = configure(tolerance=1e-6)
    assert updated.tolerance == 1e-6
    assert get_settings().tolerance == 1e-6
    assert get_settings().default_seed == 20251215


def test_settings_from_file(tmp_path):
    """Settings load from JSON and report bad fields with a pointer."""
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"default_seed": 7, "log_level": "DEBUG"}))
    settings = ToolkitSettings.from_file(str(good))
    assert settings.default_seed == 7
    assert settings.log_level == "DEBUG"

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"tolerance": -1}))
    with pytest.raises(SchemaError) as info:
        ToolkitSettings.from_file(str(bad))
    assert info.value.pointer == "/tolerance"


def test_settings_reject_unknown_fields(tmp_path):
    """Unknown keys in a settings file are schema errors."""
    path = tmp_path / "extra.json"
    path.write_text(json.dumps({"colour": "blue"}))
    with pytest.raises(SchemaError) as info:
        ToolkitSettings.from_file(str(path))
    assert info.value.pointer == "/colour"


def test_error_hierarchy():
    """Every toolkit error derives from the common base."""
    assert issubclass(DomainError, CoarseToolkitError)
    assert issubclass(SchemaError, CoarseToolkitError)
    error = SchemaError("bad value", "/dist/0/1")
    assert error.pointer == "/dist/0/1"
    assert str(error) == "/dist/0/1: bad value"
    assert str(SchemaError("bad")) == "/: bad"


def test_parse_document_reports_pointer():
    """Validation errors carry the JSON pointer of the first offending location."""
    with pytest.raises(SchemaError) as info:
        parse_document(SpaceDocument, {"points": ["a"], "dist": [[0]], "extra": 1})
    assert info.value.pointer == "/extra"

    with pytest.raises(SchemaError) as info:
        parse_document(SpaceDocument, {"points": ["a"], "dist": [["far"]]})
    assert info.value.pointer == "/dist/0/0"


def test_bundle_document_defaults():
    """Maps and windows are optional in a bundle."""
    doc = parse_document(BundleDocument, {"spaces": {"X": {"points": [], "dist": []}}})
    assert doc.maps == {}
    assert doc.windows == {}


def test_json_pointer_escapes():
    """Pointer segments escape '~' and '/'."""
    data = {"a/b": {"c~d": 1}}
    assert json_pointer(data, ("a/b", "c~d")) == "/a~1b/c~0d"
    assert json_pointer(data, ("missing",)) == ""


def test_distance_encoding():
    """INF travels as "inf"; integral distances stay integers."""
    assert encode_distance(math.inf, True) == "inf"
    assert encode_distance(3.0, True) == 3
    assert isinstance(encode_distance(3.0, True), int)
    assert encode_distance(2.5, False) == 2.5
    assert decode_distance("inf") == math.inf
    assert decode_distance(4) == 4.0


def test_json_number():
    """Report numbers drop trailing .0 and spell INF."""
    assert json_number(2.0) == 2
    assert json_number(0.5) == 0.5
    assert json_number(math.inf) == "inf"
