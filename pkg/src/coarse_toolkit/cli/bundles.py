"""Reading and writing pipeline bundles."""

import json
import sys
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, TextIO

from ..core.documents import BundleDocument, parse_document
from ..core.errors import DomainError, SchemaError
from ..filtration.windows import Window
from ..metric_core.space import FiniteExtMetricSpace, MappedPair


@dataclass
class Bundle:
    spaces: Dict[str, FiniteExtMetricSpace]
    maps: Dict[str, MappedPair] = field(default_factory=dict)
    windows: Dict[str, Window] = field(default_factory=dict)

    def space(self, name: str) -> FiniteExtMetricSpace:
        try:
            return self.spaces[name]
        except KeyError:
            raise DomainError(f"bundle has no space {name!r} (spaces: {', '.join(self.spaces)})") from None

    def map(self, name: str) -> MappedPair:
        try:
            return self.maps[name]
        except KeyError:
            raise DomainError(f"bundle has no map {name!r} (maps: {', '.join(self.maps)})") from None

    def window(self, name: Optional[str]) -> Optional[Window]:
        if name is None:
            return None
        try:
            return self.windows[name]
        except KeyError:
            raise DomainError(f"bundle has no window {name!r} (windows: {', '.join(self.windows)})") from None

    def require_integral(self) -> None:
        """Fail unless every space is on the exact integer path."""
        for name, space in self.spaces.items():
            if not space.integral:
                raise DomainError(f"space {name!r} has non-integral distances; --exact refuses it")

    def to_dict(self) -> Dict[str, Any]:
        names = {id(space): name for name, space in self.spaces.items()}
        return {
            "spaces": {name: space.to_dict() for name, space in self.spaces.items()},
            "maps": {
                name: f.to_dict(names[id(f.source)], names[id(f.target)]) for name, f in self.maps.items()
            },
        }


def _nested(exc: SchemaError, prefix: str) -> SchemaError:
    return SchemaError(exc.message, prefix + exc.pointer)


def bundle_from_dict(data: Any) -> Bundle:
    """Validate a bundle document and build its spaces, maps and windows."""
    doc = parse_document(BundleDocument, data)
    spaces = {}
    for name in doc.spaces:
        try:
            spaces[name] = FiniteExtMetricSpace.from_dict(data["spaces"][name], name=name)
        except SchemaError as exc:
            raise _nested(exc, f"/spaces/{name}") from exc
    maps = {}
    for name in doc.maps:
        try:
            maps[name] = replace(MappedPair.from_dict(data["maps"][name], spaces), name=name)
        except SchemaError as exc:
            raise _nested(exc, f"/maps/{name}") from exc
    windows = {}
    for name, window in doc.windows.items():
        if window.space not in spaces:
            raise SchemaError(f"unknown space {window.space!r}", f"/windows/{name}/space")
        space = spaces[window.space]
        unknown = [p for p in window.points if p not in space.index]
        if unknown:
            raise SchemaError(f"unknown point {unknown[0]!r}", f"/windows/{name}/points")
        windows[name] = Window(space.indices(window.points), window.description or name)
    return Bundle(spaces, maps, windows)


def read_bundle(path: str, stdin: Optional[TextIO] = None) -> Bundle:
    """Load a bundle from a file, or from stdin when `path` is "-"."""
    if path == "-":
        text = (stdin or sys.stdin).read()
    else:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno}", "") from exc
    return bundle_from_dict(data)
