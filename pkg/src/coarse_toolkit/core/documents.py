"""
Validated JSON document models.

Spaces, maps and graphs travel between CLI stages as JSON. The models below
check structure; the owning modules check the mathematics. Every validation
failure is reported as a SchemaError carrying the JSON pointer of the first
offending location.
"""

import math
from typing import Any, Dict, List, Literal, Sequence, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, StrictFloat, StrictInt, ValidationError

from .errors import SchemaError

INF_TOKEN = "inf"

Distance = Union[StrictInt, StrictFloat, Literal["inf"]]
EdgeKindName = Literal["internal", "glued", "augmented"]

ModelT = TypeVar("ModelT", bound=BaseModel)


class SpaceDocument(BaseModel):
    """JSON form of a finite extended metric space."""

    model_config = ConfigDict(extra="forbid")

    points: List[str]
    dist: List[List[Distance]]
    labels: Dict[str, str] = {}


class MapDocument(BaseModel):
    """JSON form of a map; source and target name spaces in the enclosing bundle."""

    model_config = ConfigDict(extra="forbid")

    source: str
    target: str
    assign: Dict[str, str]


class GraphDocument(BaseModel):
    """JSON form of a weighted graph."""

    model_config = ConfigDict(extra="forbid")

    vertices: List[str]
    edges: List[Tuple[str, str, Union[StrictInt, StrictFloat], EdgeKindName]]


class WindowDocument(BaseModel):
    """A named set of points of one space in the bundle."""

    model_config = ConfigDict(extra="forbid")

    space: str
    points: List[str]
    description: str = ""


class BundleDocument(BaseModel):
    """Named spaces, maps and windows exchanged by the pipeline subcommands."""

    model_config = ConfigDict(extra="forbid")

    spaces: Dict[str, SpaceDocument]
    maps: Dict[str, MapDocument] = {}
    windows: Dict[str, WindowDocument] = {}


def json_pointer(data: Any, loc: Sequence[Union[str, int]]) -> str:
    """
    Build an RFC 6901 pointer from a pydantic error location.

    Location parts that do not address into `data` (union member tags) are dropped.
    """
    parts: List[str] = []
    node = data
    for part in loc:
        if isinstance(node, dict) and part in node:
            node = node[part]
        elif isinstance(node, list) and isinstance(part, int) and 0 <= part < len(node):
            node = node[part]
        else:
            break
        parts.append(str(part).replace("~", "~0").replace("/", "~1"))
    return "/" + "/".join(parts) if parts else ""


def parse_document(model: Type[ModelT], data: Any) -> ModelT:
    """
    Validate `data` against `model`.

    Raises:
        SchemaError: with the pointer of the first failing location.
    """
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SchemaError(first["msg"], json_pointer(data, first["loc"])) from exc


def encode_distance(value: float, integral: bool) -> Union[int, float, str]:
    """Encode one distance for JSON; integers stay integers in the integer path."""
    if math.isinf(value):
        return INF_TOKEN
    if integral:
        return int(value)
    return float(value)


def decode_distance(value: Union[int, float, str]) -> float:
    """Decode one JSON distance."""
    if value == INF_TOKEN:
        return math.inf
    return float(value)


def check_square(doc: SpaceDocument) -> None:
    """Raise SchemaError unless `doc.dist` is a square matrix over `doc.points`."""
    size = len(doc.points)
    if len(doc.dist) != size:
        raise SchemaError(f"expected {size} rows, got {len(doc.dist)}", "/dist")
    for i, row in enumerate(doc.dist):
        if len(row) != size:
            raise SchemaError(f"expected {size} entries, got {len(row)}", f"/dist/{i}")
    if len(set(doc.points)) != size:
        raise SchemaError("duplicate point ids", "/points")


def json_number(value: float) -> Union[int, float, str]:
    """Report-friendly number: integral values as ints, INF as "inf"."""
    if math.isinf(value):
        return INF_TOKEN
    value = float(value)
    return int(value) if value.is_integer() else value
