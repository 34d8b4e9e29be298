"""Tiling documents: a line-oriented JSON format with a formal schema.

Layout (one polygon per line so that documents diff well)::

    {"schema": "hyplane-tiling", "version": "1.0", "kind": "...",
     "meta": {...},
     "polygons": [
    [a0, a1, a2],
    ...
    ]}

Angles are written with 15 significant digits, so a parsed document
re-serializes to the same bytes.
"""

from __future__ import annotations

import json
from importlib import resources

import jsonschema
import numpy as np

from .tiling import Tiling

SCHEMA_NAME = "hyplane-tiling"
SCHEMA_VERSION = "1.0"
DIGITS = 15


class TilingFormatError(ValueError):
    """Malformed tiling document; ``line`` and ``field`` locate the problem when known."""

    def __init__(self, message, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


def load_schema() -> dict:
    text = resources.files("hyplane").joinpath("schema/tiling.schema.json").read_text()
    return json.loads(text)


def _fmt(x: float) -> str:
    s = f"{x:.{DIGITS}g}"
    return "0" if s == "-0" else s


def _meta_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def dumps(t: Tiling) -> str:
    meta = {k: _meta_value(v) for k, v in t.meta.items()}
    head = (f'{{"schema": "{SCHEMA_NAME}", "version": "{SCHEMA_VERSION}", '
            f'"kind": {json.dumps(t.kind)},\n'
            f'"meta": {json.dumps(meta, sort_keys=True, allow_nan=False)},\n'
            f'"polygons": [\n')
    rows = ["[" + ", ".join(_fmt(a) for a in row) + "]" for row in t.angles]
    return head + ",\n".join(rows) + ("\n" if rows else "") + "]}\n"


POLYGON_LINE_OFFSET = 4  # the first polygon sits on line 4


def loads(text: str) -> Tiling:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TilingFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise TilingFormatError("document must be a JSON object", line=1)
    version = doc.get("version")
    if isinstance(version, str) and version.split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise TilingFormatError(f"unsupported schema version {version}", line=1, field="version")
    errors = sorted(jsonschema.Draft202012Validator(load_schema()).iter_errors(doc),
                    key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        path = list(err.absolute_path)
        line = None
        if len(path) >= 2 and path[0] == "polygons":
            line = POLYGON_LINE_OFFSET + int(path[1])
        elif path and path[0] == "meta":
            line = 2
        elif path:
            line = 1 if path[0] != "polygons" else 3
        field = "/".join(map(str, path)) or None
        raise TilingFormatError(err.message, line=line, field=field)
    polys = doc["polygons"]
    k = 4 if doc["kind"] == "markov-squares" else 3
    for i, row in enumerate(polys):
        if len(row) != k:
            raise TilingFormatError(f"expected {k} apexes, got {len(row)}",
                                    line=POLYGON_LINE_OFFSET + i, field=f"polygons/{i}")
    angles = np.array(polys, dtype=float).reshape(len(polys), k)
    return Tiling(angles, doc["kind"], doc["meta"])


def write_tiling(t: Tiling, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(t))


def read_tiling(path) -> Tiling:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
