"""Record and channel files, and a JSON writer with lossless floats.

Record file::

    {"records": [{"input": [x, y, z], "output": [x, y, z]}, ...],
     "metadata": {"label": "...", "tolerance": 1e-9}}

A bare list of records is accepted too. Channel file: either
``{"t": [...], "E": [[...], [...], [...]]}`` or ``{"matrix": 4x4}`` with
first row ``(1, 0, 0, 0)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import AffineChannel
from .errors import InvalidStateError, QubitReconError
from .reconstruct import TransformationRecord


class ParseError(QubitReconError, ValueError):
    """A record or channel file is malformed; the message names the field."""


def _reject_constant(name):
    raise ParseError(f"non-finite number {name} is not allowed")


def _load_json(source) -> object:
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith(("{", "[")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc.strerror or exc}") from exc
    else:
        text = str(source)
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _vector(obj, name: str, shape) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: expected numbers, got {obj!r}") from exc
    if arr.shape != shape:
        raise ParseError(f"{name}: expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{name}: entries must be finite")
    return arr


@dataclass(frozen=True)
class RecordFile:
    records: tuple[TransformationRecord, ...]
    label: str | None = None
    tolerance: float | None = None
    metadata: dict = field(default_factory=dict)


def parse_records(source) -> RecordFile:
    """Parse a record file from a path or a JSON string."""
    data = _load_json(source)
    meta = {}
    if isinstance(data, dict):
        if "records" not in data:
            raise ParseError("records: missing field")
        meta = data.get("metadata")
        meta = {} if meta is None else meta
        if not isinstance(meta, dict):
            raise ParseError("metadata: expected an object")
        data = data["records"]
    if not isinstance(data, list):
        raise ParseError("records: expected a list")
    if len(data) > 4:
        raise ParseError(f"records: at most 4 entries allowed, got {len(data)}")
    records = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise ParseError(f"records[{i}]: expected an object with input and output")
        vecs = {}
        for key in ("input", "output"):
            if key not in entry:
                raise ParseError(f"records[{i}].{key}: missing field")
            vecs[key] = _vector(entry[key], f"records[{i}].{key}", (3,))
        try:
            records.append(TransformationRecord(vecs["input"], vecs["output"]))
        except InvalidStateError as exc:
            raise ParseError(f"records[{i}]: {exc}") from exc
    tol = meta.get("tolerance")
    if tol is not None:
        if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not math.isfinite(tol) or tol < 0:
            raise ParseError("metadata.tolerance: expected a non-negative number")
        tol = float(tol)
    label = meta.get("label")
    if label is not None and not isinstance(label, str):
        raise ParseError("metadata.label: expected a string")
    return RecordFile(tuple(records), label, tol, dict(meta))


def parse_channel(source) -> AffineChannel:
    """Parse a channel file from a path or a JSON string."""
    data = _load_json(source)
    if not isinstance(data, dict):
        raise ParseError("channel: expected an object with t and E, or matrix")
    if "matrix" in data:
        m = _vector(data["matrix"], "matrix", (4, 4))
        if not np.array_equal(m[0], [1.0, 0.0, 0.0, 0.0]):
            raise ParseError(f"matrix: first row must be (1, 0, 0, 0), got {m[0].tolist()}")
        return AffineChannel.from_matrix(m)
    for key in ("t", "E"):
        if key not in data:
            raise ParseError(f"{key}: missing field")
    return AffineChannel(_vector(data["t"], "t", (3,)), _vector(data["E"], "E", (3, 3)))


def channel_to_dict(ch: AffineChannel) -> dict:
    return {"t": ch.t.tolist(), "E": ch.E.tolist()}


def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x}")
    if x == 0.0:
        return "0.0"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(str(k)) + ": " + _emit(v, indent, level + 1) for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _emit(obj, indent, 0)


def cloud_csv(points: np.ndarray) -> str:
    lines = ["x,y,z"]
    lines.extend(",".join(format_float(float(v)) for v in row) for row in np.asarray(points, float))
    return "\n".join(lines) + "\n"
