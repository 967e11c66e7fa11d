"""Canonical JSON for frames, dilations, certificates and reports.

Canonical form: sorted keys, two-space indent, floats written with 17
significant digits, infinities as the string ``"inf"``.  Parsing a canonical
document and writing it back reproduces it byte for byte.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
import re

import numpy as np

from ..errors import SchemaError
from ..frames import FramePair
from ..pspace import SpaceDesc

INF = "inf"


def _float(x):
    x = float(x)
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        return '"nan"'
    s = format(x, ".17g")
    if "." not in s and "e" not in s and "n" not in s:
        s += ".0"
    return s


def to_jsonable(obj):
    """Reduce numpy arrays, dataclasses and enums to JSON-compatible values."""
    if isinstance(obj, FramePair):
        return frame_to_dict(obj)
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, frozenset, set)):
        items = sorted(obj, key=str) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _emit(v, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(v, dict):
        if not v:
            out.append("{}")
            return
        out.append("{\n")
        for i, k in enumerate(sorted(v)):
            out.append(f"{pad}{json.dumps(k)}: ")
            _emit(v[k], indent, level + 1, out)
            out.append(",\n" if i < len(v) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(v, list):
        if not v:
            out.append("[]")
        elif all(not isinstance(x, (list, dict)) for x in v):
            out.append("[" + ", ".join(_scalar(x) for x in v) + "]")
        else:
            out.append("[\n")
            for i, x in enumerate(v):
                out.append(pad)
                _emit(x, indent, level + 1, out)
                out.append(",\n" if i < len(v) - 1 else "\n")
            out.append(end + "]")
    else:
        out.append(_scalar(v))


def _scalar(x):
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return _float(x)
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj, indent=2) -> str:
    out = []
    _emit(to_jsonable(obj), indent, 0, out)
    out.append("\n")
    return "".join(out)


def dump(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


# --- frames --------------------------------------------------------------------------


def _r_out(r):
    return INF if math.isinf(r) else float(r)


def frame_to_dict(f: FramePair) -> dict:
    if np.iscomplexobj(f.A) or np.iscomplexobj(f.Psi):
        raise TypeError("JSON frames hold real entries only")
    return {
        "p": float(f.p),
        "X": {"dim": f.d, "r": _r_out(f.X.norm_exp)},
        "Y": {"dim": f.e, "r": _r_out(f.Y.norm_exp)},
        "A": f.A.tolist(),
        "Psi": f.Psi.tolist(),
    }


def _line_of(text, key):
    if text is None:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _number(v, field, text):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(field, f"expected a number, got {v!r}", _line_of(text, field.split(".")[-1]))
    if not math.isfinite(v):
        raise SchemaError(field, "must be finite", _line_of(text, field.split(".")[-1]))
    return float(v)


def _space(doc, name, text):
    sp = doc.get(name)
    if not isinstance(sp, dict):
        raise SchemaError(name, "expected an object with 'dim' and 'r'", _line_of(text, name))
    dim = sp.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SchemaError(f"{name}.dim", f"expected a positive integer, got {dim!r}", _line_of(text, name))
    r = sp.get("r", 2.0)
    if r == INF:
        r = math.inf
    else:
        r = _number(r, f"{name}.r", text)
        if r < 1:
            raise SchemaError(f"{name}.r", f"norm exponent must be >= 1, got {r}", _line_of(text, name))
    return SpaceDesc(dim, r)


def _array(doc, name, shape3, text):
    if name not in doc:
        raise SchemaError(name, "missing", None)
    try:
        arr = np.array(doc[name], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(name, f"not a numeric array: {exc}", _line_of(text, name)) from exc
    if arr.ndim != 3 or arr.shape[1:] != shape3:
        raise SchemaError(name, f"expected shape (N, {shape3[0]}, {shape3[1]}), got {arr.shape}", _line_of(text, name))
    if not np.all(np.isfinite(arr)):
        raise SchemaError(name, "entries must be finite", _line_of(text, name))
    return arr


def frame_from_dict(doc, text=None) -> FramePair:
    if not isinstance(doc, dict):
        raise SchemaError("<root>", "expected a JSON object", 1)
    if "p" not in doc:
        raise SchemaError("p", "missing", None)
    p = doc["p"]
    if p == INF:
        raise SchemaError("p", "sequence exponent must be finite", _line_of(text, "p"))
    p = _number(p, "p", text)
    if p < 1:
        raise SchemaError("p", f"must satisfy 1 <= p < inf, got {p}", _line_of(text, "p"))
    X = _space(doc, "X", text)
    Y = _space(doc, "Y", text)
    A = _array(doc, "A", (Y.dim, X.dim), text)
    Psi = _array(doc, "Psi", (X.dim, Y.dim), text)
    if A.shape[0] != Psi.shape[0]:
        raise SchemaError("Psi", f"{Psi.shape[0]} synthesis blocks for {A.shape[0]} analysis blocks", _line_of(text, "Psi"))
    if A.shape[0] < 1:
        raise SchemaError("A", "needs at least one block", _line_of(text, "A"))
    return FramePair(A, Psi, p, X, Y)


def parse_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("<json>", exc.msg, exc.lineno) from exc


def loads_frame(text) -> FramePair:
    return frame_from_dict(parse_json(text), text)


def dumps_frame(f: FramePair) -> str:
    return dumps(frame_to_dict(f))


def load_frame(path) -> FramePair:
    with open(path, encoding="utf-8") as fh:
        return loads_frame(fh.read())


def load_frames(path):
    """A single frame, or a list of frames under the key ``"frames"``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    doc = parse_json(text)
    if isinstance(doc, dict) and "frames" in doc:
        return [frame_from_dict(d, text) for d in doc["frames"]]
    return frame_from_dict(doc, text)


def save_frame(f, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_frame(f))


def io_roundtrip(path) -> bool:
    """Parse and re-serialize ``path``; True when the file was canonical."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return dumps_frame(loads_frame(text)) == text


def dilation_to_dict(dil) -> dict:
    return {"dilated": frame_to_dict(dil.dilated), "embed": dil.embed.tolist(), "W_basis": dil.W_basis.tolist()}
