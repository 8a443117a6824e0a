"""JSON artifacts: stable key order and 17-significant-digit floats."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .lie_so_n import SkewMatrix
from .rigid_body import RigidBody, make_body


class InputError(ValidationError):
    """Malformed input file; message carries file and line/field context."""


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    if not any(c in s for c in ".eE"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: dict insertion order kept, floats at 17 digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load_json(path: str | Path):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{p}: file not found")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InputError(f"{p}:{e.lineno}:{e.colno}: malformed JSON: {e.msg}") from None
    except UnicodeDecodeError as e:
        raise InputError(f"{p}: not UTF-8: {e}") from None


def _field(path, msg: str) -> InputError:
    return InputError(f"{path}: {msg}")


def _matrix(path, obj, name: str) -> np.ndarray:
    try:
        m = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise _field(path, f"field '{name}' must be a numeric matrix") from None
    return m


def body_from_json(obj, path="<body>") -> RigidBody:
    """``{"eigenvalues": [...]}`` (then S = Id) or ``{"C": [[...]]}``."""
    if not isinstance(obj, dict):
        raise _field(path, "body must be a JSON object")
    if "eigenvalues" in obj:
        lam = _matrix(path, obj["eigenvalues"], "eigenvalues")
        if lam.ndim != 1:
            raise _field(path, "field 'eigenvalues' must be a flat list")
        return make_body(np.diag(lam))
    if "C" in obj:
        return make_body(_matrix(path, obj["C"], "C"))
    raise _field(path, "body needs field 'eigenvalues' or 'C'")


def load_body(path) -> RigidBody:
    return body_from_json(load_json(path), path)


def skew_from_json(obj, path="<skew>", where: str = "") -> SkewMatrix:
    try:
        return SkewMatrix.from_json(obj)
    except (ValidationError, ValueError, TypeError) as e:
        raise _field(path, f"{where}{e}") from None


def load_skew(path) -> SkewMatrix:
    return skew_from_json(load_json(path), path)


def skew_list_from_json(obj, path="<list>", key: str = "directions") -> tuple[list[SkewMatrix], list]:
    """A list of skew matrices, bare or under ``key``; also returns the raw items."""
    if isinstance(obj, dict):
        if key not in obj:
            raise _field(path, f"expected field '{key}'")
        obj = obj[key]
    if not isinstance(obj, list) or not obj:
        raise _field(path, f"'{key}' must be a non-empty list")
    # a bare list of rows is one matrix, not a list
    if all(isinstance(r, list) and r and not isinstance(r[0], (list, dict)) for r in obj):
        raise _field(path, f"'{key}' must be a list of matrices, got a single matrix")
    return [skew_from_json(item, path, f"{key}[{i}]: ") for i, item in enumerate(obj)], obj


def load_schedule(path) -> np.ndarray:
    """``{"values": [[u_1 per segment], ..., [u_r per segment]]}`` or a bare list."""
    obj = load_json(path)
    if isinstance(obj, dict):
        if "values" not in obj:
            raise _field(path, "expected field 'values'")
        obj = obj["values"]
    m = _matrix(path, obj, "values")
    if m.ndim == 1:
        m = m[None]
    if m.ndim != 2 or not np.all(np.isfinite(m)):
        raise _field(path, "field 'values' must be a finite r x segments matrix")
    return m


def write_text(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
