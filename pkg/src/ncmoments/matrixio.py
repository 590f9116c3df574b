"""Matrix JSON files and full-precision JSON/CSV output.

A matrix file looks like::

    {"n": 2, "entries": [[{"re": 1, "im": 0}, {"re": 1, "im": 0}],
                          [{"re": 0, "im": 0}, {"re": 1, "im": 0}]]}

Floats are written with 17 significant digits, which round-trips every
IEEE double exactly, so a matrix written here re-parses bit-for-bit.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, List, Mapping

import numpy as np


class MatrixParseError(ValueError):
    """Malformed matrix document; the message names the offending location."""

    def __init__(self, message: str, source: str = "<matrix>", row=None, col=None):
        where = source
        if row is not None:
            where += f": row {row}"
            if col is not None:
                where += f", column {col}"
        super().__init__(f"{where}: {message}")
        self.source = source
        self.row = row
        self.col = col


def _number(value, source, i, j, part):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MatrixParseError(f"'{part}' must be a number, got {value!r}", source, i, j)
    x = float(value)
    if not math.isfinite(x):
        raise MatrixParseError(f"'{part}' is not finite", source, i, j)
    return x


def matrix_from_dict(doc: Any, source: str = "<matrix>") -> np.ndarray:
    """Decode ``{"n", "entries"}``.  Row and column numbers in errors are 1-based."""
    if not isinstance(doc, Mapping):
        raise MatrixParseError("top level must be an object with 'n' and 'entries'", source)
    for key in ("n", "entries"):
        if key not in doc:
            raise MatrixParseError(f"missing key '{key}'", source)
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise MatrixParseError(f"'n' must be a positive integer, got {n!r}", source)
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != n:
        got = len(rows) if isinstance(rows, list) else type(rows).__name__
        raise MatrixParseError(f"'entries' must hold {n} rows, got {got}", source)
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(rows, start=1):
        if not isinstance(row, list) or len(row) != n:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise MatrixParseError(f"expected {n} entries, got {got}", source, i)
        for j, cell in enumerate(row, start=1):
            if isinstance(cell, Mapping):
                extra = set(cell) - {"re", "im"}
                if "re" not in cell or extra:
                    raise MatrixParseError("entry must be {\"re\": x, \"im\": y}", source, i, j)
                re = _number(cell["re"], source, i, j, "re")
                im = _number(cell.get("im", 0.0), source, i, j, "im")
            else:
                re, im = _number(cell, source, i, j, "re"), 0.0
            out[i - 1, j - 1] = complex(re, im)
    return out


def loads_matrix(text: str, source: str = "<matrix>") -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                               f"{exc.msg}", source) from None
    return matrix_from_dict(doc, source)


def read_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return loads_matrix(fh.read(), str(path))


def complex_to_dict(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def matrix_to_dict(A) -> dict:
    A = np.asarray(A, dtype=np.complex128)
    return {"n": int(A.shape[0]),
            "entries": [[complex_to_dict(z) for z in row] for row in A]}


# -- serialisation -------------------------------------------------------------------

def to_plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays, complex numbers and objects with ``to_dict``."""
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    if isinstance(obj, Mapping):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2 and obj.shape[0] == obj.shape[1] and np.iscomplexobj(obj):
            return matrix_to_dict(obj)
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_dict(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _dump(obj, out: List[str], indent: int, level: int):
    if indent:
        pad, end, sep = "\n" + " " * (indent * (level + 1)), "\n" + " " * (indent * level), ","
    else:
        pad, end, sep = "", "", ", "
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, Mapping):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for k, (key, val) in enumerate(obj.items()):
            out.append((sep if k else "") + pad + json.dumps(key) + ": ")
            _dump(val, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        scalar = all(not isinstance(v, (list, Mapping)) for v in obj)
        small = all(isinstance(v, Mapping) and len(v) <= 2 and
                    all(not isinstance(x, (list, Mapping)) for x in v.values()) for v in obj)
        if scalar or small:
            out.append("[")
            for k, v in enumerate(obj):
                out.append(", " if k else "")
                _dump(v, out, 0, 0)
            out.append("]")
            return
        out.append("[")
        for k, v in enumerate(obj):
            out.append((sep if k else "") + pad)
            _dump(v, out, indent, level + 1)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON with 17-significant-digit floats (``indent=0``: one line)."""
    parts: List[str] = []
    _dump(to_plain(obj), parts, indent, 0)
    if indent == 0:
        return "".join(parts)
    return "".join(parts) + "\n"


def flatten(obj: Any, prefix: str = "") -> dict:
    """Nested mappings to ``{"a.b": value}``; lists become ``a.0``, ``a.1``..."""
    plain = to_plain(obj)
    flat = {}
    if isinstance(plain, Mapping):
        items = plain.items()
    elif isinstance(plain, list):
        items = ((str(i), v) for i, v in enumerate(plain))
    else:
        return {prefix or "value": plain}
    for k, v in items:
        key = f"{prefix}.{k}" if prefix else str(k)
        if isinstance(v, (Mapping, list)) and v:
            flat.update(flatten(v, key))
        else:
            flat[key] = v
    return flat


def to_csv(rows: Iterable[Any], columns=None) -> str:
    """One CSV line per row; ``columns`` fixes the order (default: first-seen)."""
    flat_rows = [flatten(r) for r in rows]
    if columns is None:
        columns = []
        for fr in flat_rows:
            columns.extend(k for k in fr if k not in columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for fr in flat_rows:
        w.writerow(["" if fr.get(c) is None else
                    (_fmt_float(fr[c]) if isinstance(fr.get(c), float) else fr[c])
                    for c in columns])
    return buf.getvalue()
