"""JSON and CSV emission shared by every module.

Exact rationals are written as ``"num/den"`` strings, never floats, so that a
weights file round-trips bit for bit.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np


def fraction_to_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def str_to_fraction(s: str) -> Fraction:
    num, sep, den = s.partition("/")
    if not sep:
        raise ValueError(f"expected 'num/den', got {s!r}")
    return Fraction(int(num), int(den))


def to_jsonable(obj: Any) -> Any:
    """Convert report objects into plain JSON types."""
    if isinstance(obj, Fraction):
        return fraction_to_str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f) or math.isinf(f):
            return str(f)
        return f
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int | None = None) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=indent, ensure_ascii=False)


def ndjson_lines(records: Iterable[Any]) -> Iterable[str]:
    for rec in records:
        yield dumps(rec) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")  # RFC 4180 line endings
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
