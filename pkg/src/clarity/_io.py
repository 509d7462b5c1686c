"""Small IO helpers: float formatting, CSV text and atomic file writes."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence


def fmt(value) -> str:
    """Round-trip float formatting with 17 significant digits."""
    if isinstance(value, (bool, str)):
        return str(value).lower() if isinstance(value, bool) else value
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def json_text(obj) -> str:
    def clean(o):
        if isinstance(o, dict):
            return {str(k): clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        if isinstance(o, float) and not math.isfinite(o):
            return fmt(o)
        if hasattr(o, "item"):
            return clean(o.item())
        return o
    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


def write_atomic(path, text: str) -> Path:
    """Write ``text`` to a temporary file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def parse_grid(text: str):
    """``a:b:n`` -> ``numpy.linspace(a, b, n)`` (inclusive endpoints)."""
    import numpy as np

    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like a:b:n, got {text!r}")
    a, b = float(parts[0]), float(parts[1])
    n = int(parts[2])
    if n < 1 or not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("grid needs finite endpoints and n >= 1")
    if n > 1 and b < a:
        raise ValueError("grid needs a <= b")
    return np.linspace(a, b, n)
