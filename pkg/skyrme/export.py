"""Bit-stable CSV / JSON / SVG writers. Every file is written to a temp file and renamed."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, Union

import numpy as np

from .logging_config import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


def fmt_float(x: Any) -> str:
    """Shortest repr that parses back to the same double; locale-independent."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def atomic_write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug("wrote %s (%d bytes)", path, len(text))
    return path


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_float(v) for v in row])
    return buf.getvalue()


def write_csv(path: PathLike, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    return atomic_write_text(path, csv_text(columns, rows))


def write_columns(path: PathLike, columns: Mapping[str, np.ndarray]) -> Path:
    """One CSV row per array index."""
    names = list(columns)
    arrays = [np.asarray(columns[n]).ravel() for n in names]
    return write_csv(path, names, zip(*arrays))


def _json_safe(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else fmt_float(v)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def json_text(body: Any) -> str:
    return json.dumps(_json_safe(body), sort_keys=True, indent=2) + "\n"


def write_json(path: PathLike, body: Any) -> Path:
    return atomic_write_text(path, json_text(body))


def svg_polyline(x: Sequence[float], y: Sequence[float], title: str, x_label: str = "t",
                 width: int = 640, height: int = 360) -> str:
    """Single-series line plot; non-finite points are dropped."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    pad = 40
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n'
            f'<rect width="{width}" height="{height}" fill="white"/>\n'
            f'<text x="{pad}" y="20" font-family="monospace" font-size="14">{title}</text>\n')
    if x.size == 0:
        return head + "</svg>\n"
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    sx = (width - 2 * pad) / (x1 - x0) if x1 > x0 else 0.0
    sy = (height - 2 * pad) / (y1 - y0) if y1 > y0 else 0.0
    px = pad + (x - x0) * sx
    py = height - pad - (y - y0) * sy
    points = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    axes = (f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>\n'
            f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>\n'
            f'<text x="{width - pad}" y="{height - 10}" font-family="monospace" font-size="12" '
            f'text-anchor="end">{x_label} in [{x0:.4g}, {x1:.4g}]</text>\n'
            f'<text x="{pad + 4}" y="{pad - 6}" font-family="monospace" font-size="12">'
            f'[{y0:.6g}, {y1:.6g}]</text>\n')
    line = f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{points}"/>\n'
    return head + axes + line + "</svg>\n"


def write_svg(path: PathLike, x: Sequence[float], y: Sequence[float], title: str) -> Path:
    return atomic_write_text(path, svg_polyline(x, y, title))
