"""Synthetic reflectivity scenes.

A scene description is a plain dict (usually loaded from JSON)::

    {"width": 128, "height": 128, "background": 1.0,
     "shapes": [{"type": "rect", "box": [r0, c0, r1, c1], "value": 10.0},
                {"type": "gradient", "box": [...], "from": 0.1, "to": 1.0,
                 "axis": "col"},
                {"type": "hline", "row": 40, "cols": [c0, c1], "value": 10.0},
                {"type": "vline", "col": 40, "rows": [r0, r1], "value": 0.1},
                {"type": "point", "at": [r, c], "value": 100.0}],
     "changes": [{"box": [r0, c0, r1, c1], "dates": [5, 6], "gain": 4.0}]}

Boxes are half-open ``[row0, col0, row1, col1)``. Shapes are painted in order.
"""
from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .stack import ChangeEvent


def render_scene(desc: dict) -> np.ndarray:
    try:
        h, w = int(desc["height"]), int(desc["width"])
    except KeyError as exc:
        raise ConfigurationError(f"scene lacks {exc.args[0]!r}") from None
    v = np.full((h, w), float(desc.get("background", 1.0)))
    for shape in desc.get("shapes", []):
        kind = shape.get("type")
        if kind == "rect":
            r0, c0, r1, c1 = shape["box"]
            v[r0:r1, c0:c1] = shape["value"]
        elif kind == "gradient":
            r0, c0, r1, c1 = shape["box"]
            along_cols = shape.get("axis", "col") == "col"
            n = (c1 - c0) if along_cols else (r1 - r0)
            # geometric ramp: linear in dB
            ramp = np.geomspace(shape["from"], shape["to"], n)
            v[r0:r1, c0:c1] = ramp[None, :] if along_cols else ramp[:, None]
        elif kind == "hline":
            c0, c1 = shape.get("cols", (0, w))
            v[shape["row"], c0:c1] = shape["value"]
        elif kind == "vline":
            r0, r1 = shape.get("rows", (0, h))
            v[r0:r1, shape["col"]] = shape["value"]
        elif kind == "point":
            r, c = shape["at"]
            v[r, c] = shape["value"]
        else:
            raise ConfigurationError(f"unknown scene shape {kind!r}")
    if np.any(v <= 0):
        raise ConfigurationError("scene reflectivities must be > 0")
    return v.astype(np.float32)


def scene_changes(desc: dict) -> list[ChangeEvent]:
    return [ChangeEvent(tuple(c["box"]), tuple(c["dates"]), float(c["gain"]))
            for c in desc.get("changes", [])]


def reference_scene_description(size: int = 128) -> dict:
    """Piecewise-constant blocks from 0.1 to 10 (20 dB) crossed by 1-pixel lines."""
    if size < 32:
        raise ConfigurationError("the reference scene needs size >= 32")
    q = size // 4
    shapes = [
        {"type": "rect", "box": [0, 0, 2 * q, 2 * q], "value": 0.1},
        {"type": "rect", "box": [0, 2 * q, 2 * q, size], "value": 3.0},
        {"type": "rect", "box": [2 * q, 0, size, 2 * q], "value": 10.0},
        {"type": "rect", "box": [2 * q, 2 * q, size, size], "value": 0.3},
        {"type": "rect", "box": [q // 2, q // 2, q + q // 2, q + q // 2], "value": 1.0},
        {"type": "rect", "box": [2 * q + q // 2, 2 * q + q // 2, 3 * q + q // 2, 3 * q + q // 2],
         "value": 3.0},
    ]
    for k, row in enumerate(range(q // 4, size, q // 2)):
        shapes.append({"type": "hline", "row": row, "cols": [0, size],
                       "value": 10.0 if k % 2 == 0 else 0.1})
    for k, col in enumerate(range(q // 3, size, q)):
        shapes.append({"type": "vline", "col": col, "rows": [0, size],
                       "value": 0.1 if k % 2 == 0 else 10.0})
    step = max(1, q // 8)
    for k in range(4):
        shapes.append({"type": "point", "at": [3 * q + 2 + step * k, 2 * q + q // 4 + step * k],
                       "value": 10.0})
    # rows between two horizontal lines, columns between two vertical lines
    region = [2 * q + q // 4 + 1 + q // 2, q // 3 + 1, 3 * q + q // 4, q // 3 + q]
    return {"width": size, "height": size, "background": 1.0, "shapes": shapes,
            "homogeneous_region": region}


def reference_scene(size: int = 128) -> np.ndarray:
    return render_scene(reference_scene_description(size))
