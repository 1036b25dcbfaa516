"""On-disk formats: RDIM rasters, JSON stack manifests, PGM previews.

RDIM layout (little-endian)::

    offset  size  field
    0       4     magic b"RDIM"
    4       4     u32 format version (1)
    8       4     u32 width
    12      4     u32 height
    16      4     u32 dtype tag (1 = float32)
    20      4*w*h float32 pixels, row-major
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    BadMagicError,
    DimensionError,
    DimensionOverflowError,
    DuplicateDateError,
    FormatError,
    ManifestError,
    MissingFileError,
    TruncatedError,
    UnsupportedVersionError,
)
from .stack import ChangeEvent, Rect, Stack

RASTER_MAGIC = b"RDIM"
RASTER_VERSION = 1
DTYPE_FLOAT32 = 1
_RASTER_HEADER = struct.Struct("<4sIIII")
MAX_PIXELS = 1 << 31


def write_raster(path, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.ndim != 2 or image.size == 0:
        raise DimensionError("rasters are non-empty 2-D arrays")
    h, w = image.shape
    header = _RASTER_HEADER.pack(RASTER_MAGIC, RASTER_VERSION, w, h, DTYPE_FLOAT32)
    Path(path).write_bytes(header + np.ascontiguousarray(image, dtype="<f4").tobytes())


def read_raster(path) -> np.ndarray:
    """Read an RDIM file into a native-endian float32 array of shape (height, width)."""
    raw = Path(path).read_bytes()
    if raw[:4] != RASTER_MAGIC:
        raise BadMagicError(f"{path}: bad magic {raw[:4]!r}")
    if len(raw) < _RASTER_HEADER.size:
        raise TruncatedError(f"{path}: truncated header")
    _, version, w, h, dtype = _RASTER_HEADER.unpack_from(raw)
    if version != RASTER_VERSION:
        raise UnsupportedVersionError(f"{path}: raster version {version}")
    if dtype != DTYPE_FLOAT32:
        raise UnsupportedVersionError(f"{path}: unsupported dtype tag {dtype}")
    if w == 0 or h == 0:
        raise FormatError(f"{path}: empty raster {w}x{h}")
    if w * h >= MAX_PIXELS:
        raise DimensionOverflowError(f"{path}: {w}x{h} exceeds {MAX_PIXELS} pixels")
    payload = len(raw) - _RASTER_HEADER.size
    if payload != 4 * w * h:
        raise TruncatedError(f"{path}: payload of {payload} bytes, header declares {4 * w * h}")
    data = np.frombuffer(raw, dtype="<f4", offset=_RASTER_HEADER.size).reshape(h, w)
    return data.astype(np.float32)


@dataclass
class StackManifest:
    """Ordered date/raster entries of a co-registered stack.

    Paths are stored as written and resolved relative to ``root``.
    """

    stack_id: str
    looks: float
    entries: list[tuple[str, str]]
    homogeneous_region: Optional[Rect] = None
    changes: list[dict] = field(default_factory=list)
    root: Path = field(default=Path("."), compare=False)

    def resolve(self, rel: str) -> Path:
        return self.root / rel

    def to_dict(self) -> dict:
        return {
            "stack_id": self.stack_id,
            "looks": self.looks,
            "entries": [{"date": d, "path": p} for d, p in self.entries],
            "homogeneous_region": list(self.homogeneous_region) if self.homogeneous_region else None,
            "changes": self.changes,
        }


def write_manifest(path, manifest: StackManifest) -> None:
    Path(path).write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")


def load_manifest(path) -> StackManifest:
    """Parse and validate a manifest; every referenced raster must exist."""
    path = Path(path)
    if not path.exists():
        raise MissingFileError(f"manifest {path} not found")
    try:
        doc = json.loads(path.read_text())
        entries = [(str(e["date"]), str(e["path"])) for e in doc["entries"]]
        looks = float(doc.get("looks", 1.0))
        region = doc.get("homogeneous_region")
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ManifestError(f"{path}: malformed manifest ({exc})") from None
    if len(entries) < 2:
        raise ManifestError(f"{path}: a stack needs at least 2 entries")
    dates = [d for d, _ in entries]
    dupes = sorted({d for d in dates if dates.count(d) > 1})
    if dupes:
        raise DuplicateDateError(f"{path}: duplicate dates {dupes}")
    m = StackManifest(str(doc.get("stack_id", path.stem)), looks, entries,
                      tuple(region) if region else None, list(doc.get("changes") or []),
                      path.parent)
    missing = [p for _, p in entries if not m.resolve(p).exists()]
    if missing:
        raise MissingFileError(f"{path}: missing rasters {missing}")
    return m


def load_stack(manifest: StackManifest) -> Stack:
    images = [read_raster(manifest.resolve(p)) for _, p in manifest.entries]
    if len({im.shape for im in images}) != 1:
        raise DimensionError("stack rasters have different dimensions")
    changes = [ChangeEvent(tuple(c["box"]), tuple(c["dates"]), float(c["gain"]))
               for c in manifest.changes]
    return Stack(np.stack(images), tuple(d for d, _ in manifest.entries), manifest.looks, changes)


def save_stack(directory, stack: Stack, stack_id: str = "stack",
               homogeneous_region: Optional[Rect] = None) -> Path:
    """Write one raster per date plus ``manifest.json``; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for date, image in zip(stack.dates, stack.images):
        name = f"{date}.rdim"
        write_raster(directory / name, image)
        entries.append((date, name))
    changes = [{"box": list(c.region), "dates": list(c.dates), "gain": c.gain}
               for c in stack.changes if not isinstance(c.region, np.ndarray)]
    manifest = StackManifest(stack_id, float(stack.looks), entries, homogeneous_region,
                             changes, directory)
    out = directory / "manifest.json"
    write_manifest(out, manifest)
    return out


def preview_levels(image: np.ndarray, gamma_stretch: float = 1.0) -> np.ndarray:
    """8-bit display levels: amplitude, 1-99 percentile clip, then gamma."""
    amp = np.sqrt(np.maximum(np.asarray(image, dtype=np.float64), 0.0))
    lo, hi = np.percentile(amp, [1, 99])
    if hi <= lo:
        return np.full(amp.shape, 128, dtype=np.uint8)
    x = np.clip((amp - lo) / (hi - lo), 0.0, 1.0) ** gamma_stretch
    return np.round(255 * x).astype(np.uint8)


def export_preview(image: np.ndarray, path, gamma_stretch: float = 1.0) -> None:
    """Write a binary PGM (P5) amplitude preview of an intensity image."""
    levels = preview_levels(image, gamma_stretch)
    h, w = levels.shape
    Path(path).write_bytes(f"P5\n{w} {h}\n255\n".encode() + levels.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read back a PGM written by :func:`export_preview` (no comment lines)."""
    magic, dims, _maxval, data = Path(path).read_bytes().split(b"\n", 3)
    if magic != b"P5":
        raise BadMagicError(f"{path}: not a binary PGM")
    w, h = (int(x) for x in dims.split())
    return np.frombuffer(data, dtype=np.uint8, count=w * h).reshape(h, w)
