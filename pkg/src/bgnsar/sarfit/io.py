"""Reading intensity regions from csv, 16-bit PGM and raw float32 rasters."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DimensionError, EmptyRegionError, ParseError

__all__ = ["IntensityRegion", "FORMATS", "load_region", "read_image", "parse_rect", "write_csv"]

FORMATS = ("csv", "pgm16", "raw_f32le")


@dataclass(frozen=True)
class IntensityRegion:
    values: np.ndarray = field(repr=False)
    source: str = ""
    channel: str = ""
    rect: tuple[int, int, int, int] | None = None
    rejected: int = 0

    def __len__(self) -> int:
        return int(self.values.size)


def parse_rect(text: str) -> tuple[int, int, int, int]:
    """'x0,y0,w,h' -> tuple of ints."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ParseError(f"rect must be x0,y0,w,h; got {text!r}")
    try:
        x0, y0, w, h = (int(p) for p in parts)
    except ValueError as exc:
        raise ParseError(f"rect must hold integers; got {text!r}") from exc
    if x0 < 0 or y0 < 0 or w < 1 or h < 1:
        raise DimensionError(f"rect {text!r} must have x0, y0 >= 0 and positive size")
    return x0, y0, w, h


def _read_csv(path: Path) -> np.ndarray:
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            row = []
            for tok in text.split(","):
                tok = tok.strip()
                try:
                    row.append(float(tok))
                except ValueError as exc:
                    raise ParseError(f"{path}: line {lineno}: cannot parse {tok!r}") from exc
            if rows and len(row) != len(rows[0]):
                raise DimensionError(
                    f"{path}: line {lineno}: row has {len(row)} values, expected {len(rows[0])}")
            rows.append(row)
    if not rows:
        raise EmptyRegionError(f"{path}: no data")
    return np.array(rows, dtype=np.float64)


_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _read_pgm(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    pos = 0
    header = []
    for _ in range(4):
        m = _PGM_TOKEN.match(raw, pos)
        if m is None:
            raise ParseError(f"{path}: offset {pos}: truncated PGM header")
        header.append(m.group(1))
        pos = m.end()
    magic = header[0]
    if magic not in (b"P5", b"P2"):
        raise ParseError(f"{path}: offset 0: not a PGM file (magic {magic!r})")
    try:
        width, height, maxval = (int(t) for t in header[1:])
    except ValueError as exc:
        raise ParseError(f"{path}: offset {pos}: bad PGM header") from exc
    if width < 1 or height < 1 or not (0 < maxval < 65536):
        raise ParseError(f"{path}: offset {pos}: bad PGM dimensions or maxval")
    count = width * height
    if magic == b"P2":
        toks = raw[pos:].split()
        if len(toks) != count:
            raise DimensionError(f"{path}: expected {count} samples, found {len(toks)}")
        try:
            data = np.array([int(t) for t in toks], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(f"{path}: offset {pos}: non-integer sample") from exc
    else:
        # exactly one whitespace byte separates the header from the raster
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        if len(raw) - pos != need:
            raise DimensionError(f"{path}: offset {pos}: expected {need} raster bytes, found {len(raw) - pos}")
        data = np.frombuffer(raw, dtype=dtype, count=count, offset=pos).astype(np.float64)
    return data.reshape(height, width)


def _read_raw(path: Path, width: int | None, height: int | None) -> np.ndarray:
    if width is None or height is None:
        raise DimensionError("raw_f32le needs width and height")
    if width < 1 or height < 1:
        raise DimensionError("width and height must be positive")
    raw = path.read_bytes()
    need = 4 * width * height
    if len(raw) != need:
        raise DimensionError(f"{path}: expected {need} bytes for {width}x{height}, found {len(raw)}")
    return np.frombuffer(raw, dtype="<f4").astype(np.float64).reshape(height, width)


def read_image(path: str | Path, format: str, width: int | None = None,
               height: int | None = None) -> np.ndarray:
    """The full raster as a 2-d float array (csv with one value per line gives one column)."""
    path = Path(path)
    if format == "csv":
        return _read_csv(path)
    if format == "pgm16":
        return _read_pgm(path)
    if format in ("raw_f32le", "raw"):
        return _read_raw(path, width, height)
    raise ParseError(f"unknown format {format!r}; expected one of {FORMATS}")


def load_region(path: str | Path, format: str = "csv", rect: tuple[int, int, int, int] | None = None,
                channel: str = "", width: int | None = None, height: int | None = None) -> IntensityRegion:
    """Extract a rectangle (whole image by default), dropping nonpositive or non-finite pixels."""
    img = read_image(path, format, width, height)
    if rect is not None:
        x0, y0, w, h = rect
        if y0 + h > img.shape[0] or x0 + w > img.shape[1]:
            raise DimensionError(f"rect {rect} exceeds image of {img.shape[1]}x{img.shape[0]}")
        img = img[y0:y0 + h, x0:x0 + w]
    flat = img.ravel()
    keep = np.isfinite(flat) & (flat > 0.0)
    values = np.ascontiguousarray(flat[keep])
    if values.size == 0:
        raise EmptyRegionError(f"{path}: no positive pixels in the region")
    values.setflags(write=False)
    return IntensityRegion(values, str(path), channel, rect, int(flat.size - values.size))


def write_csv(region: IntensityRegion | np.ndarray, path: str | Path) -> None:
    """One value per line, written with repr so reloading is bit-exact."""
    vals = region.values if isinstance(region, IntensityRegion) else np.asarray(region, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for v in vals:
            fh.write(repr(float(v)) if math.isfinite(v) else "nan")
            fh.write("\n")
