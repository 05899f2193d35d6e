"""Raster output: binary PPM (P6), optional PNG, and CSV of integer codes.

Palette (RGB, 8 bit):

* escaped points are shaded by escape iteration n on a blue ramp,
  v = round(255 * (1 - log(1+n) / log(1+max_iter))), colour (v//2, v//2, 128 + v//2);
  slices use the faster-escaping critical orbit;
* bounded points of a Julia raster are black (0, 0, 0);
* cells of a slice where both critical orbits stay bounded are white (255, 255, 255);
* the phd layer paints its region solid orange (230, 120, 30);
* the imr layer hatches its cells green (40, 170, 70) on every pixel with (row + col) % 4 == 0.
"""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .dynamics import BOUNDED

__all__ = [
    "escape_shades",
    "julia_rgb",
    "slice_rgb",
    "write_ppm",
    "read_ppm",
    "write_png",
    "write_codes_csv",
]

BOUNDED_JULIA = (0, 0, 0)
BOTH_BOUNDED = (255, 255, 255)
PHD_COLOUR = (230, 120, 30)
IMR_COLOUR = (40, 170, 70)


def escape_shades(codes: np.ndarray, max_iter: int) -> np.ndarray:
    n = np.where(codes == BOUNDED, 0, codes).astype(np.float64)
    v = np.rint(255.0 * (1.0 - np.log1p(n) / math.log1p(max_iter))).astype(np.int32)
    v = np.clip(v, 0, 255)
    rgb = np.empty(codes.shape + (3,), dtype=np.uint8)
    rgb[..., 0] = v // 2
    rgb[..., 1] = v // 2
    rgb[..., 2] = 128 + v // 2
    return rgb


def julia_rgb(codes: np.ndarray, max_iter: int) -> np.ndarray:
    rgb = escape_shades(codes, max_iter)
    rgb[codes == BOUNDED] = BOUNDED_JULIA
    return rgb


def slice_rgb(raster, layer: str = "escape", imr: np.ndarray | None = None) -> np.ndarray:
    """Colour a :class:`~cubicslice.parameter.SliceRaster` for the given layer."""
    fastest = raster.fastest_escape
    rgb = escape_shades(fastest, raster.spec.max_iter)
    rgb[raster.both_bounded] = BOTH_BOUNDED
    if layer in ("phd", "imr") and raster.phd is not None:
        rgb[raster.phd] = PHD_COLOUR
    if layer == "imr":
        if imr is None:
            raise ValueError("imr layer needs the heuristic mask")
        rows, cols = np.indices(imr.shape)
        rgb[imr & ((rows + cols) % 4 == 0)] = IMR_COLOUR
    return rgb


def write_ppm(path: str | Path, rgb: np.ndarray) -> None:
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def read_ppm(path: str | Path) -> np.ndarray:
    """Read back a P6 file written by :func:`write_ppm`."""
    data = Path(path).read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    pos += 1
    if fields[0] != b"P6" or fields[3] != b"255":
        raise ValueError("not an 8-bit P6 file")
    w, h = int(fields[1]), int(fields[2])
    return np.frombuffer(data[pos : pos + w * h * 3], dtype=np.uint8).reshape(h, w, 3)


def write_png(path: str | Path, rgb: np.ndarray) -> None:
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise RuntimeError("PNG output needs Pillow (pip install 'artifact[png]')") from exc
    Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8), mode="RGB").save(path)


def write_codes_csv(path: str | Path, codes: np.ndarray) -> None:
    np.savetxt(path, codes, fmt="%d", delimiter=",")
