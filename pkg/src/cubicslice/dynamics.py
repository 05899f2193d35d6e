"""Iteration of the cubic family f(z) = lam*z + b*z**2 + z**3.

Double precision throughout. The escape radius used everywhere is
``max(2, 1 + |lam| + |b|)``: for |z| >= R,

    |f(z)| >= |z| (|z|**2 - |b||z| - |lam|) >= |z| (R + |lam|(R - 1)) >= 2|z|,

so an orbit that leaves the disk of radius R tends to infinity.

Rasters map pixel (row i, column j) of a W x H grid over a window with centre
c, width w and height h to the point

    c + (2j + 1 - W) / (2W) * w  +  1j * (H - 2i - 1) / (2H) * h,

i.e. pixel centres, row 0 at the top. For a window centred at 0 the map sends
(i, j) and (H-1-i, W-1-j) to exact negatives of each other.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CubicMap",
    "OrbitResult",
    "Window",
    "Raster",
    "BOUNDED",
    "escape_radius",
    "evaluate",
    "critical_points",
    "escape_test",
    "green_function",
    "julia_raster",
    "iterate_orbits",
    "default_threads",
]

BOUNDED = -1
"""Raster code for points that stayed bounded; escaped points store their escape iteration."""

DEFAULT_MAX_ITER = 1000
THREADS_ENV = "CUBICSLICE_THREADS"
_GREEN_BAILOUT = 1e12


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def escape_radius(lam: complex, b: complex) -> float:
    return max(2.0, 1.0 + abs(lam) + abs(b))


@dataclass(frozen=True)
class CubicMap:
    """The polynomial lam*z + b*z**2 + z**3 (fixed point 0 with multiplier lam)."""

    lam: complex
    b: complex = 0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "b", complex(self.b))

    def __call__(self, z: complex) -> complex:
        return z * (self.lam + z * (self.b + z))

    def derivative(self, z: complex) -> complex:
        return self.lam + z * (2 * self.b + 3 * z)

    @property
    def escape_radius(self) -> float:
        return escape_radius(self.lam, self.b)

    def critical_points(self) -> tuple[complex, complex]:
        return critical_points(self)

    def fixed_points(self) -> tuple[complex, complex, complex]:
        """0 and the two roots of z**2 + b z + lam - 1."""
        s = np.sqrt(complex(self.b * self.b - 4 * (self.lam - 1)))
        return 0j, complex((-self.b + s) / 2), complex((-self.b - s) / 2)


def evaluate(m: CubicMap, z: complex) -> complex:
    return m(z)


def critical_points(m: CubicMap) -> tuple[complex, complex]:
    """Roots of 3z**2 + 2bz + lam, the double root reported twice."""
    s = complex(np.sqrt(complex(m.b * m.b - 3 * m.lam)))
    return (-m.b + s) / 3, (-m.b - s) / 3


@dataclass(frozen=True)
class OrbitResult:
    escaped: bool
    iterations: int
    last_modulus: float

    @property
    def status(self) -> str:
        return f"Escaped({self.iterations})" if self.escaped else f"Bounded({self.iterations})"


def escape_test(
    m: CubicMap,
    z0: complex,
    max_iter: int = DEFAULT_MAX_ITER,
    radius: float | None = None,
) -> OrbitResult:
    """Iterate until the first |z_n| > radius (Escaped(n)) or max_iter steps (Bounded)."""
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    safe = m.escape_radius
    if radius is None:
        radius = safe
    elif radius < safe:
        raise ValueError(f"radius {radius} is below the safe escape radius {safe}")
    z = complex(z0)
    if abs(z) > radius:
        return OrbitResult(True, 0, abs(z))
    for n in range(1, max_iter + 1):
        z = m(z)
        if abs(z) > radius:
            return OrbitResult(True, n, abs(z))
    return OrbitResult(False, max_iter, abs(z))


def green_function(m: CubicMap, z: complex, depth: int = DEFAULT_MAX_ITER) -> float:
    """Escape-rate potential lim 3**-n log|f^n(z)|.

    Escape is searched for within ``depth`` iterations; once found the orbit is
    pushed on to modulus 1e12 so the truncation error is negligible. Returns 0
    when the orbit does not escape within ``depth``.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    R = m.escape_radius
    z = complex(z)
    n = 0
    while abs(z) <= R:
        if n == depth:
            return 0.0
        z = m(z)
        n += 1
    while abs(z) < _GREEN_BAILOUT:
        z = m(z)
        n += 1
    return math.log(abs(z)) / 3.0**n


@dataclass(frozen=True)
class Window:
    center: complex
    width: float
    height: float

    @classmethod
    def square(cls, radius: float, center: complex = 0j) -> Window:
        return cls(complex(center), 2.0 * radius, 2.0 * radius)

    @classmethod
    def parse(cls, text: str) -> Window:
        """Parse ``"cx,cy,w,h"``."""
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"window must be cx,cy,w,h, got {text!r}")
        cx, cy, w, h = parts
        if w <= 0 or h <= 0:
            raise ValueError("window width and height must be positive")
        return cls(complex(cx, cy), w, h)

    def grid(self, width_px: int, height_px: int, rows: slice | None = None) -> np.ndarray:
        """Complex pixel-centre coordinates, shape (rows, width_px)."""
        if width_px < 1 or height_px < 1:
            raise ValueError("resolution must be at least 1x1")
        j = np.arange(width_px, dtype=np.float64)
        i = np.arange(height_px, dtype=np.float64)
        if rows is not None:
            i = i[rows]
        x = (2.0 * j + 1.0 - width_px) / (2.0 * width_px) * self.width
        y = (height_px - 2.0 * i - 1.0) / (2.0 * height_px) * self.height
        return (self.center.real + x)[None, :] + 1j * (self.center.imag + y)[:, None]


@dataclass
class Raster:
    """Per-pixel classification: escape iteration, or BOUNDED (-1)."""

    window: Window
    width: int
    height: int
    codes: np.ndarray
    max_iter: int

    @property
    def bounded(self) -> np.ndarray:
        return self.codes == BOUNDED

    def points(self) -> np.ndarray:
        return self.window.grid(self.width, self.height)


def iterate_orbits(
    z0: np.ndarray,
    lam,
    b,
    radius,
    max_iter: int,
    zero_tol: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised escape test over flat arrays.

    ``lam``, ``b`` and ``radius`` are scalars or arrays matching ``z0``.
    Returns ``(escape, converged)``: the first n with |z_n| > radius (else
    BOUNDED), and, when ``zero_tol`` is given, the first n with
    |z_n| < zero_tol (else -1). Orbits that converge are retired as bounded.
    Each element is computed independently, so results do not depend on how
    the caller partitions the input.
    """
    z = np.array(z0, dtype=np.complex128).ravel()
    n_pts = z.size
    lam_a = np.broadcast_to(np.asarray(lam, dtype=np.complex128), z0.shape).ravel()
    b_a = np.broadcast_to(np.asarray(b, dtype=np.complex128), z0.shape).ravel()
    r2_a = np.broadcast_to(np.asarray(radius, dtype=np.float64) ** 2, z0.shape).ravel()
    tol2 = None if zero_tol is None else zero_tol * zero_tol

    escape = np.full(n_pts, BOUNDED, dtype=np.int32)
    converged = np.full(n_pts, -1, dtype=np.int32)
    idx = np.arange(n_pts)
    lam_v, b_v, r2_v = lam_a.copy(), b_a.copy(), r2_a.copy()

    def retire(n: int, mag2: np.ndarray) -> None:
        nonlocal idx, z, lam_v, b_v, r2_v
        out = mag2 > r2_v
        done = out
        if tol2 is not None:
            small = mag2 < tol2
            converged[idx[small]] = n
            done = out | small
        if done.any():
            escape[idx[out]] = n
            keep = ~done
            idx, z, lam_v, b_v, r2_v = idx[keep], z[keep], lam_v[keep], b_v[keep], r2_v[keep]

    with np.errstate(over="ignore", invalid="ignore"):
        retire(0, z.real * z.real + z.imag * z.imag)
        for n in range(1, max_iter + 1):
            if idx.size == 0:
                break
            z = z * (lam_v + z * (b_v + z))
            retire(n, z.real * z.real + z.imag * z.imag)
    return escape.reshape(z0.shape), converged.reshape(z0.shape)


def _row_chunks(height: int, threads: int) -> list[slice]:
    threads = max(1, min(threads, height))
    bounds = np.linspace(0, height, threads + 1).astype(int)
    return [slice(int(a), int(c)) for a, c in zip(bounds[:-1], bounds[1:]) if c > a]


def map_rows(fn, height: int, threads: int | None) -> list:
    """Apply ``fn(rows)`` over row chunks, in order, on a thread pool."""
    threads = default_threads() if threads is None else threads
    chunks = _row_chunks(height, threads)
    if len(chunks) == 1:
        return [fn(chunks[0])]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        return list(pool.map(fn, chunks))


def julia_raster(
    m: CubicMap,
    window: Window,
    resolution: tuple[int, int],
    max_iter: int = DEFAULT_MAX_ITER,
    threads: int | None = None,
) -> Raster:
    """Escape-time raster of the dynamical plane of ``m``."""
    width, height = resolution
    if width < 1 or height < 1:
        raise ValueError("resolution must be at least 1x1")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    R = m.escape_radius

    def work(rows: slice) -> np.ndarray:
        z0 = window.grid(width, height, rows)
        esc, _ = iterate_orbits(z0, m.lam, m.b, R, max_iter)
        return esc

    codes = np.vstack(map_rows(work, height, threads))
    return Raster(window, width, height, codes, max_iter)
