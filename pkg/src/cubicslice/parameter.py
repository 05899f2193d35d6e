"""Parameter slices of the cubic family at fixed multiplier lam.

Cells live in the a = b**2 plane by default (the b plane double covers it
through the conjugacy z -> -z). For each cell both critical orbits are run
through the escape test; when |lam| < 1 a cell is additionally flagged when
both critical orbits converge to the attracting fixed point 0, which is the
computable stand-in for membership in the principal hyperbolic component.

Critical points are labelled so that the label does not depend on which
square root of a is used: the two roots c of 3z**2 + 2bz + lam are ordered
by the value of b*c, which is unchanged under (b, c) -> (-b, -c).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .dynamics import BOUNDED, DEFAULT_MAX_ITER, Window, iterate_orbits, map_rows

__all__ = [
    "SliceClass",
    "SliceSpec",
    "SliceRaster",
    "WindowTooSmall",
    "PHD_TOLERANCE",
    "render_slice",
    "imr_heuristic",
    "slice_critical_points",
]

PHD_TOLERANCE = 1e-8


class SliceClass(enum.IntEnum):
    BOTH_BOUNDED = 0
    FIRST_ESCAPES = 1
    SECOND_ESCAPES = 2
    BOTH_ESCAPE = 3


class WindowTooSmall(ValueError):
    reason = "WindowTooSmall"


@dataclass(frozen=True)
class SliceSpec:
    lam: complex
    window: Window
    resolution: tuple[int, int]
    max_iter: int = DEFAULT_MAX_ITER
    plane: str = "a"
    branch: int = 1
    """Sign of the square root taken for b = +-sqrt(a); only meaningful in the a plane."""

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", complex(self.lam))
        w, h = self.resolution
        if w < 1 or h < 1:
            raise ValueError("resolution must be at least 1x1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.plane not in ("a", "b"):
            raise ValueError("plane must be 'a' or 'b'")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")

    @property
    def phd_enabled(self) -> bool:
        return abs(self.lam) < 1


@dataclass
class SliceRaster:
    spec: SliceSpec
    classes: np.ndarray
    escape_first: np.ndarray
    escape_second: np.ndarray
    phd: np.ndarray | None
    metadata: dict = field(default_factory=dict)

    @property
    def both_bounded(self) -> np.ndarray:
        return self.classes == SliceClass.BOTH_BOUNDED

    @property
    def fastest_escape(self) -> np.ndarray:
        """Escape iteration of the faster-escaping critical orbit (BOUNDED if neither escapes)."""
        e0 = np.where(self.escape_first == BOUNDED, np.iinfo(np.int32).max, self.escape_first)
        e1 = np.where(self.escape_second == BOUNDED, np.iinfo(np.int32).max, self.escape_second)
        out = np.minimum(e0, e1)
        return np.where(out == np.iinfo(np.int32).max, BOUNDED, out).astype(np.int32)


def slice_critical_points(b: np.ndarray, lam: complex) -> tuple[np.ndarray, np.ndarray]:
    """Critical points of lam z + b z**2 + z**3, labelled by the order of b*c."""
    s = np.sqrt(b * b - 3.0 * lam)
    c0 = (-b + s) / 3.0
    c1 = (-b - s) / 3.0
    k0, k1 = b * c0, b * c1
    swap = (k1.real < k0.real) | ((k1.real == k0.real) & (k1.imag < k0.imag))
    return np.where(swap, c1, c0), np.where(swap, c0, c1)


def render_slice(spec: SliceSpec, threads: int | None = None) -> SliceRaster:
    width, height = spec.resolution
    lam = spec.lam
    zero_tol = PHD_TOLERANCE if spec.phd_enabled else None

    def work(rows: slice):
        p = spec.window.grid(width, height, rows)
        if spec.plane == "a":
            b = spec.branch * np.sqrt(p)
        else:
            b = p
        c0, c1 = slice_critical_points(b, lam)
        radius = np.maximum(2.0, 1.0 + abs(lam) + np.abs(b))
        z0 = np.concatenate([c0, c1])
        esc, conv = iterate_orbits(
            z0, lam, np.concatenate([b, b]), np.concatenate([radius, radius]),
            spec.max_iter, zero_tol,
        )
        n = c0.shape[0]
        return esc[:n], esc[n:], conv[:n], conv[n:]

    parts = map_rows(work, height, threads)
    e0 = np.vstack([p[0] for p in parts])
    e1 = np.vstack([p[1] for p in parts])
    classes = np.full(e0.shape, SliceClass.BOTH_BOUNDED, dtype=np.int8)
    classes[(e0 != BOUNDED) & (e1 == BOUNDED)] = SliceClass.FIRST_ESCAPES
    classes[(e0 == BOUNDED) & (e1 != BOUNDED)] = SliceClass.SECOND_ESCAPES
    classes[(e0 != BOUNDED) & (e1 != BOUNDED)] = SliceClass.BOTH_ESCAPE
    phd = None
    if spec.phd_enabled:
        v0 = np.vstack([p[2] for p in parts])
        v1 = np.vstack([p[3] for p in parts])
        phd = (v0 >= 0) & (v1 >= 0)
    meta = {
        "phd_layer": "enabled" if phd is not None else "disabled (|lambda| >= 1)",
        "phd_tolerance": PHD_TOLERANCE,
        "phd_note": "pixel proxy; fidelity near the boundary of the principal component is unquantified",
    }
    return SliceRaster(spec, classes, e0, e1, phd, meta)


def imr_heuristic(raster: SliceRaster) -> np.ndarray:
    """Mark the unbounded complementary component of the phd region.

    The complement of the phd mask is labelled with 4-connectivity; every
    component touching the window border is marked. Raises
    :class:`WindowTooSmall` if the phd region itself reaches the border.
    """
    if raster.phd is None:
        raise ValueError("the phd layer is only computed for |lambda| < 1")
    phd = raster.phd
    border = np.zeros_like(phd)
    border[0, :] = border[-1, :] = True
    border[:, 0] = border[:, -1] = True
    if (phd & border).any():
        raise WindowTooSmall("phd region touches the window boundary")
    labels, _ = ndimage.label(~phd)
    outer = np.unique(labels[border & ~phd])
    outer = outer[outer != 0]
    return np.isin(labels, outer)
