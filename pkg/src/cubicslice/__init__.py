"""Cubic polynomials lam*z + b*z**2 + z**3 with a fixed point at 0.

Exact angle dynamics and invariant quadratic gaps of the tripling map,
escape-time rendering of dynamical and parameter planes, external rays,
and a checker for the backward-stability sequence inequality.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .angle import Arc, RationalAngle, orbit, orbit_structure, preimages, sigma
from .dynamics import CubicMap, Window, escape_test, green_function, julia_raster
from .lamination import Chord, DegenerateGap, InvalidMajor, Major, QuadGap, classify_major, tau
from .parameter import SliceSpec, imr_heuristic, render_slice
from .rays import landing_estimate, trace_external_ray
from .seqlemma import SeqSpec, check_contraction, simulate

__all__ = [
    "Arc",
    "RationalAngle",
    "orbit",
    "orbit_structure",
    "preimages",
    "sigma",
    "CubicMap",
    "Window",
    "escape_test",
    "green_function",
    "julia_raster",
    "Chord",
    "DegenerateGap",
    "InvalidMajor",
    "Major",
    "QuadGap",
    "classify_major",
    "tau",
    "SliceSpec",
    "imr_heuristic",
    "render_slice",
    "landing_estimate",
    "trace_external_ray",
    "SeqSpec",
    "check_contraction",
    "simulate",
]
