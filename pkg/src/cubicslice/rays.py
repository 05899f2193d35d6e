"""External rays of the cubic family traced by Newton continuation.

A point of potential t on the ray of argument alpha satisfies, for n large,

    f^n(z) = phi^-1(exp(3**n t + 2 pi i 3**n alpha)),

with phi the Boettcher coordinate at infinity. For the monic cubic
phi^-1(w) = w - b/3 + O(1/w), and the O(1/w) term is negligible once
3**n t exceeds ``log(_TARGET_MODULUS)``. The argument 3**n alpha is computed
exactly on the circle before converting to floating point.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .angle import RationalAngle, sigma_iter
from .dynamics import CubicMap

__all__ = [
    "RayTrace",
    "NewtonDivergence",
    "trace_external_ray",
    "landing_estimate",
    "potential_schedule",
]

_TARGET_MODULUS = 1e8
_LOG_TARGET = math.log(_TARGET_MODULUS)
NEWTON_BUDGET = 50
TRUST_FACTOR = 10.0
_AGREEMENT = 0.5
_MAX_BISECTIONS = 12


class NewtonDivergence(RuntimeError):
    def __init__(self, step: int, detail: str):
        self.step = step
        super().__init__(f"NewtonDivergence at step {step}: {detail}")


@dataclass
class RayTrace:
    angle: RationalAngle
    points: list[complex] = field(default_factory=list)
    potentials: list[float] = field(default_factory=list)
    newton_iterations: list[int] = field(default_factory=list)
    error: NewtonDivergence | None = None

    @property
    def truncated(self) -> bool:
        return self.error is not None

    def __len__(self) -> int:
        return len(self.points)

    def rows(self):
        """(step, potential, re, im) tuples."""
        for k, (z, t) in enumerate(zip(self.points, self.potentials)):
            yield k, t, z.real, z.imag


def potential_schedule(t_start: float, t_end: float, steps: int) -> list[float]:
    """Geometric levels t_k = t_start (t_end/t_start)**(k/steps), k = 0..steps."""
    ratio = t_end / t_start
    out = [t_start * ratio ** (k / steps) for k in range(steps + 1)]
    out[-1] = t_end
    return out


def _target(m: CubicMap, alpha: RationalAngle, t: float) -> tuple[int, complex]:
    n = 0
    scale = 1.0
    while scale * t < _LOG_TARGET:
        n += 1
        scale *= 3.0
    arg = float(sigma_iter(3, alpha, n))
    w = cmath.exp(complex(scale * t, 2.0 * math.pi * arg))
    return n, w - m.b / 3.0


def _iterate_with_derivative(m: CubicMap, z: complex, n: int) -> tuple[complex, complex]:
    d = 1.0 + 0j
    for _ in range(n):
        d *= m.derivative(z)
        z = m(z)
    return z, d


def _newton(m, z, n, w, budget, tol):
    """Damped Newton for f^n(z) = w; returns (root, iterations) or None."""
    fz, dz = _iterate_with_derivative(m, z, n)
    res = abs(fz - w)
    for it in range(1, budget + 1):
        if dz == 0:
            return None
        step = (fz - w) / dz
        lam = 1.0
        while True:
            cand = z - lam * step
            fc, dc = _iterate_with_derivative(m, cand, n)
            rc = abs(fc - w)
            if math.isfinite(rc) and (rc < res or lam < 1e-3):
                break
            lam *= 0.5
        z, fz, dz, res = cand, fc, dc, rc
        if abs(lam * step) <= tol * max(1.0, abs(z)):
            return z, it
    return None


def _advance(m, alpha, z, t_prev, t, budget, tol, depth=0):
    """Move the ray point ``z`` at potential ``t_prev`` to potential ``t``.

    Predictor: Euler step along the ray, using d/dt f^n(z) = 3**n (f^n(z) + b/3).
    The corrector result is accepted only when it stays close to the
    prediction; otherwise the potential step is bisected.
    """
    n, w = _target(m, alpha, t)
    fz, dz = _iterate_with_derivative(m, z, n)
    if dz == 0 or not math.isfinite(abs(fz)):
        return None
    guess = z + 3.0**n * (fz + m.b / 3.0) / dz * (t - t_prev)
    found = _newton(m, guess, n, w, budget, tol)
    if found is not None:
        new_z, its = found
        if abs(new_z - guess) <= _AGREEMENT * abs(guess - z):
            return new_z, its
    if depth >= _MAX_BISECTIONS:
        return None
    mid = math.sqrt(t_prev * t)
    half = _advance(m, alpha, z, t_prev, mid, budget, tol, depth + 1)
    if half is None:
        return None
    rest = _advance(m, alpha, half[0], mid, t, budget, tol, depth + 1)
    if rest is None:
        return None
    return rest[0], half[1] + rest[1]


def trace_external_ray(
    m: CubicMap,
    alpha: RationalAngle,
    t_start: float | None = None,
    t_end: float = 1e-3,
    steps: int = 200,
    newton_budget: int = NEWTON_BUDGET,
    tol: float = 1e-14,
) -> RayTrace:
    """Sample the external ray of argument ``alpha`` on a geometric potential schedule.

    Each sample is obtained from the previous one by a tangent predictor and a
    damped Newton corrector; steps on which the two disagree are bisected
    internally, which keeps the trace on one branch. A failed corrector, or a
    sample farther than ten times the previous step from its predecessor,
    truncates the trace and records a :class:`NewtonDivergence` in ``trace.error``.
    """
    R = m.escape_radius
    if t_start is None:
        t_start = math.log(R) + 1.0
    if not t_start > t_end > 0:
        raise ValueError("need t_start > t_end > 0")
    if math.exp(t_start) < R:
        raise ValueError(f"starting modulus exp({t_start}) is below the escape radius {R}")
    if steps < 1:
        raise ValueError("steps must be positive")

    trace = RayTrace(alpha)
    levels = potential_schedule(t_start, t_end, steps)
    z = None
    prev_step = None
    for k, t in enumerate(levels):
        if z is None:
            # seed: leading-order inverse Boettcher estimate
            n, w = _target(m, alpha, t)
            guess = -m.b / 3.0 + cmath.exp(complex(t, 2.0 * math.pi * float(alpha)))
            found = _newton(m, guess, n, w, newton_budget, tol)
        else:
            found = _advance(m, alpha, z, levels[k - 1], t, newton_budget, tol)
        if found is None:
            trace.error = NewtonDivergence(k, "corrector failed to converge on a consistent branch")
            break
        new_z, its = found
        if z is not None:
            jump = abs(new_z - z)
            if prev_step is not None and jump > TRUST_FACTOR * prev_step:
                trace.error = NewtonDivergence(
                    k, f"jump {jump:.3g} exceeds trust radius {TRUST_FACTOR * prev_step:.3g}"
                )
                break
            prev_step = jump
        z = new_z
        trace.points.append(z)
        trace.potentials.append(t)
        trace.newton_iterations.append(its)
    return trace


def landing_estimate(trace: RayTrace, tol: float = 1e-6) -> tuple[complex, bool]:
    """Last sample and whether the tail over the last decade of potential is within ``tol``.

    A truncated trace is never reported as converged.
    """
    if len(trace.points) < 2:
        raise ValueError("landing estimate needs at least two samples")
    last = trace.points[-1]
    if trace.truncated:
        return last, False
    t_last = trace.potentials[-1]
    tail = [z for z, t in zip(trace.points, trace.potentials) if t <= 10.0 * t_last]
    if len(tail) < 2:
        tail = trace.points[-2:]
    spread = max(abs(z - last) for z in tail)
    return last, spread <= tol
