"""Worst-case simulation of the backward-stability recursion.

A sequence s_n > 0 with s_{n+1} = q s_n at good subscripts and
s_{n+1} <= 2 q s_n + b at bad ones. Simulating with equality at bad steps
gives the pointwise largest such sequence for a given bad set, so its
behaviour at bad subscripts bounds every admissible sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "SeqSpec",
    "GapTooSmall",
    "ContractionReport",
    "simulate",
    "contraction_index",
    "check_contraction",
    "quadratic_schedule",
    "exponential_schedule",
    "constant_schedule",
]


class GapTooSmall(ValueError):
    reason = "GapTooSmall"

    def __init__(self, index: int, gap: int, needed: int):
        self.index = index
        self.gap = gap
        self.needed = needed
        super().__init__(f"GapTooSmall: pair {index} has gap {gap} < N = {needed}")


@dataclass(frozen=True)
class SeqSpec:
    q: float
    b: float
    s0: float
    bad: tuple[int, ...]
    n_max: int

    def __post_init__(self) -> None:
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")
        if self.b <= 0 or self.s0 <= 0:
            raise ValueError("b and s0 must be positive")
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        bad = tuple(int(n) for n in self.bad)
        if any(n < 0 for n in bad) or any(x >= y for x, y in zip(bad, bad[1:])):
            raise ValueError("bad subscripts must be non-negative and strictly increasing")
        object.__setattr__(self, "bad", bad)

    @property
    def bad_in_horizon(self) -> tuple[int, ...]:
        return tuple(n for n in self.bad if n <= self.n_max)


def quadratic_schedule(n_max: int) -> tuple[int, ...]:
    """Bad subscripts i**2 (i >= 1) up to n_max; gaps 2i+1 grow without bound."""
    return tuple(i * i for i in range(1, math.isqrt(n_max) + 1))


def exponential_schedule(n_max: int) -> tuple[int, ...]:
    out = []
    k = 0
    while 2**k <= n_max:
        out.append(2**k)
        k += 1
    return tuple(out)


def constant_schedule(n_max: int, gap: int = 1) -> tuple[int, ...]:
    return tuple(range(0, n_max + 1, gap))


def simulate(spec: SeqSpec) -> list[float]:
    """s_0 .. s_{n_max}, with equality 2 q s_n + b at bad subscripts."""
    bad = set(spec.bad)
    s = [spec.s0]
    for n in range(spec.n_max):
        prev = s[-1]
        s.append(2 * spec.q * prev + spec.b if n in bad else spec.q * prev)
    return s


def contraction_index(q: float, b: float, eps: float) -> int:
    """Smallest N >= 1 with q**N < 1/8 and q**(N-1) * b < eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = 1
    while not (q**n < 0.125 and q ** (n - 1) * b < eps):
        n += 1
    return n


@dataclass
class ContractionReport:
    q: float
    b: float
    eps: float
    N: int
    pairs: list[tuple[int, int, float, float, bool]] = field(default_factory=list)
    skipped: list[tuple[int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for *_, ok in self.pairs)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "b": self.b,
            "eps": self.eps,
            "N": self.N,
            "checked_pairs": len(self.pairs),
            "skipped_pairs": len(self.skipped),
            "passed": self.passed,
            "pairs": [
                {"n_i": a, "n_next": c, "s_i": si, "s_next": sn, "ok": ok}
                for a, c, si, sn, ok in self.pairs
            ],
        }


def check_contraction(spec: SeqSpec, eps: float, skip_small_gaps: bool = False) -> ContractionReport:
    """Check s_{n_{i+1}} <= s_{n_i}/4 + eps for consecutive bad subscripts.

    The inequality is only claimed for gaps n_{i+1} - n_i >= N. A smaller gap
    raises :class:`GapTooSmall`, or is recorded in ``skipped`` when
    ``skip_small_gaps`` is set.
    """
    N = contraction_index(spec.q, spec.b, eps)
    s = simulate(spec)
    bad = spec.bad_in_horizon
    report = ContractionReport(spec.q, spec.b, eps, N)
    for i, (n_i, n_next) in enumerate(zip(bad, bad[1:])):
        if n_next - n_i < N:
            if not skip_small_gaps:
                raise GapTooSmall(i, n_next - n_i, N)
            report.skipped.append((n_i, n_next))
            continue
        lhs, rhs = s[n_next], s[n_i] / 4 + eps
        report.pairs.append((n_i, n_next, s[n_i], lhs, lhs <= rhs))
    return report
