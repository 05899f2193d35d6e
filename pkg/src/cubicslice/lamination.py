"""Chords, majors and invariant quadratic gaps of angle tripling.

The vertex set ("basis") of the gap attached to a major is computed as the
set of rational angles whose forward sigma_3 orbit never enters the open
major hole. The collapse map ``tau`` sends the basis onto the circle,
identifying the endpoints of the major and of its pullback edges, and
conjugates tripling on the basis with doubling.

Evaluation of ``tau`` uses the two tau-fibres over the doubling fixed point 0
and its other preimage 1/2: a basis point has binary digit 0 when it lies on
the positively oriented arc from the 0-fibre to the 1/2-fibre, and digit 1 on
the other arc. Orbits are finite, so the result is an exact dyadic or
eventually periodic binary rational.
"""
from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .angle import (
    Arc,
    RationalAngle,
    arc_length,
    circular_sorted,
    in_open_arc,
    orbit,
    preimages,
    sigma,
)

__all__ = [
    "Chord",
    "MajorKind",
    "InvalidReason",
    "InvalidMajor",
    "DegenerateGap",
    "NotInBasis",
    "Major",
    "QuadGap",
    "chord_image",
    "classify_major",
    "in_gap_basis",
    "gap_basis_members",
    "tau",
    "quadratic_argument_of_ray",
]

THIRD = Fraction(1, 3)
HALF = Fraction(1, 2)


@dataclass(frozen=True, slots=True)
class Chord:
    """Chord of the unit circle with distinct rational endpoints (unordered)."""

    a: RationalAngle
    b: RationalAngle

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError(f"chord endpoints must be distinct, got {self.a} twice")
        if self.b < self.a:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @classmethod
    def parse(cls, text: str) -> Chord:
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"chord must be two angles 'p/q,r/s', got {text!r}")
        return cls(RationalAngle.parse(parts[0]), RationalAngle.parse(parts[1]))

    @property
    def endpoints(self) -> tuple[RationalAngle, RationalAngle]:
        return self.a, self.b

    def __contains__(self, x: RationalAngle) -> bool:
        return x == self.a or x == self.b

    def __str__(self) -> str:
        return f"{{{self.a},{self.b}}}"


ChordImage = Union[Chord, RationalAngle]


def chord_image(c: Chord) -> ChordImage:
    """Image chord under tripling, or the common image point of a critical chord."""
    x, y = sigma(3, c.a), sigma(3, c.b)
    if x == y:
        return x
    return Chord(x, y)


class MajorKind(enum.Enum):
    REGULAR_CRITICAL = "RegularCritical"
    PERIODIC = "Periodic"


class InvalidReason(enum.Enum):
    HOLE_TOO_SHORT = "HoleTooShort"
    HOLE_TOO_LONG = "HoleTooLong"
    NOT_CRITICAL_NOT_PERIODIC = "NotCriticalNotPeriodic"


class InvalidMajor(ValueError):
    """Raised by :func:`classify_major`; ``reason`` is an :class:`InvalidReason`."""

    def __init__(self, reason: InvalidReason, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason.value}: {detail}" if detail else reason.value)


class DegenerateGap(ValueError):
    """The orbit-avoidance basis of a major does not form a quadratic gap."""

    reason = "NotQuadraticGap"


class NotInBasis(ValueError):
    reason = "NotInBasis"


@dataclass(frozen=True, slots=True)
class Major:
    chord: Chord
    hole: Arc
    kind: MajorKind
    period: int | None = None

    @property
    def hole_length(self) -> Fraction:
        return self.hole.length

    def to_json(self) -> dict:
        out = {
            "endpoints": [str(self.chord.a), str(self.chord.b)],
            "hole": [str(self.hole.start), str(self.hole.end)],
            "hole_length": str(self.hole_length),
            "kind": self.kind.value,
        }
        if self.period is not None:
            out["period"] = self.period
        return out


def _chord_period(c: Chord) -> int | None:
    # an angle is tripling-periodic iff its denominator is prime to 3, and a
    # chord with two periodic endpoints is periodic (tripling is injective on
    # periodic angles, so such a chord never degenerates)
    if c.a.den % 3 == 0 or c.b.den % 3 == 0:
        return None
    current: ChordImage = chord_image(c)
    k = 1
    while current != c:
        current = chord_image(current)
        k += 1
    return k


def classify_major(c: Chord, hole: Arc) -> Major:
    """Validate a candidate major and determine its type.

    Raises :class:`InvalidMajor` when the hole length is outside [1/3, 1/2] or
    the chord is neither critical nor periodic, and ``ValueError`` when the hole
    endpoints are not the chord endpoints.
    """
    if {hole.start, hole.end} != {c.a, c.b}:
        raise ValueError(f"hole {hole} does not join the endpoints of chord {c}")
    length = hole.length
    if length < THIRD:
        raise InvalidMajor(InvalidReason.HOLE_TOO_SHORT, f"hole length {length} < 1/3")
    if length > HALF:
        raise InvalidMajor(InvalidReason.HOLE_TOO_LONG, f"hole length {length} > 1/2")
    if isinstance(chord_image(c), RationalAngle):
        return Major(c, hole, MajorKind.REGULAR_CRITICAL)
    period = _chord_period(c)
    if period is None:
        raise InvalidMajor(
            InvalidReason.NOT_CRITICAL_NOT_PERIODIC,
            f"chord {c} is neither critical nor periodic under tripling",
        )
    return Major(c, hole, MajorKind.PERIODIC, period)


def in_gap_basis(m: Major, a: RationalAngle) -> bool:
    """True iff the forward tripling orbit of ``a`` never enters the open hole."""
    seen: set[RationalAngle] = set()
    x = a
    while x not in seen:
        if in_open_arc(x, m.hole):
            return False
        seen.add(x)
        x = sigma(3, x)
    return True


def _candidate_angles(denominator_bound: int):
    from math import gcd

    for q in range(1, denominator_bound + 1):
        for p in range(q):
            if gcd(p, q) == 1:
                yield RationalAngle(p, q)


def gap_basis_members(m: Major, denominator_bound: int) -> list[RationalAngle]:
    """All basis angles with denominator <= bound, in increasing order from 0."""
    if denominator_bound < 1:
        raise ValueError("denominator bound must be positive")
    return sorted(a for a in _candidate_angles(denominator_bound) if in_gap_basis(m, a))


def _open_arc_meets_basis(hole: Arc, start: RationalAngle, length: Fraction) -> bool:
    """Does the open arc (start, start+length) contain a basis point?

    Assumes both hole endpoints belong to the basis. An open arc that neither
    sits inside the hole nor contains a hole endpoint is disjoint from the hole;
    while it is shorter than 1/3 tripling maps it homeomorphically onto an arc
    three times as long, so the loop ends after O(log 1/length) steps.
    """
    h0 = hole.start.fraction
    hl = hole.length
    h1 = hole.end.fraction
    s, length = start.fraction, Fraction(length)
    while True:
        if (s - h0) % 1 + length <= hl:
            return False
        if (s - h1) % 1 + length > 1 - hl:
            # overlaps the hole without being inside it: a hole endpoint is interior
            return True
        if length >= THIRD:
            return True
        s = (3 * s) % 1
        length *= 3


class _Fibre:
    """One or two consecutive basis points collapsed to a single tau value."""

    __slots__ = ("points",)

    def __init__(self, points: list[RationalAngle]):
        self.points = points


@dataclass(eq=False)
class QuadGap:
    """Invariant quadratic gap determined by its major.

    Construction checks that the orbit-avoidance basis actually carries the
    structure of a quadratic gap (orbit of the major made of edges, a single
    fixed fibre, a fibre over 1/2 that is a point or an edge) and raises
    :class:`DegenerateGap` otherwise.
    """

    major: Major
    _memo: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self) -> None:
        m = self.major
        for e in m.chord.endpoints:
            if not in_gap_basis(m, e):
                raise DegenerateGap(f"major endpoint {e} is not in the basis")
        if m.kind is MajorKind.REGULAR_CRITICAL:
            if any(x in m.chord for x in orbit(3, sigma(3, m.chord.a))):
                # pullbacks of the major along the cycle share endpoints with it,
                # so the basis acquires chains of edges and isolated points
                raise DegenerateGap(f"critical major {m.chord} has periodic endpoints")
        else:
            current = chord_image(m.chord)
            while current != m.chord:
                assert isinstance(current, Chord)
                if not self.is_edge(current):
                    raise DegenerateGap(
                        f"image chord {current} of the major is not an edge of the basis"
                    )
                current = chord_image(current)
        zero_fibre = self._fixed_fibre()
        half_fibre = self._half_fibre(zero_fibre)
        self._zero = frozenset(zero_fibre)
        self._half = frozenset(half_fibre)
        self._zero_arc, self._one_arc = self._digit_arcs(zero_fibre, half_fibre)
        self._self_check()

    # -- structure -------------------------------------------------------

    def contains(self, a: RationalAngle) -> bool:
        key = ("b", a)
        hit = self._memo.get(key)
        if hit is None:
            hit = in_gap_basis(self.major, a)
            with self._lock:
                self._memo[key] = hit
        return hit

    def basis_members(self, denominator_bound: int) -> list[RationalAngle]:
        key = ("members", denominator_bound)
        hit = self._memo.get(key)
        if hit is None:
            hit = [a for a in _candidate_angles(denominator_bound) if self.contains(a)]
            hit.sort()
            with self._lock:
                self._memo[key] = hit
        return list(hit)

    def is_edge(self, c: Chord) -> bool:
        """True iff both endpoints are basis points and one side holds no basis point."""
        if not (self.contains(c.a) and self.contains(c.b)):
            return False
        hole = self.major.hole
        forward = _open_arc_meets_basis(hole, c.a, arc_length(c.a, c.b))
        backward = _open_arc_meets_basis(hole, c.b, arc_length(c.b, c.a))
        return forward != backward

    def edges(self, depth: int) -> list[Chord]:
        """The major and its iterated pullbacks (up to ``depth``) that are edges."""
        found = [self.major.chord]
        frontier = [self.major.chord]
        seen = {self.major.chord}
        for _ in range(depth):
            nxt = []
            for e in frontier:
                for x in preimages(3, e.a):
                    for y in preimages(3, e.b):
                        c = Chord(x, y)
                        if c not in seen and self.is_edge(c):
                            seen.add(c)
                            nxt.append(c)
            found.extend(nxt)
            frontier = nxt
        return found

    def _fixed_fibre(self) -> list[RationalAngle]:
        m = self.major
        fixed = [p for p in (RationalAngle(0), RationalAngle(1, 2)) if self.contains(p)]
        if chord_image(m.chord) == m.chord:
            stray = [p for p in fixed if p not in m.chord]
            if stray:
                raise DegenerateGap(f"invariant major and a separate fixed basis point {stray[0]}")
            return list(m.chord.endpoints)
        if len(fixed) != 1:
            raise DegenerateGap(f"expected one fixed basis point, found {len(fixed)}")
        p = fixed[0]
        if p in m.chord:
            if m.kind is MajorKind.PERIODIC:
                raise DegenerateGap("periodic major through a fixed point")
            return list(m.chord.endpoints)
        return [p]

    def _half_fibre(self, zero_fibre: list[RationalAngle]) -> list[RationalAngle]:
        cands = []
        for z in zero_fibre:
            for y in preimages(3, z):
                if y not in zero_fibre and y not in cands and self.contains(y):
                    cands.append(y)
        if len(cands) == 1:
            return cands
        if len(cands) == 2 and self.is_edge(Chord(cands[0], cands[1])):
            return cands
        raise DegenerateGap(
            f"fibre over 1/2 is not a point or an edge: {[str(c) for c in cands]}"
        )

    @staticmethod
    def _digit_arcs(zero_fibre, half_fibre) -> tuple[Arc, Arc]:
        pts = circular_sorted(list(zero_fibre) + list(half_fibre))
        n = len(pts)
        zs = set(zero_fibre)
        # rotate so the list reads: zero block, then half block
        for i in range(n):
            if pts[i] in zs and pts[i - 1] not in zs:
                pts = pts[i:] + pts[:i]
                break
        nz = len(zero_fibre)
        if set(pts[:nz]) != zs:
            raise DegenerateGap("fibres over 0 and 1/2 interleave")
        return Arc(pts[nz - 1], pts[nz]), Arc(pts[-1], pts[0])

    # -- tau -------------------------------------------------------------

    def tau(self, a: RationalAngle) -> RationalAngle:
        if not self.contains(a):
            raise NotInBasis(f"{a} is not in the basis of the gap with major {self.major.chord}")
        key = ("t", a)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        value = self._tau_uncached(a)
        with self._lock:
            self._memo[key] = value
        return value

    def _tau_uncached(self, a: RationalAngle) -> RationalAngle:
        digits: list[int] = []
        index: dict[RationalAngle, int] = {}
        x = a
        while True:
            if x in self._zero or x in self._half:
                tail = Fraction(0) if x in self._zero else HALF
                return RationalAngle.from_fraction(_dyadic(digits) + tail / 2 ** len(digits))
            if x in index:
                j = index[x]
                period = len(digits) - j
                head = _dyadic(digits[:j])
                word = int("".join(map(str, digits[j:])), 2)
                cycle = Fraction(word, 2**period - 1) / 2**j
                return RationalAngle.from_fraction(head + cycle)
            index[x] = len(digits)
            if in_open_arc(x, self._zero_arc):
                digits.append(0)
            elif in_open_arc(x, self._one_arc):
                digits.append(1)
            else:  # pragma: no cover - excluded by the edge checks at construction
                raise DegenerateGap(f"basis point {x} lies inside a collapsed fibre")
            x = sigma(3, x)

    def tau_table(self, denominator_bound: int) -> list[tuple[RationalAngle, RationalAngle]]:
        return [(a, self.tau(a)) for a in self.basis_members(denominator_bound)]

    def _self_check(self) -> None:
        m = self.major.chord
        ta, tb = self.tau(m.a), self.tau(m.b)
        if ta != tb:
            raise DegenerateGap(f"tau does not collapse the major: {ta} != {tb}")
        image = chord_image(m)
        ends = [image] if isinstance(image, RationalAngle) else list(image.endpoints)
        for y in ends:
            if self.tau(y) != sigma(2, ta):
                raise DegenerateGap("tau fails to conjugate tripling and doubling on the major")

    def to_json(self, denominator_bound: int) -> dict:
        table = self.tau_table(denominator_bound)
        return {
            "major": self.major.to_json(),
            "basis": [str(a) for a, _ in table],
            "tau_table": [[str(a), str(t)] for a, t in table],
        }


def _dyadic(digits: list[int]) -> Fraction:
    if not digits:
        return Fraction(0)
    return Fraction(int("".join(map(str, digits)), 2), 2 ** len(digits))


def tau(g: QuadGap, a: RationalAngle) -> RationalAngle:
    return g.tau(a)


def quadratic_argument_of_ray(g: QuadGap, gamma: RationalAngle) -> RationalAngle:
    """Doubling-circle argument of a ray landing in the quadratic-like Julia set.

    Combinatorially this is tau of the ray's argument.
    """
    return g.tau(gamma)
