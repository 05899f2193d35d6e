"""Exact rational points of the circle R/Z and the maps x -> d*x mod 1.

Angles are stored fully reduced modulo 1 with arbitrary-precision integers,
so equality tests are exact. Everything here is a pure function of its
arguments.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

__all__ = [
    "RationalAngle",
    "Arc",
    "sigma",
    "sigma_iter",
    "preimages",
    "orbit",
    "orbit_structure",
    "in_open_arc",
    "in_closed_arc",
    "parse_angle",
    "arc_length",
    "circular_sorted",
    "ZERO",
]

_DEGREES = (2, 3)


def _check_degree(d: int) -> None:
    if d not in _DEGREES:
        raise ValueError(f"degree must be 2 or 3, got {d!r}")


@dataclass(frozen=True, slots=True)
class RationalAngle:
    """A point p/q of R/Z with 0 <= p < q and gcd(p, q) = 1.

    The constructor accepts any integer pair and reduces it, so
    ``RationalAngle(5, 4) == RationalAngle(1, 4)``.
    """

    num: int
    den: int = 1

    def __post_init__(self) -> None:
        num, den = self.num, self.den
        if not isinstance(num, int) or not isinstance(den, int):
            raise TypeError("numerator and denominator must be integers")
        if den == 0:
            raise ZeroDivisionError("angle denominator is zero")
        if den < 0:
            num, den = -num, -den
        num %= den
        g = gcd(num, den)
        object.__setattr__(self, "num", num // g)
        object.__setattr__(self, "den", den // g)

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> RationalAngle:
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @classmethod
    def parse(cls, text: str) -> RationalAngle:
        """Parse ``"p/q"`` (or a bare integer) into a reduced angle."""
        s = text.strip()
        if not s:
            raise ValueError("empty angle")
        if "/" in s:
            p, _, q = s.partition("/")
            try:
                num, den = int(p), int(q)
            except ValueError:
                raise ValueError(f"malformed angle {text!r}; expected p/q") from None
        else:
            try:
                num, den = int(s), 1
            except ValueError:
                raise ValueError(f"malformed angle {text!r}; expected p/q") from None
        if den == 0:
            raise ValueError(f"zero denominator in angle {text!r}")
        return cls(num, den)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __float__(self) -> float:
        return self.num / self.den

    def __lt__(self, other: RationalAngle) -> bool:
        return self.num * other.den < other.num * self.den

    def __le__(self, other: RationalAngle) -> bool:
        return self.num * other.den <= other.num * self.den

    def __gt__(self, other: RationalAngle) -> bool:
        return other < self

    def __ge__(self, other: RationalAngle) -> bool:
        return other <= self

    def __add__(self, other: RationalAngle | Fraction | int) -> RationalAngle:
        if isinstance(other, RationalAngle):
            other = other.fraction
        return RationalAngle.from_fraction(self.fraction + Fraction(other))

    def __sub__(self, other: RationalAngle | Fraction | int) -> RationalAngle:
        if isinstance(other, RationalAngle):
            other = other.fraction
        return RationalAngle.from_fraction(self.fraction - Fraction(other))

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"

    def __repr__(self) -> str:
        return f"RationalAngle({self.num}, {self.den})"


ZERO = RationalAngle(0)


def parse_angle(text: str) -> RationalAngle:
    return RationalAngle.parse(text)


def arc_length(start: RationalAngle, end: RationalAngle) -> Fraction:
    """Length of the positively oriented arc from ``start`` to ``end``.

    Returns 1 when the endpoints coincide (full circle convention).
    """
    if start == end:
        return Fraction(1)
    return (end.fraction - start.fraction) % 1


@dataclass(frozen=True, slots=True)
class Arc:
    """Positively oriented (counterclockwise) arc from ``start`` to ``end``."""

    start: RationalAngle
    end: RationalAngle

    @classmethod
    def parse(cls, text: str) -> Arc:
        """Parse ``"p/q,r/s"``."""
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"arc must be two angles 'p/q,r/s', got {text!r}")
        return cls(RationalAngle.parse(parts[0]), RationalAngle.parse(parts[1]))

    @property
    def length(self) -> Fraction:
        return arc_length(self.start, self.end)

    def complement(self) -> Arc:
        return Arc(self.end, self.start)

    def __contains__(self, x: RationalAngle) -> bool:
        return in_open_arc(x, self)

    def __str__(self) -> str:
        return f"({self.start},{self.end})"


def sigma(d: int, a: RationalAngle) -> RationalAngle:
    """Return d*a mod 1 for d in {2, 3}."""
    _check_degree(d)
    return RationalAngle(d * a.num, a.den)


def sigma_iter(d: int, a: RationalAngle, n: int) -> RationalAngle:
    """n-fold iterate of sigma_d, computed with one modular power."""
    _check_degree(d)
    if n < 0:
        raise ValueError("iterate count must be non-negative")
    return RationalAngle(pow(d, n, a.den) * a.num, a.den)


def preimages(d: int, a: RationalAngle) -> list[RationalAngle]:
    """All d preimages (a + k)/d, ascending in [0, 1).

    Since 0 <= a < 1 the representatives (a + k)/d are already increasing in
    k and lie in [0, 1), so no sorting is needed.
    """
    _check_degree(d)
    return [RationalAngle(a.num + k * a.den, d * a.den) for k in range(d)]


def orbit(d: int, a: RationalAngle) -> list[RationalAngle]:
    """Forward orbit a, sigma(a), ... up to (excluding) the first repeat."""
    _check_degree(d)
    seen: set[RationalAngle] = set()
    out: list[RationalAngle] = []
    x = a
    while x not in seen:
        seen.add(x)
        out.append(x)
        x = sigma(d, x)
    return out


def orbit_structure(d: int, a: RationalAngle) -> tuple[int, int]:
    """Return (preperiod, period) of a under sigma_d.

    Every rational angle is eventually periodic, so this always terminates.
    """
    _check_degree(d)
    first_seen: dict[RationalAngle, int] = {}
    x = a
    n = 0
    while x not in first_seen:
        first_seen[x] = n
        x = sigma(d, x)
        n += 1
    p = first_seen[x]
    return p, n - p


def in_open_arc(x: RationalAngle, arc: Arc) -> bool:
    """True iff x lies strictly inside the positively oriented arc."""
    if arc.start == arc.end:
        raise ValueError("open arc with coincident endpoints is undefined")
    s, e = arc.start.fraction, arc.end.fraction
    v = x.fraction
    if s < e:
        return s < v < e
    return v > s or v < e


def in_closed_arc(x: RationalAngle, arc: Arc) -> bool:
    return x == arc.start or x == arc.end or in_open_arc(x, arc)


def circular_sorted(angles, origin: RationalAngle = ZERO) -> list[RationalAngle]:
    """Sort angles by counterclockwise distance from ``origin``."""
    o = origin.fraction
    return sorted(angles, key=lambda t: (t.fraction - o) % 1)
