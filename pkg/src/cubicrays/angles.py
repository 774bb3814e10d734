"""Exact rational angle arithmetic on the circle R/Z.

Angles of external rays are rational numbers mod 1 and every combinatorial
question about them (periodicity under angle multiplication, coperiodicity,
membership in circular arcs) must be decided exactly.  Everything here is
built on integer arithmetic via fractions.Fraction; no floats.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Tuple


class Angle:
    """A point of R/Z represented by a reduced fraction in [0, 1)."""

    __slots__ = ("_f",)

    def __init__(self, numerator, denominator=None):
        if denominator is not None:
            f = Fraction(numerator, denominator)
        elif isinstance(numerator, Angle):
            f = numerator._f
        elif isinstance(numerator, str):
            f = Fraction(numerator)
        else:
            f = Fraction(numerator)
        self._f = f - (f.__floor__())  # reduce mod 1 into [0, 1)

    @property
    def numerator(self) -> int:
        return self._f.numerator

    @property
    def denominator(self) -> int:
        return self._f.denominator

    @property
    def frac(self) -> Fraction:
        return self._f

    def __add__(self, other) -> "Angle":
        return Angle(self._f + _coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "Angle":
        return Angle(self._f - _coerce(other))

    def __rsub__(self, other) -> "Angle":
        return Angle(_coerce(other) - self._f)

    def __mul__(self, k: int) -> "Angle":
        if not isinstance(k, int):
            raise TypeError("angles only scale by integers")
        return Angle(self._f * k)

    __rmul__ = __mul__

    def __neg__(self) -> "Angle":
        return Angle(-self._f)

    def __eq__(self, other) -> bool:
        try:
            return self._f == _coerce(other)
        except TypeError:
            return NotImplemented

    def __lt__(self, other) -> bool:
        return self._f < _coerce(other)

    def __le__(self, other) -> bool:
        return self._f <= _coerce(other)

    def __gt__(self, other) -> bool:
        return self._f > _coerce(other)

    def __ge__(self, other) -> bool:
        return self._f >= _coerce(other)

    def __hash__(self) -> int:
        return hash(self._f)

    def __float__(self) -> float:
        return self._f.numerator / self._f.denominator

    def __repr__(self) -> str:
        return f"Angle({self._f.numerator}/{self._f.denominator})"

    def __str__(self) -> str:
        return f"{self._f.numerator}/{self._f.denominator}"


def _coerce(x) -> Fraction:
    if isinstance(x, Angle):
        return x._f
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact angle")


ONE_THIRD = Angle(1, 3)
TWO_THIRDS = Angle(2, 3)


class AngleSet:
    """An ordered set of angles, kept sorted in circular order from 0."""

    __slots__ = ("_angles",)

    def __init__(self, angles: Iterable = ()):
        seen = sorted({Angle(t) for t in angles}, key=lambda t: t.frac)
        self._angles = tuple(seen)

    def __iter__(self) -> Iterator[Angle]:
        return iter(self._angles)

    def __len__(self) -> int:
        return len(self._angles)

    def __contains__(self, t) -> bool:
        return Angle(t) in set(self._angles)

    def __getitem__(self, i):
        return self._angles[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, AngleSet):
            return self._angles == other._angles
        if isinstance(other, (set, frozenset, list, tuple)):
            return self._angles == AngleSet(other)._angles
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._angles)

    def __or__(self, other) -> "AngleSet":
        return AngleSet(tuple(self) + tuple(AngleSet(other)))

    def __and__(self, other) -> "AngleSet":
        mine, theirs = set(self._angles), set(AngleSet(other)._angles)
        return AngleSet(mine & theirs)

    def __sub__(self, other) -> "AngleSet":
        mine, theirs = set(self._angles), set(AngleSet(other)._angles)
        return AngleSet(mine - theirs)

    def __repr__(self) -> str:
        return "AngleSet({" + ", ".join(str(t) for t in self._angles) + "})"

    def map(self, fn) -> "AngleSet":
        return AngleSet(fn(t) for t in self._angles)

    def to_csv(self, path) -> None:
        """Write numerator, denominator and a 12-digit decimal per angle."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["numerator", "denominator", "decimal"])
            for t in self._angles:
                w.writerow([t.numerator, t.denominator, f"{float(t):.12f}"])


def multiply_mod1(t, k: int) -> Angle:
    """k*t mod 1, exactly."""
    return Angle(t) * k


def exact_period(t, d: int = 3) -> Optional[int]:
    """Least q >= 1 with d^q * t == t mod 1, or None if t is preperiodic.

    t = n/m reduced is periodic under multiplication by d exactly when
    gcd(m, d) == 1, and then the exact period is the multiplicative order
    of d modulo m.
    """
    t = Angle(t)
    m = t.denominator
    from math import gcd

    if gcd(m, d) != 1:
        return None
    q, power = 1, d % m
    while power != 1 % m:
        power = (power * d) % m
        q += 1
    return q


def periodic_angles(q: int, d: int = 3) -> AngleSet:
    """All angles of exact period q under multiplication by d.

    They all have the form m/(d^q - 1); keep those whose exact period
    is q rather than a proper divisor.
    """
    if q < 1:
        raise ValueError("period must be >= 1")
    denom = d**q - 1
    out = []
    for m in range(denom):
        t = Angle(m, denom)
        if exact_period(t, d) == q:
            out.append(t)
    return AngleSet(out)


def coperiod_status(t, q: int) -> str:
    """How t sits relative to the period-q angles under tripling.

    Returns 'via_plus' if t + 1/3 has exact period q, 'via_minus' if
    t - 1/3 does, 'both' if both (impossible for tripling: the difference
    of the two shifted angles is 2/3, which never joins two angles with
    denominator dividing 3^q - 1), and 'none' otherwise.
    """
    t = Angle(t)
    plus = exact_period(t + ONE_THIRD, 3) == q
    minus = exact_period(t - ONE_THIRD, 3) == q
    if plus and minus:
        return "both"
    if plus:
        return "via_plus"
    if minus:
        return "via_minus"
    return "none"


def coperiodic_angles(q: int) -> AngleSet:
    """Angles t with t + 1/3 or t - 1/3 of exact period q under tripling."""
    base = periodic_angles(q, 3)
    shifted = [s - ONE_THIRD for s in base] + [s + ONE_THIRD for s in base]
    return AngleSet(shifted)


def basilica_index(t) -> Optional[int]:
    """Least n >= 0 with 2^n * t == 1/3 mod 1, or None.

    The angles with such an n are exactly the rationals whose reduced
    denominator is 3 * 2^n for some n >= 0 (including 1/3 and 2/3).
    """
    t = Angle(t)
    seen = set()
    n = 0
    while t not in seen:
        if t == ONE_THIRD:
            return n
        seen.add(t)
        t = t * 2
        n += 1
    return None


def is_basilica_angle(t) -> bool:
    return basilica_index(t) is not None


def preperiod_pair(t, d: int = 3) -> Tuple[int, int]:
    """Minimal (m, q) with d^m * t of exact period q under t -> d*t.

    Every rational angle is eventually periodic, so this always returns;
    m == 0 means t itself is periodic.
    """
    t = Angle(t)
    seen = {}
    n = 0
    while t not in seen:
        seen[t] = n
        t = t * d
        n += 1
    m = seen[t]
    return m, n - m


def in_open_arc(t, lo, hi) -> bool:
    """Exact membership of t in the open counterclockwise arc (lo, hi).

    The arc runs from lo counterclockwise (increasing angle) to hi; if
    lo == hi the arc is the full circle minus the point.
    """
    t, lo, hi = Angle(t), Angle(lo), Angle(hi)
    if lo == hi:
        return t != lo
    if lo < hi:
        return lo < t < hi
    return t > lo or t < hi


def arc_length(lo, hi) -> Fraction:
    """Length of the counterclockwise arc from lo to hi."""
    lo, hi = Angle(lo), Angle(hi)
    d = hi.frac - lo.frac
    return d if d >= 0 else d + 1


def circular_distance(s, t) -> Fraction:
    """Shorter-way distance between two angles."""
    d = arc_length(s, t)
    return min(d, 1 - d)
