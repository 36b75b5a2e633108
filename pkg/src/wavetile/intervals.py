"""Exact interval arithmetic for dyadic and shifted-dyadic geometry.

All interval endpoints are held as ``fractions.Fraction`` (or ``+-inf`` floats
for half-lines), so containment and adjacency tests are exact.  Intervals are
half-open ``[lo, hi)`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rat = Union[Fraction, int]
Endpoint = Union[Fraction, float]  # float only for +-inf

THIRD_SHIFTS = (Fraction(0), Fraction(1, 3), Fraction(2, 3))


def as_fraction(x) -> Fraction:
    """Convert ``x`` to an exact Fraction (floats convert exactly)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"cannot convert {x} to a Fraction")
        return Fraction(x)
    raise TypeError(f"unsupported endpoint type {type(x)!r}")


def pow2(k: int) -> Fraction:
    """2**k as an exact Fraction, for any integer k."""
    return Fraction(2 ** k) if k >= 0 else Fraction(1, 2 ** (-k))


@dataclass(frozen=True)
class Interval:
    """Half-open interval [lo, hi); endpoints exact, possibly infinite."""

    lo: Endpoint
    hi: Endpoint

    def __post_init__(self):
        if self.finite_length() and self.lo >= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi})")

    # -- basic geometry -------------------------------------------------
    def finite_length(self) -> bool:
        return not (isinstance(self.lo, float) or isinstance(self.hi, float))

    @property
    def length(self) -> Fraction:
        if not self.finite_length():
            raise ValueError("length of a half-line")
        return self.hi - self.lo

    @property
    def center(self) -> Fraction:
        if not self.finite_length():
            raise ValueError("center of a half-line")
        return (self.lo + self.hi) / 2

    # -- membership and ordering ----------------------------------------
    def contains(self, x) -> bool:
        x = x if isinstance(x, (int, float, Fraction)) else as_fraction(x)
        return self.lo <= x < self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo < other.hi and other.lo < self.hi

    def intersection(self, other: "Interval") -> "Interval | None":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        return Interval(lo, hi) if lo < hi else None

    # -- derived intervals ------------------------------------------------
    def enlarge(self, c) -> "Interval":
        """c-dilation about the center (the C-enlargement c*I)."""
        c = Fraction(c) if not isinstance(c, Fraction) else c
        half = self.length * c / 2
        mid = self.center
        return Interval(mid - half, mid + half)

    def translate(self, a) -> "Interval":
        a = as_fraction(a)
        lo = self.lo + a if not isinstance(self.lo, float) else self.lo
        hi = self.hi + a if not isinstance(self.hi, float) else self.hi
        return Interval(lo, hi)

    def dilate_pow2(self, y: int) -> "Interval":
        """D_y I = {2^y * xi : xi in I}, dilation about the origin."""
        s = pow2(y)
        lo = self.lo * s if not isinstance(self.lo, float) else self.lo
        hi = self.hi * s if not isinstance(self.hi, float) else self.hi
        return Interval(lo, hi)

    def __repr__(self):
        return f"[{self.lo}, {self.hi})"


@dataclass(frozen=True)
class DyadicInterval:
    """[n*2^k, (n+1)*2^k) for integers n, k."""

    n: int
    k: int

    @property
    def lo(self) -> Fraction:
        return self.n * pow2(self.k)

    @property
    def hi(self) -> Fraction:
        return (self.n + 1) * pow2(self.k)

    @property
    def length(self) -> Fraction:
        return pow2(self.k)

    @property
    def center(self) -> Fraction:
        return (2 * self.n + 1) * pow2(self.k - 1)

    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    @property
    def parent(self) -> "DyadicInterval":
        return DyadicInterval(self.n >> 1, self.k + 1)

    @property
    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        return (DyadicInterval(2 * self.n, self.k - 1),
                DyadicInterval(2 * self.n + 1, self.k - 1))

    @property
    def left_child(self) -> "DyadicInterval":
        return self.children[0]

    @property
    def right_child(self) -> "DyadicInterval":
        return self.children[1]

    def is_left_child(self) -> bool:
        return self.n % 2 == 0

    def contains(self, x) -> bool:
        return self.interval().contains(x)

    def contains_interval(self, other) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def enlarge(self, c) -> Interval:
        return self.interval().enlarge(c)

    def translate(self, a) -> Interval:
        return self.interval().translate(a)

    def dilate_pow2(self, y: int) -> "DyadicInterval":
        return DyadicInterval(self.n, self.k + y)

    @staticmethod
    def containing(x, k: int) -> "DyadicInterval":
        """The scale-2^k dyadic interval containing the point x."""
        x = as_fraction(x)
        n = x / pow2(k)
        return DyadicInterval(math.floor(n), k)

    def __repr__(self):
        return f"D[{self.lo},{self.hi})"


@dataclass(frozen=True)
class ShiftedDyadicInterval:
    """2^k * ([n, n+1) + (-1)^k * a) with shift a in {0, 1/3, 2/3}."""

    n: int
    k: int
    a: Fraction = Fraction(0)

    def __post_init__(self):
        if self.a not in THIRD_SHIFTS:
            raise ValueError(f"shift {self.a} not in {{0, 1/3, 2/3}}")

    @property
    def shift_offset(self) -> Fraction:
        sign = 1 if self.k % 2 == 0 else -1
        return sign * self.a

    @property
    def lo(self) -> Fraction:
        return (self.n + self.shift_offset) * pow2(self.k)

    @property
    def hi(self) -> Fraction:
        return (self.n + 1 + self.shift_offset) * pow2(self.k)

    @property
    def length(self) -> Fraction:
        return pow2(self.k)

    @property
    def center(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    @property
    def parent(self) -> "ShiftedDyadicInterval":
        # The unique same-shift interval at scale k+1 containing this one;
        # it exists because 3a is an integer and the shift sign alternates.
        t = self.n + 3 * self.shift_offset
        assert t.denominator == 1
        return ShiftedDyadicInterval(math.floor(Fraction(int(t), 2)), self.k + 1, self.a)

    def contains(self, x) -> bool:
        return self.interval().contains(x)

    def contains_interval(self, other) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def enlarge(self, c) -> Interval:
        return self.interval().enlarge(c)

    def translate(self, a) -> Interval:
        return self.interval().translate(a)

    def dilate_pow2(self, y: int) -> Interval:
        return self.interval().dilate_pow2(y)

    @staticmethod
    def containing(x, k: int, a) -> "ShiftedDyadicInterval":
        x = as_fraction(x)
        a = Fraction(a)
        sign = 1 if k % 2 == 0 else -1
        n = math.floor(x / pow2(k) - sign * a)
        return ShiftedDyadicInterval(n, k, a)

    def __repr__(self):
        return f"S[{self.lo},{self.hi};a={self.a})"


IntervalLike = Union[Interval, DyadicInterval, ShiftedDyadicInterval]


def hull(*intervals: IntervalLike) -> Interval:
    """Convex hull of finitely many intervals."""
    return Interval(min(i.lo for i in intervals), max(i.hi for i in intervals))
