"""Tiles, tri-tiles, rigid interval triples, and collection predicates.

Spatial intervals live on the unit torus in turns; frequency intervals are
integer-scale dyadic (or shifted dyadic) intervals.  Every tile has area one:
``|I| * |omega| = 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .intervals import (DyadicInterval, Interval, ShiftedDyadicInterval,
                        as_fraction, hull)

FreqInterval = Union[DyadicInterval, ShiftedDyadicInterval]


@dataclass(frozen=True)
class Tile:
    """Space x frequency rectangle of area one."""

    space: DyadicInterval
    freq: FreqInterval

    def __post_init__(self):
        if self.space.length * self.freq.length != 1:
            raise ValueError(
                f"tile area {self.space.length * self.freq.length} != 1")

    @property
    def scale(self) -> Fraction:
        return self.space.length


@dataclass(frozen=True)
class TriTile:
    """Three tiles sharing one spatial interval; equal frequency lengths."""

    space: DyadicInterval
    freqs: tuple[FreqInterval, FreqInterval, FreqInterval]

    def __post_init__(self):
        lengths = {f.length for f in self.freqs}
        if len(lengths) != 1:
            raise ValueError("frequency components must share one length")
        if self.space.length * self.freqs[0].length != 1:
            raise ValueError("tri-tile area != 1")

    def component(self, j: int) -> Tile:
        return Tile(self.space, self.freqs[j - 1])

    @property
    def scale(self) -> Fraction:
        return self.space.length


SITUATIONS = ("both_translates", "upper_halfline", "lower_halfline")


@dataclass(frozen=True)
class RigidTriples:
    """Companion lower/upper frequency intervals at fixed offsets.

    situation 'both_translates': lower = I - m|I|,  upper = I + n|I|
    situation 'upper_halfline':  lower = I - m|I|,  upper = [c(I)+(n-1/2)|I|, inf)
    situation 'lower_halfline':  lower = (-inf, c(I)-(m-1/2)|I|), upper = I + n|I|
    """

    situation: str
    m: int
    n: int
    margin: int  # the partition margin the offsets are calibrated to

    def __post_init__(self):
        if self.situation not in SITUATIONS:
            raise ValueError(f"unknown situation {self.situation!r}")
        for v in (self.m, self.n):
            if not (self.margin < v <= 8 * self.margin):
                raise ValueError(
                    f"offset {v} outside (margin, 8*margin] = "
                    f"({self.margin}, {8 * self.margin}]")

    def lower(self, I: FreqInterval) -> Interval:
        h = I.length
        if self.situation == "lower_halfline":
            return Interval(-math.inf, I.center - (self.m - Fraction(1, 2)) * h)
        return I.translate(-self.m * h)

    def upper(self, I: FreqInterval) -> Interval:
        h = I.length
        if self.situation == "upper_halfline":
            return Interval(I.center + (self.n - Fraction(1, 2)) * h, math.inf)
        return I.translate(self.n * h)

    def triple(self, I: FreqInterval) -> tuple[Interval, Interval, Interval]:
        return (self.lower(I), I.interval() if not isinstance(I, Interval) else I,
                self.upper(I))

    def same_structure(self, other: "RigidTriples") -> bool:
        return self.situation == other.situation


def make_rigid(situation: str, m: int, n: int, margin: int) -> RigidTriples:
    return RigidTriples(situation, m, n, margin)


# ---------------------------------------------------------------------------
# collection predicates
# ---------------------------------------------------------------------------

def _freq_components(t: Union[Tile, TriTile]) -> tuple[FreqInterval, ...]:
    return t.freqs if isinstance(t, TriTile) else (t.freq,)


def _cubes_equal(a, b) -> bool:
    return all(fa.lo == fb.lo and fa.hi == fb.hi
               for fa, fb in zip(_freq_components(a), _freq_components(b)))


def _enlargement_disjoint(a, b, c0) -> bool:
    """True if the c0-enlarged frequency cubes are disjoint (some component)."""
    c0 = as_fraction(c0)
    for fa, fb in zip(_freq_components(a), _freq_components(b)):
        if not fa.enlarge(c0).intersects(fb.enlarge(c0)):
            return True
    return False


def is_sparse(tiles: Sequence[Union[Tile, TriTile]], c0) -> tuple[bool, Optional[tuple]]:
    """Pairwise sparseness check; returns (flag, witness pair or None).

    For tiles Q, R with |I_R|/c0 <= |I_Q| <= |I_R| the collection must have
    |I_Q| = |I_R|, and then equal frequency cubes or c0-enlargements disjoint.
    """
    c0 = as_fraction(c0)
    for i, q in enumerate(tiles):
        for r in tiles[i + 1:]:
            a, b = sorted((q, r), key=lambda t: t.scale)
            if b.scale / c0 <= a.scale <= b.scale:
                if a.scale != b.scale:
                    return False, (q, r)
                if not _cubes_equal(a, b) and not _enlargement_disjoint(a, b, c0):
                    return False, (q, r)
    return True, None


def _contained(inner: Interval, outer: Interval) -> bool:
    return outer.lo <= inner.lo and inner.hi <= outer.hi


def is_rank1(tritiles: Sequence[TriTile], c1) -> tuple[bool, Optional[tuple]]:
    """Rank-one compatibility of a tri-tile collection, with witness."""
    c1 = as_fraction(c1)
    for i, q in enumerate(tritiles):
        for r in tritiles:
            if q is r:
                continue
            qf, rf = q.freqs, r.freqs
            if any(qf[j].lo == rf[j].lo and qf[j].hi == rf[j].hi for j in range(3)):
                if not _cubes_equal(q, r):
                    return False, (q, r, "equal component, unequal cube")
            for j0 in range(3):
                if _contained(qf[j0].enlarge(5), rf[j0].enlarge(5)):
                    if not all(_contained(qf[j].enlarge(5 * c1), rf[j].enlarge(5 * c1))
                               for j in range(3)):
                        return False, (q, r, f"5C1 cube not nested at j0={j0}")
                    if r.scale < q.scale:
                        for j in range(3):
                            if j == j0:
                                continue
                            if qf[j].enlarge(5).intersects(rf[j].enlarge(5)):
                                return False, (q, r, f"overlap at j={j}, j0={j0}")
        if i > len(tritiles):  # pragma: no cover
            break
    return True, None


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _freq_to_json(f: FreqInterval) -> dict:
    d = {"n": f.n, "k": f.k}
    if isinstance(f, ShiftedDyadicInterval):
        d["a"] = str(f.a)
    return d


def _freq_from_json(d: dict) -> FreqInterval:
    if "a" in d and Fraction(d["a"]) != 0:
        return ShiftedDyadicInterval(d["n"], d["k"], Fraction(d["a"]))
    return DyadicInterval(d["n"], d["k"])


def tiles_to_json(tiles: Sequence[Tile], rigid: RigidTriples | None = None) -> str:
    doc = {"tiles": [{"I": {"n": t.space.n, "k": t.space.k},
                      "omega": _freq_to_json(t.freq)} for t in tiles]}
    if rigid is not None:
        doc["rigid"] = {"situation": rigid.situation, "m": rigid.m,
                        "n": rigid.n, "margin": rigid.margin}
    return json.dumps(doc, indent=1)


def tiles_from_json(text: str) -> tuple[list[Tile], RigidTriples | None]:
    doc = json.loads(text)
    tiles = [Tile(DyadicInterval(t["I"]["n"], t["I"]["k"]),
                  _freq_from_json(t["omega"])) for t in doc["tiles"]]
    rigid = None
    if "rigid" in doc:
        r = doc["rigid"]
        rigid = RigidTriples(r["situation"], r["m"], r["n"], r["margin"])
    return tiles, rigid
