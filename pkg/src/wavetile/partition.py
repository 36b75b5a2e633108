"""Endpoint-adapted partition of (M, N) into maximal dyadic intervals.

``(M, N)`` is split into the maximal dyadic intervals whose distance to both
endpoints is at least ``margin`` times their length.  Each entry carries its
*details*: the side of its dyadic parent it sits on and the two integer
offsets ``(m, n)`` locating ``M`` and ``N`` relative to it.  The neighbor
length ratios ``(u, v)`` are a function of the details alone, which is what
makes the nine-profile bump family and the tail resummation work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .bumps import smooth_step
from .constants import DEFAULT_CONSTANTS, ToolkitConstants
from .intervals import DyadicInterval, as_fraction, pow2

RATIOS = (Fraction(1, 2), Fraction(1), Fraction(2))


@dataclass(frozen=True)
class Details:
    """(side, m, n) of a partition entry."""

    side: str  # 'left' or 'right' child of the dyadic parent
    m: int     # M in I - (m+1)|I|
    n: int     # N in I + (n+1)|I|

    @property
    def detail_class(self) -> int:
        """1, 2 or 3: m <= n/4, middle, or m >= 4n."""
        if 4 * self.m <= self.n:
            return 1
        if self.m >= 4 * self.n:
            return 3
        return 2


@dataclass(frozen=True)
class PartitionEntry:
    interval: DyadicInterval
    details: Details
    u: Fraction  # |left neighbor| / |I|
    v: Fraction  # |right neighbor| / |I|

    @property
    def detail_class(self) -> int:
        return self.details.detail_class


def _entry_details(I: DyadicInterval, M: Fraction, N: Fraction) -> Details:
    h = I.length
    m = math.ceil((I.lo - M) / h) - 1
    n = math.floor((N - I.lo) / h) - 1
    side = "left" if I.is_left_child() else "right"
    return Details(side, m, n)


def _distance_ok(I: DyadicInterval, M: Fraction, N: Fraction, L1: int) -> bool:
    h = I.length
    return (I.lo - M) >= L1 * h and (N - I.hi) >= L1 * h


def in_partition(I: DyadicInterval, M, N, L1: int) -> bool:
    """Exact membership test: distance condition plus maximality."""
    M, N = as_fraction(M), as_fraction(N)
    return _distance_ok(I, M, N, L1) and not _distance_ok(I.parent, M, N, L1)


def _candidates_at_scale(M: Fraction, N: Fraction, k: int, L1: int):
    h = pow2(k)
    span = N - M
    if span / h <= 8 * L1 + 16:
        n0 = math.ceil(M / h)
        n1 = math.floor(N / h)
        yield from range(n0, n1)
        return
    # Entries at this scale hug one endpoint: one side's distance is at most
    # (2 L1 + 2) h by maximality, so only O(L1) positions per side qualify.
    lo_min = M + L1 * h
    lo_max = M + (2 * L1 + 3) * h
    yield from range(math.ceil(lo_min / h), math.floor(lo_max / h) + 1)
    hi_min = N - (2 * L1 + 3) * h
    hi_max = N - L1 * h
    yield from range(math.ceil(hi_min / h) - 1, math.floor(hi_max / h))


class HPartition:
    """The endpoint partition of (M, N) with per-entry details and ratios."""

    def __init__(self, M, N, constants: ToolkitConstants = DEFAULT_CONSTANTS):
        self.M = as_fraction(M)
        self.N = as_fraction(N)
        if self.M >= self.N:
            raise ValueError("need M < N")
        self.constants = constants
        self.entries: list[PartitionEntry] = []
        self.residual = self.N - self.M
        self._build()
        self._los = np.array([float(e.interval.lo) for e in self.entries])
        self._his = np.array([float(e.interval.hi) for e in self.entries])
        self._lens = np.array([float(e.interval.length) for e in self.entries])
        self._centers = np.array([float(e.interval.center) for e in self.entries])

    def _build(self):
        L1 = self.constants.margin
        span = self.N - self.M
        top = span / (2 * L1 + 1)
        if top < self.constants.min_scale:
            return  # nothing survives the cutoff; full residual
        k_max = math.floor(math.log2(top))
        # Generate two scales below the cutoff so kept entries know their
        # true neighbor lengths, then truncate.
        k_min = int(math.log2(self.constants.min_scale.denominator))
        raw: list[DyadicInterval] = []
        for k in range(k_max, -k_min - 3, -1):
            h = pow2(k)
            seen = set()
            for n in _candidates_at_scale(self.M, self.N, k, L1):
                if n in seen:
                    continue
                seen.add(n)
                I = DyadicInterval(n, k)
                if _distance_ok(I, self.M, self.N, L1) and \
                        not _distance_ok(I.parent, self.M, self.N, L1):
                    raw.append(I)
        raw.sort(key=lambda I: I.lo)
        for a, b in zip(raw, raw[1:]):
            if a.hi != b.lo:
                raise AssertionError(f"partition gap between {a} and {b}")
        kept = []
        for idx, I in enumerate(raw):
            if I.length < self.constants.min_scale:
                continue
            u = raw[idx - 1].length / I.length if idx > 0 else Fraction(1)
            v = raw[idx + 1].length / I.length if idx + 1 < len(raw) else Fraction(1)
            kept.append(PartitionEntry(I, _entry_details(I, self.M, self.N), u, v))
        self.entries = kept
        self.residual = span - sum((e.interval.length for e in kept), Fraction(0))

    # -- bump family -----------------------------------------------------
    def bump_values(self, entry: PartitionEntry, xi) -> np.ndarray:
        """The entry's profile phi_{u,v}((xi - c(I)) / |I|), vectorized."""
        return bump_profile(entry.u, entry.v, self.constants.bump_radius,
                            (np.asarray(xi, dtype=float) - float(entry.interval.center))
                            / float(entry.interval.length))

    def partition_sum(self, xi, min_length: Fraction | None = None,
                      classes: tuple[int, ...] | None = None) -> np.ndarray:
        """Sum of entry bumps at xi, optionally filtered by scale or class."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        out = np.zeros(xi.shape)
        c = float(self.constants.bump_radius)
        for e in self.entries:
            if min_length is not None and e.interval.length < min_length:
                continue
            if classes is not None and e.detail_class not in classes:
                continue
            center = float(e.interval.center)
            h = float(e.interval.length)
            mask = np.abs(xi - center) < c * h
            if np.any(mask):
                out[mask] += self.bump_values(e, xi[mask])
        return out

    def entries_near(self, xi: float) -> list[int]:
        """Indices of entries whose bump support can contain the point."""
        c = float(self.constants.bump_radius)
        out = []
        lo = np.searchsorted(self._los, xi) - 2
        for i in range(max(lo, 0), min(lo + 5, len(self.entries))):
            if abs(xi - self._centers[i]) < c * self._lens[i]:
                out.append(i)
        return out

    def __len__(self):
        return len(self.entries)


def h_partition(M, N, constants: ToolkitConstants = DEFAULT_CONSTANTS) -> HPartition:
    return HPartition(M, N, constants)


def bump_profile(u, v, radius, s) -> np.ndarray:
    """phi_{u,v}(s): 1 on the core of [-1/2, 1/2], transitions matched to the
    neighbor scales u, v, supported in [-radius, radius]."""
    eps = float(radius) - 0.5
    wl = eps * min(1.0, float(u))
    wr = eps * min(1.0, float(v))
    s = np.asarray(s, dtype=float)
    return smooth_step((s + 0.5) / wl) * smooth_step((0.5 - s) / wr)


def classify_details(H: HPartition) -> list[int]:
    """Class labels (1, 2, 3) per entry; asserts the admissibility facts."""
    L1 = H.constants.margin
    labels = []
    for e in H.entries:
        m, n = e.details.m, e.details.n
        lo = min(m, n)
        # "L1 <= min(m, n) <= 2 L1"; the lower bound relaxes by one at exact
        # distance-equality configurations (dyadic endpoints).
        if not (L1 - 1 <= lo <= 2 * L1):
            raise AssertionError(f"details {e.details} violate margin bounds")
        labels.append(e.detail_class)
    return labels


# ---------------------------------------------------------------------------
# neighbor-ratio table and the tail resummation
# ---------------------------------------------------------------------------

def _harvest_uv(L1: int, side: str, n: int, m: int,
                constants: ToolkitConstants) -> tuple[Fraction, Fraction]:
    """Realize an interval with details (side, m, n) and read off (u, v)."""
    if side == "left":
        I = DyadicInterval(0, 0)
        M = Fraction(-m) - Fraction(1, 2)
        N = Fraction(n + 1) + Fraction(1, 2)
    else:
        I = DyadicInterval(1, 0)
        M = Fraction(1 - m) - Fraction(1, 2)
        N = Fraction(n + 2) + Fraction(1, 2)
    H = HPartition(M, N, constants)
    for e in H.entries:
        if e.interval == I:
            if e.details != Details(side, m, n):
                raise AssertionError(
                    f"harvest realized {e.details}, wanted {(side, m, n)}")
            return e.u, e.v
    raise AssertionError(f"could not realize details {(side, m, n)}")


@lru_cache(maxsize=None)
def tail_uv_table(L1: int) -> dict[tuple[str, int], tuple[Fraction, Fraction]]:
    """(side, n) -> (u, v) valid for every entry with m >= 4 n.

    In that regime the neighbor ratios are determined by the side and n
    alone; this is checked by realizing each detail at several values of m.
    """
    constants = ToolkitConstants(margin=L1, min_scale=Fraction(1, 16))
    table: dict[tuple[str, int], tuple[Fraction, Fraction]] = {}
    for side in ("left", "right"):
        n_max = 2 * L1 if side == "left" else 2 * L1 - 1
        for n in range(L1, n_max + 1):
            vals = {_harvest_uv(L1, side, n, m, constants)
                    for m in (4 * n, 4 * n + 1, 8 * L1 + 3, 16 * L1 + 5)}
            if len(vals) != 1:
                raise AssertionError(
                    f"neighbor ratios not determined by (side={side}, n={n}): {vals}")
            table[(side, n)] = vals.pop()
    return table


@dataclass(frozen=True)
class TailTerm:
    """One finite-form term of the resummed tail sum."""

    a: int
    b: int
    u: Fraction
    v: Fraction


def resummed_tail_form(side: str, C: float, L1: int) -> list[TailTerm]:
    """Finite form of sum_{alpha: m_alpha >= C n_alpha} phi_alpha 1_{I in I(alpha)}.

    Returns O(L1) terms (a_j, b_j, u_j, v_j); the sum at (xi; M, N, I) equals
    sum_j phi_{u_j, v_j}((xi - c(I))/|I|) 1_{M < c(I) - (a_j - 1/2)|I|}
    1_{N in I + b_j |I|}.
    """
    if C < 4:
        raise ValueError("resummation requires C >= 4")
    table = tail_uv_table(L1)
    terms = []
    n_max = 2 * L1 if side == "left" else 2 * L1 - 1
    for n in range(L1, n_max + 1):
        u, v = table[(side, n)]
        terms.append(TailTerm(a=math.ceil(C * n) + 1, b=n + 1, u=u, v=v))
    return terms


def eval_tail_form(terms: list[TailTerm], radius, xi, M, N, I: DyadicInterval):
    """Evaluate the finite form at points xi for the given (M, N, I)."""
    xi = np.asarray(xi, dtype=float)
    M, N = as_fraction(M), as_fraction(N)
    h = I.length
    c = I.center
    out = np.zeros(xi.shape if xi.ndim else (1,))
    for t in terms:
        if not (M < c - (Fraction(2 * t.a - 1, 2)) * h):
            continue
        if not (I.lo + t.b * h <= N < I.hi + t.b * h):
            continue
        s = (xi - float(c)) / float(h)
        out += bump_profile(t.u, t.v, radius, s)
    return out if xi.ndim else float(out[0])


def eval_tail_direct(C: float, radius, xi, M, N, I: DyadicInterval, L1: int,
                     m_cap: int = 10 ** 4):
    """Oracle for the tail sum: geometric membership, truncated at m <= m_cap.

    The interval's neighbor ratios are read from the realized partition, not
    from the table, so the two sides are computed independently.
    """
    M, N = as_fraction(M), as_fraction(N)
    if not in_partition(I, M, N, L1):
        return np.zeros(np.asarray(xi, dtype=float).shape)
    constants = ToolkitConstants(margin=L1, min_scale=min(
        Fraction(1, 4) * I.length, Fraction(1, 16)))
    H = HPartition(M, N, constants)
    entry = next(e for e in H.entries if e.interval == I)
    m, n = entry.details.m, entry.details.n
    xi = np.asarray(xi, dtype=float)
    if m < math.ceil(C * n) or m > m_cap:
        return np.zeros(xi.shape)
    s = (xi - float(I.center)) / float(I.length)
    return bump_profile(entry.u, entry.v, radius, s)
