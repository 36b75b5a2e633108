"""Whitney decomposition of the half-plane {xi1 < xi2} by shifted squares.

The cover consists of all shifted dyadic squares S1 x S2 (coordinate shifts
in {0, 1/3, 2/3}) whose Chebyshev distance to the diagonal lies between
``whitney_margin * |S1|`` and ``(2 * whitney_margin + 1) * |S1|``.  A smooth
partition of unity subordinate to it is built by normalizing tensor plateau
bumps supported in (4/5)S1 x (4/5)S2; a margin/pigeonhole argument over the
three shifts per coordinate guarantees the plateaus cover every point whose
gap is resolved by the available scales, so the quotient is well defined.

Distance convention: for a square with gap = inf S2 - sup S1 > 0 the distance
to the diagonal is gap/2 (Chebyshev), which keeps every predicate rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bumps import smooth_step
from .constants import DEFAULT_CONSTANTS, ToolkitConstants
from .intervals import ShiftedDyadicInterval, THIRD_SHIFTS, as_fraction, pow2

# Geometry of the per-coordinate profile, in units of the side length.  The
# profile is a difference of mollifier steps centered at +-1/6 with ramp
# half-width 7/30, so its支 support is exactly [-0.4, 0.4] (inside (4/5) of the
# cell) and its translates over the union of the three shifted grids (a lattice
# of spacing 1/3 of the side) telescope to 1 exactly.  Coverage: the profile
# is >= 1/2 on [-1/6, 1/6], and a pigeonhole over the three shifts per
# coordinate puts every positive-gap point inside that core of an admissible
# square at some dyadic scale.
_CORE = 1.0 / 6.0
_RAMP = 7.0 / 30.0
_SUPPORT = _CORE + _RAMP  # = 0.4


@dataclass(frozen=True)
class WhitneySquare:
    """One admissible square; shifts are indices into {0, 1/3, 2/3}."""

    k: int
    b1: int
    b2: int
    n1: int
    n2: int

    @property
    def side(self) -> Fraction:
        return pow2(self.k)

    @property
    def s1(self) -> ShiftedDyadicInterval:
        return ShiftedDyadicInterval(self.n1, self.k, THIRD_SHIFTS[self.b1])

    @property
    def s2(self) -> ShiftedDyadicInterval:
        return ShiftedDyadicInterval(self.n2, self.k, THIRD_SHIFTS[self.b2])

    @property
    def gap(self) -> Fraction:
        return self.s2.lo - self.s1.hi

    def diag_distance(self) -> Fraction:
        return max(self.gap, Fraction(0)) / 2


def _shift_offset(k: int, b: int) -> Fraction:
    return THIRD_SHIFTS[b] if k % 2 == 0 else -THIRD_SHIFTS[b]


def cell_profile(t):
    """Telescoping bump: steps at +-1/6 with ramp 7/30, support [-0.4, 0.4]."""
    t = np.asarray(t, dtype=float)
    return smooth_step((t + _CORE) / _RAMP) - smooth_step((t - _CORE) / _RAMP)


class WhitneyCover:
    """Admissible squares intersecting a frequency window, plus the partition.

    Parameters
    ----------
    lo, hi:     the window is [lo, hi)^2 in frequency.
    min_scale:  smallest square side emitted (power of two).
    constants:  supplies the Whitney margin (margin / 40).
    """

    def __init__(self, lo, hi, min_scale, constants: ToolkitConstants = DEFAULT_CONSTANTS):
        self.lo = as_fraction(lo)
        self.hi = as_fraction(hi)
        self.min_scale = as_fraction(min_scale)
        self.constants = constants
        L2 = constants.whitney_margin
        self.gap_lo_factor = 2 * L2           # gap >= gap_lo_factor * side
        self.gap_hi_factor = 4 * L2 + 2       # gap <= gap_hi_factor * side
        span = self.hi - self.lo
        if span <= 0:
            raise ValueError("empty window")
        if span < (self.gap_lo_factor + 1) * self.min_scale:
            raise ValueError(
                f"window of span {span} cannot hold any admissible square of "
                f"side >= {self.min_scale} with margin {L2}; enlarge the window "
                "or lower min_scale")
        self.k_min = _log2_int(self.min_scale)
        # Largest useful side: squares whose support can still meet the window.
        self.k_max = math.ceil(math.log2(float(span / self.gap_lo_factor))) + 1
        self._series_cache: dict[WhitneySquare, "BilinearSeries"] = {}

    # -- scale window around a gap value ---------------------------------
    def scales_for_gap(self, g: float) -> range:
        """Dyadic k whose squares' supports can contain a point with gap g."""
        if g <= 0:
            return range(0)
        k_hi = math.floor(math.log2(g / (float(self.gap_lo_factor) + 0.2)))
        k_lo = math.ceil(math.log2(g / (float(self.gap_hi_factor) + 1.8)))
        return range(max(k_lo, self.k_min), min(k_hi, self.k_max) + 1)

    def _gap_bounds_int(self, k: int) -> tuple[int, int]:
        """Admissibility as integer bounds on 120 * gap / side."""
        return (int(120 * self.gap_lo_factor), int(120 * self.gap_hi_factor))

    def admissible(self, sq: WhitneySquare) -> bool:
        g = sq.gap
        h = sq.side
        return self.gap_lo_factor * h <= g <= self.gap_hi_factor * h

    # -- enumeration -------------------------------------------------------
    def squares(self) -> list[WhitneySquare]:
        """All admissible squares whose square body intersects the window."""
        out = []
        for k in range(self.k_min, self.k_max + 1):
            h = pow2(k)
            for b1 in range(3):
                off1 = _shift_offset(k, b1)
                n1_lo = math.floor((self.lo - h) / h - off1)
                n1_hi = math.ceil(self.hi / h - off1)
                for n1 in range(n1_lo, n1_hi + 1):
                    s1_hi = (n1 + 1 + off1) * h
                    for b2 in range(3):
                        off2 = _shift_offset(k, b2)
                        # gap = (n2 + off2) h - s1_hi within the admissible band
                        lo_n2 = (s1_hi + self.gap_lo_factor * h) / h - off2
                        hi_n2 = (s1_hi + self.gap_hi_factor * h) / h - off2
                        for n2 in range(math.ceil(lo_n2), math.floor(hi_n2) + 1):
                            sq = WhitneySquare(k, b1, b2, n1, n2)
                            if not self.admissible(sq):
                                continue
                            if sq.s2.lo >= self.hi or sq.s2.hi <= self.lo:
                                continue
                            out.append(sq)
        return out

    # -- partition of unity ------------------------------------------------
    def _cell_psi(self, xi, k: int, b: int):
        """Per-point (cell index, plateau value) for one coordinate grid."""
        h = float(pow2(k))
        off = float(_shift_offset(k, b))
        pos = np.asarray(xi, dtype=float) / h - off
        n = np.floor(pos).astype(np.int64)
        t = pos - n - 0.5
        return n, cell_profile(t)

    def psi_and_pairs(self, xi1, xi2, k: int):
        """For one scale: per shift pair, the cell indices and psi values."""
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        cols = [self._cell_psi(xi1, k, b) for b in range(3)]
        rows = [self._cell_psi(xi2, k, b) for b in range(3)]
        for b1, (n1, p1) in enumerate(cols):
            for b2, (n2, p2) in enumerate(rows):
                yield b1, b2, n1, n2, p1 * p2

    def _admissible_mask(self, k: int, b1: int, b2: int,
                         n1: np.ndarray, n2: np.ndarray) -> np.ndarray:
        # 120 * gap / side is an integer: gap/h = n2 - n1 - 1 + off2 - off1
        s = int(120 * (_shift_offset(k, b2) - _shift_offset(k, b1)))
        val = 120 * (n2 - n1 - 1) + s
        lo, hi = self._gap_bounds_int(k)
        return (val >= lo) & (val <= hi)

    def psi_sum(self, xi1, xi2) -> np.ndarray:
        """Denominator of the quotient partition at the given points."""
        xi1 = np.atleast_1d(np.asarray(xi1, dtype=float))
        xi2 = np.atleast_1d(np.asarray(xi2, dtype=float))
        out = np.zeros(xi1.shape)
        gaps = xi2 - xi1
        pos = gaps > 0
        if not np.any(pos):
            return out
        gmax = float(gaps[pos].max())
        gmin = float(gaps[pos].min())
        k_lo = self.scales_for_gap(gmin).start if gmin > 0 else self.k_min
        k_hi = self.scales_for_gap(gmax).stop
        for k in range(max(k_lo, self.k_min), min(k_hi, self.k_max + 1)):
            for b1, b2, n1, n2, psi in self.psi_and_pairs(xi1, xi2, k):
                mask = self._admissible_mask(k, b1, b2, n1, n2)
                out += np.where(mask, psi, 0.0)
        return out

    def square_psi(self, sq: WhitneySquare, xi1, xi2) -> np.ndarray:
        h = float(sq.side)
        t1 = (np.asarray(xi1, dtype=float) - float(sq.s1.center)) / h
        t2 = (np.asarray(xi2, dtype=float) - float(sq.s2.center)) / h
        return cell_profile(t1) * cell_profile(t2)

    def square_profile(self, sq: WhitneySquare, xi1, xi2) -> np.ndarray:
        """phi_S = psi_S / sum psi, supported in (4/5)S1 x (4/5)S2."""
        num = self.square_psi(sq, xi1, xi2)
        out = np.zeros_like(num)
        m = num > 0
        if np.any(m):
            den = self.psi_sum(np.asarray(xi1, dtype=float)[m],
                               np.asarray(xi2, dtype=float)[m])
            out[m] = num[m] / den
        return out

    def partition_values(self, xi1, xi2) -> np.ndarray:
        """Sum of all square profiles: 1 on the covered half-plane, 0 below."""
        s = self.psi_sum(xi1, xi2)
        return np.where(s > 0, 1.0, 0.0)

    def squares_at_points(self, xi1, xi2) -> dict[WhitneySquare, np.ndarray]:
        """Map square -> indices of points lying in its profile support."""
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        gaps = xi2 - xi1
        hits: dict[WhitneySquare, np.ndarray] = {}
        pos = np.nonzero(gaps > 0)[0]
        if pos.size == 0:
            return hits
        gmax = float(gaps[pos].max())
        for k in range(self.k_min, min(self.scales_for_gap(gmax).stop, self.k_max + 1)):
            x1, x2 = xi1[pos], xi2[pos]
            for b1, b2, n1, n2, psi in self.psi_and_pairs(x1, x2, k):
                mask = self._admissible_mask(k, b1, b2, n1, n2) & (psi > 0)
                if not np.any(mask):
                    continue
                idx = np.nonzero(mask)[0]
                key = np.stack([n1[idx], n2[idx]], axis=1)
                for (a, b), grp in _group_rows(key, idx):
                    sq = WhitneySquare(k, b1, b2, int(a), int(b))
                    hits.setdefault(sq, []).append(pos[grp])
        return {sq: np.concatenate(v) for sq, v in hits.items()}

    # -- sum cover ----------------------------------------------------------
    def sum_cover_cells(self, sq: WhitneySquare) -> list[ShiftedDyadicInterval]:
        """Shifted cells of side |S1| whose profiles cover S1 + S2.

        The cell profiles over the three shift grids at one scale telescope
        to 1 exactly, so the emitted cells reproduce unity on the sum set.
        """
        h = sq.side
        lo = sq.s1.lo + sq.s2.lo
        hi = sq.s1.hi + sq.s2.hi
        cells = []
        for b in range(3):
            off = _shift_offset(sq.k, b)
            n_lo = math.floor((lo - Fraction(2, 5) * h) / h - off)
            n_hi = math.floor((hi + Fraction(2, 5) * h) / h - off)
            for n in range(n_lo, n_hi + 1):
                cell = ShiftedDyadicInterval(n, sq.k, THIRD_SHIFTS[b])
                if float(cell.lo) - _SUPPORT * float(h) < hi and \
                        float(cell.hi) + _SUPPORT * float(h) > lo:
                    cells.append(cell)
        return cells

    def sum_cover_profile(self, cell: ShiftedDyadicInterval, sigma) -> np.ndarray:
        """phi_{3,cell}(sigma), supported in (4/5) of the cell."""
        sigma = np.asarray(sigma, dtype=float)
        h = float(cell.length)
        return cell_profile((sigma - float(cell.center)) / h)

    # -- bilinear series ------------------------------------------------------
    def series(self, sq: WhitneySquare, radius: int | None = None,
               grid: int = 64) -> "BilinearSeries":
        key = sq
        if key not in self._series_cache:
            radius = self.constants.series_radius if radius is None else radius
            self._series_cache[key] = BilinearSeries(self, sq, radius, grid)
        return self._series_cache[key]


def _group_rows(rows: np.ndarray, idx: np.ndarray):
    """Group indices by identical integer rows."""
    order = np.lexsort(rows.T)
    rows = rows[order]
    idx = idx[order]
    cut = np.nonzero(np.any(np.diff(rows, axis=0) != 0, axis=1))[0] + 1
    for grp in np.split(np.arange(rows.shape[0]), cut):
        yield tuple(rows[grp[0]]), idx[grp]


def _log2_int(x: Fraction) -> int:
    k = x.as_integer_ratio()
    num, den = k
    if num == 1:
        r = -int(math.log2(den))
        if pow2(r) != x:
            raise ValueError(f"{x} is not a power of two")
        return r
    r = int(math.log2(num))
    if den != 1 or pow2(r) != x:
        raise ValueError(f"{x} is not a power of two")
    return r


class BilinearSeries:
    """Tensor expansion of one square profile with windowed factors.

    phi_S(x1, x2) = sum_k a_k f_{1,k}(x1) f_{2,k}(x2) with factors supported
    in (5/6)S_i; coefficients come from an exact discrete inversion of the
    profile sampled on a grid over the (5/6) box, truncated to |k| <= radius.
    """

    def __init__(self, cover: WhitneyCover, sq: WhitneySquare, radius: int, grid: int):
        if 2 * radius + 1 > grid:
            raise ValueError("series radius exceeds the sampling grid")
        self.cover = cover
        self.square = sq
        self.radius = radius
        h = float(sq.side)
        self.period = (5.0 / 6.0) * h
        self.c1 = float(sq.s1.center)
        self.c2 = float(sq.s2.center)
        u = (np.arange(grid) / grid - 0.5) * self.period
        X1, X2 = np.meshgrid(self.c1 + u, self.c2 + u, indexing="ij")
        values = cover.square_profile(sq, X1.ravel(), X2.ravel()).reshape(grid, grid)
        coef = np.fft.fft2(values) / (grid * grid)
        coef = np.fft.fftshift(coef)
        mid = grid // 2
        r = radius
        self.coef = coef[mid - r: mid + r + 1, mid - r: mid + r + 1].copy()
        # phase fix: samples start at -period/2 relative to the box center
        ks = np.arange(-r, r + 1)
        phase = np.exp(-1j * np.pi * ks)
        self.coef *= phase[:, None] * phase[None, :]
        self.ks = ks

    def factor(self, which: int, xi) -> np.ndarray:
        """Matrix of windowed modulated factors, shape (len(xi), 2r+1)."""
        xi = np.asarray(xi, dtype=float)
        c = self.c1 if which == 1 else self.c2
        t = (xi - c) / float(self.square.side)
        window = smooth_step((5.0 / 12.0 + 0.4 - 2.0 * np.abs(t)) / (5.0 / 12.0 - 0.4))
        base = np.exp(2j * np.pi * (xi - c) / self.period)
        return window[:, None] * base[:, None] ** self.ks[None, :]

    def evaluate(self, xi1, xi2) -> np.ndarray:
        """Truncated reconstruction of the square profile."""
        f1 = self.factor(1, xi1)
        f2 = self.factor(2, xi2)
        return np.real(np.einsum("pi,ij,pj->p", f1, self.coef, f2))

    def coefficient_tail(self, full_grid: int = 64) -> float:
        """l1 mass of coefficients outside the truncation radius."""
        sq = self.square
        h = float(sq.side)
        u = (np.arange(full_grid) / full_grid - 0.5) * self.period
        X1, X2 = np.meshgrid(self.c1 + u, self.c2 + u, indexing="ij")
        values = self.cover.square_profile(sq, X1.ravel(), X2.ravel()).reshape(full_grid, full_grid)
        coef = np.abs(np.fft.fftshift(np.fft.fft2(values))) / (full_grid ** 2)
        mid = full_grid // 2
        total = coef.sum()
        r = self.radius
        kept = coef[mid - r: mid + r + 1, mid - r: mid + r + 1].sum()
        return float(total - kept)

    def measured_tail(self, n_probe: int = 400, rng=None) -> float:
        """Max reconstruction error at random probe points in the box."""
        rng = np.random.default_rng(0) if rng is None else rng
        h = float(self.square.side)
        x1 = self.c1 + (rng.random(n_probe) - 0.5) * h
        x2 = self.c2 + (rng.random(n_probe) - 0.5) * h
        exact = self.cover.square_profile(self.square, x1, x2)
        approx = self.evaluate(x1, x2)
        return float(np.max(np.abs(exact - approx)))
