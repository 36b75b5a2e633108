"""Finite outer measure spaces on tile collections.

Ground sets are finite tile lists with rigid frequency companions.  The
generating sets are tile subsets sitting under a *top* (a dyadic interval
I_E and a frequency xi_E) such that every member P has I_P inside I_E and
the 1/(2|I_E|)-ball around xi_E inside the widened band of P (the convex
hull of 50 omega_P and 50 omega_{P,upper}).  The outer measure is the
minimal total top length over covers by generating sets; sizes are local
l^t averages over generating subsets; outer L^p norms integrate the exact
super-level step function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .constants import DEFAULT_CONSTANTS, ToolkitConstants
from .grid import SampledSignal, chi_tilde
from .intervals import DyadicInterval, Interval, as_fraction, hull, pow2
from .models import MeasurableData, truncation_indicators
from .packets import build_packet, torus_distance
from .tiles import RigidTriples, Tile


def widened_band(tile: Tile, rigid: RigidTriples) -> Interval:
    """Convex hull of 50 omega_P and 50 omega_{P,upper} (upper must be finite)."""
    upper = rigid.upper(tile.freq)
    if not upper.finite_length():
        raise ValueError("widened band needs a finite upper companion")
    return hull(tile.freq.enlarge(50), upper.enlarge(50))


def rigid_sandwich_ok(tile: Tile, rigid: RigidTriples, factor: int = 1000) -> bool:
    """factor*omega_P strictly between the lower and upper companions."""
    big = tile.freq.enlarge(factor)
    lower = rigid.lower(tile.freq)
    upper = rigid.upper(tile.freq)
    return lower.hi <= big.lo and big.hi <= upper.lo


@dataclass(frozen=True)
class GeneratingSet:
    top_interval: DyadicInterval
    top_xi: Fraction
    members: tuple[int, ...]          # indices into the ground set, sorted
    lacunary_members: tuple[int, ...]  # subset with xi_E in 50 omega_upper

    @property
    def cost(self) -> Fraction:
        return self.top_interval.length

    def flavor_members(self, flavor: str) -> tuple[int, ...]:
        if flavor == "lacunary":
            return self.lacunary_members
        if flavor == "overlapping":
            return tuple(i for i in self.members if i not in set(self.lacunary_members))
        return self.members


class OuterSpace:
    """Finite tile ground set with enumerated generating candidates."""

    def __init__(self, tiles: Sequence[Tile], rigid: RigidTriples,
                 extra_xi: Iterable = (), exact_cover_limit: int = 20):
        self.tiles = list(tiles)
        self.rigid = rigid
        self.exact_cover_limit = exact_cover_limit
        self.bands = [widened_band(t, rigid) for t in self.tiles]
        self.upper50 = [rigid.upper(t.freq).enlarge(50) for t in self.tiles]
        self.candidates = self._enumerate(extra_xi)
        if self.tiles and not self._covered():
            raise AssertionError("candidate family fails to cover the ground set")

    # -- enumeration -------------------------------------------------------
    def _top_intervals(self) -> list[DyadicInterval]:
        if not self.tiles:
            return []
        k_min = min(t.space.k for t in self.tiles)
        out = []
        for k in range(k_min, 1):
            out.extend(DyadicInterval(n, k) for n in range(0, 2 ** (-k)))
        out.append(DyadicInterval(0, 0))
        return out

    def _xi_menu(self, extra_xi) -> list[Fraction]:
        menu: set[Fraction] = set()
        for band, up in zip(self.bands, self.upper50):
            for iv in (band, up):
                menu.update((iv.lo, iv.hi, iv.center))
        for t in self.tiles:
            menu.update((t.freq.lo, t.freq.hi, t.freq.center))
        lo = min(b.lo for b in self.bands)
        hi = max(b.hi for b in self.bands)
        menu.update(Fraction(x) for x in range(math.ceil(lo), math.floor(hi) + 1)
                    if abs(x) <= 4096)
        menu.update(as_fraction(x) for x in extra_xi)
        return sorted(menu)

    def _enumerate(self, extra_xi) -> list[GeneratingSet]:
        cands = []
        seen = set()
        for I in self._top_intervals():
            inside = [i for i, t in enumerate(self.tiles)
                      if I.contains_interval(t.space)]
            if not inside:
                continue
            r = Fraction(1, 2) / I.length
            for xi in self._xi_menu(extra_xi):
                members = tuple(i for i in inside
                                if self.bands[i].lo <= xi - r
                                and xi + r <= self.bands[i].hi)
                if not members:
                    continue
                lac = tuple(i for i in members if self.upper50[i].contains(xi))
                key = (I, members, lac)
                if key in seen:
                    continue
                seen.add(key)
                cands.append(GeneratingSet(I, xi, members, lac))
        return cands

    def _covered(self) -> bool:
        covered = set()
        for c in self.candidates:
            covered.update(c.members)
        return covered == set(range(len(self.tiles)))

    # -- outer measure -------------------------------------------------------
    def outer_measure(self, subset: Iterable[int]) -> "CoverResult":
        """Min total top length over covers of the subset by candidates."""
        need = frozenset(subset)
        if not need:
            return CoverResult(0.0, [], "exact", 0.0)
        cands = []
        seen_cover = {}
        for idx, c in enumerate(self.candidates):
            cover = need & frozenset(c.members)
            if not cover:
                continue
            prev = seen_cover.get(cover)
            if prev is None or c.cost < prev[0]:
                seen_cover[cover] = (c.cost, idx)
        cands = [(cov, cost, idx) for cov, (cost, idx) in seen_cover.items()]
        # drop dominated candidates (smaller coverage at >= cost)
        cands.sort(key=lambda z: (z[1], -len(z[0])))
        kept = []
        for cov, cost, idx in cands:
            if not any(cov <= k_cov and k_cost <= cost for k_cov, k_cost, _ in kept):
                kept.append((cov, cost, idx))
        if len(kept) <= self.exact_cover_limit:
            value, chosen = _exact_cover(need, kept)
            return CoverResult(float(value), [self.candidates[i] for i in chosen],
                               "exact", 0.0)
        value, chosen, bound = _greedy_cover(need, kept)
        return CoverResult(float(value), [self.candidates[i] for i in chosen],
                           "greedy", float(value - bound))

    # -- sizes ---------------------------------------------------------------
    def size(self, values: np.ndarray, cand: GeneratingSet, t: float,
             flavor: str = "any", restrict: Optional[frozenset] = None) -> float:
        """S_t(values)(E): sup over admissible generating subsets of E."""
        if t <= 0:
            raise ValueError("size exponent must be positive")
        base = set(cand.members) if restrict is None else set(cand.members) & restrict
        if math.isinf(t):
            return max((abs(values[i]) for i in base), default=0.0)
        best = 0.0
        for sub in self.candidates:
            mem = set(sub.flavor_members(flavor))
            if not mem or not mem <= set(cand.members):
                continue
            mem = mem if restrict is None else mem & restrict
            if not mem:
                continue
            s = sum(abs(values[i]) ** t * float(self.tiles[i].space.length)
                    for i in mem)
            best = max(best, (s / float(sub.cost)) ** (1.0 / t))
        return best

    def _cand_average(self, values, cand, t, flavor, restrict) -> float:
        mem = set(cand.flavor_members(flavor))
        if restrict is not None:
            mem &= restrict
        if not mem:
            return 0.0
        if math.isinf(t):
            return max(abs(values[i]) for i in mem)
        s = sum(abs(values[i]) ** t * float(self.tiles[i].space.length) for i in mem)
        return (s / float(cand.cost)) ** (1.0 / t)

    def outsup(self, values: np.ndarray, t: float, flavor: str = "any",
               restrict: Optional[frozenset] = None) -> float:
        """sup over all candidates of the plain t-average (the outer sup)."""
        return max((self._cand_average(values, c, t, flavor, restrict)
                    for c in self.candidates), default=0.0)

    # -- super-level sets and norms -------------------------------------------
    def level_frontier(self, values: np.ndarray, t: float,
                       flavor: str = "any") -> list[tuple[float, float, frozenset]]:
        """Pareto frontier of (outsup after removal, cover cost of removal).

        Exhaustive over removal subsets; exact for small ground sets.
        """
        n = len(self.tiles)
        if n > 16:
            raise ValueError("exact frontier limited to 16 tiles")
        pairs = []
        for mask in range(2 ** n):
            removed = frozenset(i for i in range(n) if mask >> i & 1)
            rest = frozenset(range(n)) - removed
            s = self.outsup(values, t, flavor, restrict=rest)
            mu = self.outer_measure(removed).value
            pairs.append((s, mu, removed))
        pairs.sort(key=lambda z: (z[0], z[1]))
        frontier = []
        best = math.inf
        for s, mu, rem in pairs:
            if mu < best:
                frontier.append((s, mu, rem))
                best = mu
        return frontier

    def super_level(self, values: np.ndarray, lam: float, t: float,
                    flavor: str = "any") -> tuple[float, frozenset, str]:
        """(mu value, removal set, method) with outsup after removal <= lam."""
        if len(self.tiles) <= 16:
            for s, mu, rem in self.level_frontier(values, t, flavor):
                if s <= lam:
                    return mu, rem, "exact"
            raise AssertionError("frontier always ends at full removal")
        sel = self.energy_selection(values, lam, t, flavor)
        cost = sum(float(e.cost) for e in sel.selected)
        removed = frozenset().union(*sel.removed) if sel.removed else frozenset()
        return cost, removed, "greedy"

    def outer_lp_norm(self, values: np.ndarray, p: float, t: float,
                      flavor: str = "any", weak: bool = False) -> float:
        """Outer L^p norm from the exact super-level step function."""
        if p <= 0:
            raise ValueError("p must be positive")
        if math.isinf(p):
            return self.outsup(values, t, flavor)
        frontier = self.level_frontier(values, t, flavor)
        # mu(S > lam) = min {mu(F): outsup after F <= lam}: right-continuous,
        # nonincreasing step function with jumps at the frontier s-values.
        svals = [f[0] for f in frontier]
        mus = [f[1] for f in frontier]
        if weak:
            best = 0.0
            for i in range(len(frontier)):
                lam_hi = svals[i]           # sup over [s_{i-1}, s_i) approached
                mu = mus[i - 1] if i > 0 else mus[0]
                if i == 0:
                    continue
                best = max(best, lam_hi * mus[i - 1] ** (1.0 / p))
            return best
        total = 0.0
        for i in range(1, len(frontier)):
            lo, hi = svals[i - 1], svals[i]
            mu = mus[i - 1]
            total += mu * (hi ** p - lo ** p)
        return total ** (1.0 / p)

    # -- energy selection ------------------------------------------------------
    def energy_selection(self, values: np.ndarray, lam: float, t: float = 2.0,
                         flavor: str = "lacunary") -> "SelectionResult":
        """Iteratively select threshold-exceeding sets with smallest top xi.

        Selected sets use the flavor-restricted members; removal takes every
        remaining tile under the same top.  The remainder's outer sup is at
        most lam by construction.
        """
        remaining = set(range(len(self.tiles)))
        selected, removed = [], []
        while True:
            best = None
            for c in self.candidates:
                mem = set(c.flavor_members(flavor)) & remaining
                if not mem:
                    continue
                s = sum(abs(values[i]) ** t * float(self.tiles[i].space.length)
                        for i in mem)
                val = (s / float(c.cost)) ** (1.0 / t)
                if val > lam:
                    key = (c.top_xi, c.cost, tuple(sorted(mem)))
                    if best is None or key < best[0]:
                        best = (key, c, mem)
            if best is None:
                break
            _, c, mem = best
            grab = set(c.members) & remaining
            selected.append(GeneratingSet(c.top_interval, c.top_xi,
                                          tuple(sorted(mem)),
                                          tuple(sorted(mem))))
            removed.append(frozenset(grab))
            remaining -= grab
        return SelectionResult(selected, removed, frozenset(remaining))


@dataclass
class CoverResult:
    value: float
    cover: list
    method: str
    gap: float


@dataclass
class SelectionResult:
    selected: list[GeneratingSet]
    removed: list[frozenset]
    remainder: frozenset


def _exact_cover(need: frozenset, cands: list) -> tuple[Fraction, list[int]]:
    """Branch and bound set cover; cands are (coverage, cost, index)."""
    best_val = [None]
    best_sel = [None]

    order = sorted(range(len(cands)), key=lambda i: float(cands[i][1]) / len(cands[i][0]))

    def rec(uncovered: frozenset, cost: Fraction, chosen: list):
        if not uncovered:
            if best_val[0] is None or cost < best_val[0]:
                best_val[0] = cost
                best_sel[0] = list(chosen)
            return
        if best_val[0] is not None and cost >= best_val[0]:
            return
        # branch on the element with fewest covering candidates
        counts = {}
        for e in uncovered:
            counts[e] = [i for i in order if e in cands[i][0]]
        pivot, options = min(counts.items(), key=lambda kv: len(kv[1]))
        if not options:
            return  # uncoverable branch
        for i in options:
            cov, c_cost, idx = cands[i]
            chosen.append(idx)
            rec(uncovered - cov, cost + c_cost, chosen)
            chosen.pop()

    rec(need, Fraction(0), [])
    if best_val[0] is None:
        raise AssertionError("ground subset not coverable by candidates")
    return best_val[0], best_sel[0]


def _greedy_cover(need: frozenset, cands: list) -> tuple[Fraction, list[int], Fraction]:
    uncovered = set(need)
    total = Fraction(0)
    chosen = []
    while uncovered:
        best = min(cands, key=lambda z: float(z[1]) / max(len(z[0] & uncovered), 1e-9)
                   if z[0] & uncovered else math.inf)
        if not best[0] & uncovered:
            raise AssertionError("greedy cover stuck")
        total += best[1]
        chosen.append(best[2])
        uncovered -= best[0]
    bound = max((min((cost for cov, cost, _ in cands if e in cov), default=Fraction(0))
                 for e in need), default=Fraction(0))
    return total, chosen, bound


# ---------------------------------------------------------------------------
# strong disjointness
# ---------------------------------------------------------------------------

def strongly_disjoint(families: Sequence[tuple[DyadicInterval, Sequence[Tile]]]
                      ) -> tuple[bool, Optional[tuple]]:
    """Pairwise separation: overlapping widened frequencies force spatial
    escape from the other family's top interval."""
    for m, (top_m, tiles_m) in enumerate(families):
        for n, (top_n, tiles_n) in enumerate(families):
            if m == n:
                continue
            for p1 in tiles_m:
                for p2 in tiles_n:
                    if p1.freq.enlarge(10).intersects(p2.freq.enlarge(10)) \
                            and p1.space.length <= p2.space.length:
                        if p1.space.interval().intersects(top_n.interval()):
                            return False, (m, n, p1, p2)
    return True, None


# ---------------------------------------------------------------------------
# embeddings and tile averages
# ---------------------------------------------------------------------------

def embed_plain(f: SampledSignal, tile: Tile, rigid: RigidTriples,
                constants: ToolkitConstants = DEFAULT_CONSTANTS,
                check_sandwich: bool = True) -> complex:
    """T_1: the packet coefficient <f, phi_P>."""
    if check_sandwich and not rigid_sandwich_ok(tile, rigid):
        raise ValueError("rigid companions too close: 1000 omega_P not between")
    packet = build_packet(tile, f.G, p=1.0, constants=constants)
    return f.inner(packet.signal)


def embed_truncated(f: SampledSignal, tile: Tile, rigid: RigidTriples,
                    data: MeasurableData,
                    alphas: Optional[np.ndarray] = None,
                    constants: ToolkitConstants = DEFAULT_CONSTANTS,
                    check_sandwich: bool = True) -> complex:
    """T_2: <f, sum_j d_j phi~_{P,j} 1_{|I_P| <= alpha_j(x)}>."""
    if check_sandwich and not rigid_sandwich_ok(tile, rigid):
        raise ValueError("rigid companions too close: 1000 omega_P not between")
    packet = build_packet(tile, f.G, p=1.0, constants=constants)
    ind = truncation_indicators(tile.freq, rigid, data)  # (G, J)
    if alphas is not None:
        ind = ind * (float(tile.space.length) <= alphas.T).astype(float)
    weight = (data.coefficients * ind).sum(axis=1)
    g = SampledSignal(packet.samples * weight)
    return f.inner(g)


def tile_maximal_average(tiles: Sequence[Tile], f_values: np.ndarray, N: int) -> float:
    """sup_P (1/|I_P|) integral chi~_{I_P}^N f over the torus grid."""
    G = f_values.size
    t = np.arange(G) / G
    best = 0.0
    for tile in tiles:
        c = float(tile.space.center) % 1.0
        h = float(tile.space.length)
        w = (1.0 + torus_distance(t, c) / h) ** (-2 * N)
        best = max(best, float(np.mean(w * f_values) / h))
    return best


def completion_tiles(tiles: Sequence[Tile], rigid: RigidTriples,
                     max_ratio: int = 30) -> list[Tile]:
    """Tiles R with I_{P1} inside I_R inside 30 I_{P2} and widened bands
    meeting both; the completion used by sequence averages."""
    out = []
    k_lo = min(t.space.k for t in tiles)
    k_hi = max(t.space.k for t in tiles) + 5  # 30 < 2^5
    bands = [widened_band(t, rigid) for t in tiles]
    for k in range(k_lo, min(k_hi, 0) + 1):
        freq_len = pow2(-k)
        for n in range(0, 2 ** (-k) if k < 0 else 1):
            I = DyadicInterval(n, k)
            if not any(I.contains_interval(t.space) for t in tiles):
                continue
            if not any(t.space.enlarge(max_ratio).contains_interval(I.interval())
                       for t in tiles):
                continue
            lo = math.floor(min(b.lo for b in bands) / freq_len) - 1
            hi = math.ceil(max(b.hi for b in bands) / freq_len) + 1
            for m in range(lo, hi + 1):
                om = DyadicInterval(m, -k)
                R = Tile(I, om)
                wb = widened_band(R, rigid)
                if any(wb.intersects(b) for b in bands):
                    out.append(R)
    return out


def sequence_average(tiles: Sequence[Tile], rigid: RigidTriples,
                     g_values: np.ndarray, breakpoints: np.ndarray,
                     s: float, N: int, max_completion: int = 4000) -> float:
    """sup over completion tiles R of
    (1/|I_R|) int chi~_{I_R}^N (sum_{j: N_j in band(R)} |g_j|^s)^{1/s}.

    g_values: (J, G) per-sample sequence; breakpoints: (G, J+1) with N_j at
    column j (matching the measurable-data layout).
    """
    if s <= 0:
        raise ValueError("s must be positive")
    J, G = g_values.shape
    t = np.arange(G) / G
    best = 0.0
    comp = completion_tiles(tiles, rigid)[:max_completion]
    for R in comp:
        band = widened_band(R, rigid)
        lo = -math.inf if isinstance(band.lo, float) else float(band.lo)
        hi = math.inf if isinstance(band.hi, float) else float(band.hi)
        nj = breakpoints[:, 1:J + 1]  # N_j for j = 1..J
        mask = ((nj >= lo) & (nj < hi)).T  # (J, G)
        if math.isinf(s):
            inner = np.max(np.abs(g_values) * mask, axis=0)
        else:
            inner = (np.sum((np.abs(g_values) * mask) ** s, axis=0)) ** (1.0 / s)
        c = float(R.space.center) % 1.0
        h = float(R.space.length)
        w = (1.0 + torus_distance(t, c) / h) ** (-2 * N)
        best = max(best, float(np.mean(w * inner) / h))
    return best


def variation_tile_operator(tiles: Sequence[Tile], rigid: RigidTriples,
                            g: dict[Tile, complex], data: MeasurableData,
                            r: float, G: int,
                            constants: ToolkitConstants = DEFAULT_CONSTANTS
                            ) -> np.ndarray:
    """V(x) = (sum_j sup_alpha |sum_{P: |I_P| <= alpha} |I_P| g(P)
    phi~_{P,j}(x)|^r)^{1/r}, alpha over tile scales."""
    scales = sorted({t.space.length for t in tiles})
    J = data.J
    partial = np.zeros((len(scales), J, G), dtype=complex)
    for tile in tiles:
        pk = build_packet(tile, G, p=1.0, constants=constants)
        ind = truncation_indicators(tile.freq, rigid, data)  # (G, J)
        term = (float(tile.space.length) * g.get(tile, 0.0)
                * pk.samples)[:, None] * ind  # (G, J)
        si = scales.index(tile.space.length)
        partial[si] += term.T
    cum = np.cumsum(partial, axis=0)  # partial sums up to each scale threshold
    sup_alpha = np.max(np.abs(cum), axis=0)  # (J, G)
    return (np.sum(sup_alpha ** r, axis=0)) ** (1.0 / r)


def orthogonality_ratio(families: Sequence[tuple[DyadicInterval, Sequence[Tile]]],
                        g: dict[Tile, complex], G: int,
                        constants: ToolkitConstants = DEFAULT_CONSTANTS) -> float:
    """Measured constant in the almost-orthogonality bound for strongly
    disjoint selections: ||sum |I_P| g(P) phi_P||_2 over the right-hand side."""
    tiles = [t for _, fam in families for t in fam]
    if not tiles:
        return 0.0
    acc = np.zeros(G, dtype=complex)
    sq = 0.0
    sup = 0.0
    for tile in tiles:
        pk = build_packet(tile, G, p=1.0, constants=constants)
        coef = g.get(tile, 0.0)
        acc += float(tile.space.length) * coef * pk.samples
        sq += float(tile.space.length) * abs(coef) ** 2
        sup = max(sup, abs(coef))
    lhs = float(np.sqrt(np.mean(np.abs(acc) ** 2)))
    tops = sum(float(top.length) for top, _ in families)
    rhs = math.sqrt(sq) + sup * math.sqrt(tops)
    return lhs / rhs if rhs else 0.0
