"""The triangular symbol 1_{M < xi1 < xi2 < N} and its three-part splitting.

The indicator splits as ``edge + diag + corner`` where

* the *edge* part is a smooth restriction to the region hugging the two
  edges ``xi1 = M`` and ``xi2 = N`` away from the diagonal (tensor products
  of endpoint-partition bumps, constrained by a five-row class table);
* the *diag* part hugs the diagonal segment away from the corners (Whitney
  squares times an endpoint partition of ``(2M, 2N)`` in ``xi1 + xi2``);
* the *corner* part is the residual, supported near the two corner points.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constants import DEFAULT_CONSTANTS, ToolkitConstants
from .intervals import as_fraction
from .partition import HPartition
from .whitney import WhitneyCover

# (class of xi1 entry, class of xi2 entry) -> scale rule
# rule: -1 means |I| <= |J|/16, +1 means |I| >= 16|J|, 0 means no constraint
EDGE_RULES = {
    (1, 1): -1,
    (1, 2): -1,
    (1, 3): 0,
    (2, 3): +1,
    (3, 3): +1,
}


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

def in_edge_region(xi1, xi2, M, N, wide: bool = False):
    """Near the edges: min(xi1 - M, N - xi2) <= (xi2 - xi1)/200 (1/3 if wide)."""
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    M, N = float(M), float(N)
    inside = (M <= xi1) & (xi1 <= xi2) & (xi2 <= N)
    gap = xi2 - xi1
    factor = 1.0 / 3.0 if wide else 1.0 / 200.0
    cond = np.minimum(xi1 - M, N - xi2) <= factor * gap
    if not wide:
        cond &= gap > 0
    out = inside & cond
    return out if out.ndim else bool(out)


def in_diag_region(xi1, xi2, M, N, wide: bool = False):
    """Near the diagonal: |xi1 - xi2| small against min |xi1 + xi2 - 2{M,N}|."""
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    M, N = float(M), float(N)
    sigma = xi1 + xi2
    dmin = np.minimum(np.abs(sigma - 2 * M), np.abs(sigma - 2 * N))
    if wide:
        out = np.abs(xi1 - xi2) <= dmin / 4.0
    else:
        inside = (M < xi1) & (xi1 < N) & (M < xi2) & (xi2 < N)
        out = inside & (np.abs(xi1 - xi2) < dmin / 100.0)
    return out if out.ndim else bool(out)


REGIONS = {
    "edge": lambda x1, x2, M, N: in_edge_region(x1, x2, M, N, wide=False),
    "edge_wide": lambda x1, x2, M, N: in_edge_region(x1, x2, M, N, wide=True),
    "diag": lambda x1, x2, M, N: in_diag_region(x1, x2, M, N, wide=False),
    "diag_wide": lambda x1, x2, M, N: in_diag_region(x1, x2, M, N, wide=True),
}


def region_membership(point, region: str, M, N) -> bool:
    """Exact-constant membership test for one point."""
    return bool(REGIONS[region](point[0], point[1], M, N))


# ---------------------------------------------------------------------------
# the symbol
# ---------------------------------------------------------------------------

@dataclass
class SymbolTails:
    """Measured truncation diagnostics of a symbol instance."""

    series_radius: int
    reconstruction_tail: float  # sup_points sum_sq |truncated - exact|


class TriangularSymbol:
    """Evaluators for the indicator and its edge/diag/corner components."""

    def __init__(self, M, N, constants: ToolkitConstants = DEFAULT_CONSTANTS):
        self.M = as_fraction(M)
        self.N = as_fraction(N)
        if self.M >= self.N:
            raise ValueError("need M < N")
        self.constants = constants
        self._H: HPartition | None = None
        self._H2: HPartition | None = None
        self._cover: WhitneyCover | None = None

    # -- lazily built machinery -----------------------------------------
    @property
    def partition(self) -> HPartition:
        if self._H is None:
            self._H = HPartition(self.M, self.N, self.constants)
        return self._H

    @property
    def sum_partition(self) -> HPartition:
        """Endpoint partition of (2M, 2N), used in the xi1 + xi2 variable."""
        if self._H2 is None:
            self._H2 = HPartition(2 * self.M, 2 * self.N, self.constants)
        return self._H2

    @property
    def cover(self) -> WhitneyCover:
        if self._cover is None:
            self._cover = WhitneyCover(self.M, self.N, self.constants.min_scale,
                                       self.constants)
        return self._cover

    # -- component evaluators ---------------------------------------------
    def indicator_values(self, xi1, xi2) -> np.ndarray:
        xi1 = np.atleast_1d(np.asarray(xi1, dtype=float))
        xi2 = np.atleast_1d(np.asarray(xi2, dtype=float))
        M, N = float(self.M), float(self.N)
        return ((M < xi1) & (xi1 < xi2) & (xi2 < N)).astype(float)

    def edge_values(self, xi1, xi2) -> np.ndarray:
        """Five constrained sub-sums of bump tensor products."""
        xi1 = np.atleast_1d(np.asarray(xi1, dtype=float))
        xi2 = np.atleast_1d(np.asarray(xi2, dtype=float))
        H = self.partition
        out = np.zeros(xi1.shape)
        for p in range(xi1.size):
            total = 0.0
            for i in H.entries_near(xi1.flat[p]):
                ei = H.entries[i]
                vi = float(H.bump_values(ei, xi1.flat[p]))
                if vi == 0.0:
                    continue
                for j in H.entries_near(xi2.flat[p]):
                    ej = H.entries[j]
                    rule = EDGE_RULES.get((ei.detail_class, ej.detail_class))
                    if rule is None:
                        continue
                    li, lj = ei.interval.length, ej.interval.length
                    if rule == -1 and not (16 * li <= lj):
                        continue
                    if rule == +1 and not (li >= 16 * lj):
                        continue
                    total += vi * float(H.bump_values(ej, xi2.flat[p]))
            out.flat[p] = total
        return out

    def diag_values(self, xi1, xi2, min_square_ratio=None) -> np.ndarray:
        """Whitney squares times the (2M, 2N) partition in xi1 + xi2.

        A square of side l pairs with partition entries of length >= l.
        """
        xi1 = np.atleast_1d(np.asarray(xi1, dtype=float))
        xi2 = np.atleast_1d(np.asarray(xi2, dtype=float))
        H2 = self.sum_partition
        cover = self.cover
        out = np.zeros(xi1.shape)
        for sq, idx in cover.squares_at_points(xi1.ravel(), xi2.ravel()).items():
            x1 = xi1.ravel()[idx]
            x2 = xi2.ravel()[idx]
            sigma = x1 + x2
            scale_sum = H2.partition_sum(sigma, min_length=sq.side)
            if not np.any(scale_sum):
                continue
            series = cover.series(sq)
            vals = series.evaluate(x1, x2)
            cell_sum = np.zeros(sigma.shape)
            for cell in cover.sum_cover_cells(sq):
                cell_sum += cover.sum_cover_profile(cell, sigma)
            np.add.at(out.ravel(), idx, vals * cell_sum * scale_sum)
        return out

    def corner_values(self, xi1, xi2) -> np.ndarray:
        """Residual: indicator minus edge minus diag."""
        return (self.indicator_values(xi1, xi2)
                - self.edge_values(xi1, xi2)
                - self.diag_values(xi1, xi2))

    def values(self, kind: str, xi1, xi2) -> np.ndarray:
        return {
            "indicator": self.indicator_values,
            "edge": self.edge_values,
            "diag": self.diag_values,
            "corner": self.corner_values,
        }[kind](xi1, xi2)

    # -- diagonal reconstruction diagnostics -------------------------------
    def halfplane_reconstruction(self, xi1, xi2) -> np.ndarray:
        """Sum of all truncated square expansions; approximates 1_{xi1 < xi2}."""
        xi1 = np.atleast_1d(np.asarray(xi1, dtype=float))
        xi2 = np.atleast_1d(np.asarray(xi2, dtype=float))
        out = np.zeros(xi1.shape)
        cover = self.cover
        for sq, idx in cover.squares_at_points(xi1.ravel(), xi2.ravel()).items():
            series = cover.series(sq)
            x1, x2 = xi1.ravel()[idx], xi2.ravel()[idx]
            sigma = x1 + x2
            cell_sum = np.zeros(sigma.shape)
            for cell in cover.sum_cover_cells(sq):
                cell_sum += cover.sum_cover_profile(cell, sigma)
            np.add.at(out.ravel(), idx, series.evaluate(x1, x2) * cell_sum)
        return out

    def measured_tail(self, n_probe: int = 300, seed: int = 0) -> SymbolTails:
        """Aggregate series truncation error, sampled over the triangle."""
        rng = np.random.default_rng(seed)
        M, N = float(self.M), float(self.N)
        span = N - M
        margin = 4.0 * float(self.constants.min_scale)
        x1 = rng.uniform(M, N - margin, n_probe)
        x2 = x1 + rng.uniform(margin, np.maximum(N - x1 - margin, margin * 1.0001))
        keep = x2 < N
        x1, x2 = x1[keep], x2[keep]
        cover = self.cover
        total = np.zeros(x1.shape)
        for sq, idx in cover.squares_at_points(x1, x2).items():
            series = cover.series(sq)
            exact = cover.square_profile(sq, x1[idx], x2[idx])
            approx = series.evaluate(x1[idx], x2[idx])
            np.add.at(total, idx, np.abs(approx - exact))
        return SymbolTails(self.constants.series_radius, float(total.max(initial=0.0)))

    # -- dumps ------------------------------------------------------------
    def lattice_csv(self, path, n: int = 64):
        """(xi1, xi2, indicator, edge, diag, corner) over an n x n lattice."""
        M, N = float(self.M), float(self.N)
        axis = M + (np.arange(n) + 0.5) / n * (N - M)
        X1, X2 = np.meshgrid(axis, axis, indexing="ij")
        x1, x2 = X1.ravel(), X2.ravel()
        ind = self.indicator_values(x1, x2)
        edge = self.edge_values(x1, x2)
        diag = self.diag_values(x1, x2)
        corner = ind - edge - diag
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["xi1", "xi2", "indicator", "edge", "diag", "corner"])
            for row in zip(x1, x2, ind, edge, diag, corner):
                w.writerow([f"{v:.12g}" for v in row])
        return np.stack([ind, edge, diag, corner], axis=0).reshape(4, n, n)

    def terms_json(self, path):
        """Audit dump: partition entries, class rules, and square inventory."""
        H = self.partition
        doc = {
            "M": str(self.M), "N": str(self.N),
            "margin": self.constants.margin,
            "entries": [
                {"lo": str(e.interval.lo), "hi": str(e.interval.hi),
                 "side": e.details.side, "m": e.details.m, "n": e.details.n,
                 "u": str(e.u), "v": str(e.v), "class": e.detail_class}
                for e in H.entries
            ],
            "edge_rules": {f"{a},{b}": r for (a, b), r in EDGE_RULES.items()},
            "sum_entries": len(self.sum_partition.entries),
            "squares": [
                {"k": sq.k, "b1": sq.b1, "b2": sq.b2,
                 "s1": [str(sq.s1.lo), str(sq.s1.hi)],
                 "s2": [str(sq.s2.lo), str(sq.s2.hi)]}
                for sq in self.cover.squares()[:500]
            ],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)


def symbol_min_margin(constants: ToolkitConstants) -> int:
    """Smallest partition margin for which the diag support lemma geometry
    closes: (4*L2 + 23/6) <= (margin - 5/8)/4 with L2 = margin/40."""
    for L1 in range(1, 4096):
        if Fraction(L1, 10) + Fraction(23, 6) <= Fraction(L1) / 4 - Fraction(5, 8) / 4:
            return L1
    raise AssertionError("unreachable")
