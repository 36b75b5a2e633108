"""Bilinear Fourier operators, variation norms, and dual certificates.

Window values A(M, N)(x) = sum_{M < xi1 < xi2 < N} f1^(xi1) f2^(xi2)
e^{i x (xi1 + xi2)} are computed in O(1) per query from per-sample prefix
arrays; variation norms maximize l^(r/2) sums of window magnitudes over
breakpoint chains by exact dynamic programming over half-integer frequency
cuts (the window values are constant between consecutive integers, so the
restriction is lossless).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import SampledSignal


def _check_common_grid(*signals: SampledSignal) -> int:
    sizes = {s.G for s in signals}
    if len(sizes) != 1:
        raise ValueError(f"signals on mismatched grids {sorted(sizes)}")
    return sizes.pop()


def cut_positions(G: int) -> np.ndarray:
    """Half-integer cuts c_j = j - G/2 - 1/2, j = 0..G; cut j is below xi_j."""
    return np.arange(G + 1) - G / 2 - 0.5


def apply_symbol(symbol, f1: SampledSignal, f2: SampledSignal) -> SampledSignal:
    """x -> sum_{xi1, xi2} m(xi1, xi2) f1^(xi1) f2^(xi2) e^{i x (xi1 + xi2)}.

    ``symbol`` is 1 (the constant), a vectorized callable of (xi1, xi2), or
    an object with a ``values(xi1, xi2)`` method.
    """
    G = _check_common_grid(f1, f2)
    xi = f1.frequencies.astype(float)
    X1, X2 = np.meshgrid(xi, xi, indexing="ij")
    if symbol is None or (np.isscalar(symbol) and symbol == 1):
        m = np.ones_like(X1)
    elif hasattr(symbol, "values"):
        m = np.asarray(symbol.values(X1.ravel(), X2.ravel()), dtype=float).reshape(G, G)
    else:
        m = np.asarray(symbol(X1, X2), dtype=float)
    weights = m * np.outer(f1.spectrum, f2.spectrum)
    bins = np.zeros(G, dtype=complex)
    total = (np.add.outer(np.arange(G), np.arange(G))) % G  # (xi1+xi2) mod G bins
    np.add.at(bins, total.ravel(), weights.ravel())
    samples = np.fft.ifft(bins) * G
    return SampledSignal(samples)


def halfplane_symbol(X1, X2):
    """The indicator 1_{xi1 < xi2}."""
    return (X1 < X2).astype(float)


def band_symbol(M: float, N: float):
    """The indicator 1_{M < xi1 < xi2 < N}."""
    def m(X1, X2):
        return ((M < X1) & (X1 < X2) & (X2 < N)).astype(float)
    return m


class WindowIntegral:
    """Prefix arrays P, Q, T per sample; O(1) window queries after O(G^2) setup."""

    def __init__(self, f1: SampledSignal, f2: SampledSignal):
        G = _check_common_grid(f1, f2)
        self.G = G
        self.cuts = cut_positions(G)
        t = np.arange(G) / G
        xi = f1.frequencies
        E = np.exp(2j * np.pi * np.outer(t, xi))
        g1 = E * f1.spectrum[None, :]
        g2 = E * f2.spectrum[None, :]
        zero = np.zeros((G, 1), dtype=complex)
        self.P = np.hstack([zero, np.cumsum(g1, axis=1)])
        self.Q = np.hstack([zero, np.cumsum(g2, axis=1)])
        self.T = np.hstack([zero, np.cumsum(g2 * self.P[:, :-1], axis=1)])

    def window_all_samples(self, i: int, j: int) -> np.ndarray:
        """A(c_i, c_j) at every sample; zero if j <= i."""
        if j <= i:
            return np.zeros(self.G, dtype=complex)
        return (self.T[:, j] - self.T[:, i]
                - self.P[:, i] * (self.Q[:, j] - self.Q[:, i]))

    def window_value(self, M: float, N: float, x_index: int) -> complex:
        """A(M, N) at one sample: the sum over M < xi1 < xi2 < N."""
        if M > N:
            return 0j
        half = self.G // 2
        i = max(0, min(self.G, math.floor(M + half) + 1))
        j = max(0, min(self.G, math.ceil(N + half)))
        if j <= i:
            return 0j
        return complex(self.window_all_samples(i, j)[x_index])


@dataclass
class VariationResult:
    value: float          # the variation norm, power 1/rho of the optimum
    optimum: float        # max over chains of sum |A|^rho
    chain: list[int]      # optimal cut indices, increasing
    increments: list[complex] = field(default_factory=list)


def variation_dp(window, n_cuts: int, rho: float) -> VariationResult:
    """Exact DP over one sample's cut set.

    ``window(i, j)`` returns the complex increment A(c_i, c_j).  The Bellman
    recursion enumerates all chains exactly for every rho > 0; window values
    are not additive under refinement (recombination cross terms), so no
    finest-partition shortcut applies.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    best = np.zeros(n_cuts)
    link = np.full(n_cuts, -1, dtype=int)
    for j in range(1, n_cuts):
        for i in range(j):
            cand = best[i] + abs(window(i, j)) ** rho
            if cand > best[j]:
                best[j] = cand
                link[j] = i
    end = int(np.argmax(best))
    optimum = float(best[end])
    if optimum == 0.0:
        return VariationResult(0.0, 0.0, [], [])
    chain = [end]
    while link[chain[-1]] >= 0:
        chain.append(int(link[chain[-1]]))
    chain.reverse()
    incs = [window(a, b) for a, b in zip(chain, chain[1:])]
    return VariationResult(optimum ** (1.0 / rho), optimum, chain, incs)


def variation_values(f1: SampledSignal, f2: SampledSignal, r: float) -> np.ndarray:
    """T_r at every sample: sup over chains of (sum |A|^{r/2})^{2/r}."""
    wi = WindowIntegral(f1, f2)
    return _variation_values_from(wi, r)


def _variation_values_from(wi: WindowIntegral, r: float) -> np.ndarray:
    rho = r / 2.0
    G = wi.G
    B = G + 1
    best = np.zeros((G, B))
    for j in range(1, B):
        # A(c_i, c_j) for all i < j, all samples, in one vectorized sweep
        a = (wi.T[:, j][:, None] - wi.T[:, :j]
             - wi.P[:, :j] * (wi.Q[:, j][:, None] - wi.Q[:, :j]))
        best[:, j] = np.max(best[:, :j] + np.abs(a) ** rho, axis=1)
    return np.max(best, axis=1) ** (2.0 / r)


def variation_at_sample(wi: WindowIntegral, r: float, x_index: int) -> VariationResult:
    """Single-sample T_r with the optimal chain (for certificates)."""
    return variation_dp(lambda i, j: wi.window_all_samples(i, j)[x_index],
                        wi.G + 1, r / 2.0)


@dataclass
class DualCertificate:
    """Per-point data (N_j, d_j) witnessing T_r(x) as a linear pairing."""

    K: int
    breakpoints: list[float]
    coefficients: list[complex]
    increments: list[complex]
    value: float

    def mass(self, r: float) -> float:
        """sum |d_j|^{r/(r-2)}; equals 1 when K >= 1."""
        e = r / (r - 2.0)
        return float(sum(abs(d) ** e for d in self.coefficients))

    def pairing(self) -> complex:
        return sum(d * a for d, a in zip(self.coefficients, self.increments))


def dual_certificate(f1: SampledSignal, f2: SampledSignal, r: float,
                     x_index: int, wi: WindowIntegral | None = None) -> DualCertificate:
    """d_j = conj(a_j) |a_j|^{rho-2} / (sum |a_j|^rho)^{1 - 1/rho}, rho = r/2."""
    if r <= 2.0:
        raise ValueError("dual certificate needs r > 2")
    if wi is None:
        wi = WindowIntegral(f1, f2)
    res = variation_at_sample(wi, r, x_index)
    rho = r / 2.0
    incs = [a for a in res.increments if a != 0]
    if not incs:
        return DualCertificate(0, [], [], [], 0.0)
    S = sum(abs(a) ** rho for a in incs)
    scale = S ** (1.0 - 1.0 / rho)
    coefs = [np.conj(a) * abs(a) ** (rho - 2.0) / scale for a in incs]
    bps = [float(wi.cuts[c]) for c in res.chain]
    return DualCertificate(len(incs), bps, coefs, incs, res.value)


# ---------------------------------------------------------------------------
# iterated windows via multiplicative recombination
# ---------------------------------------------------------------------------

class IteratedWindows:
    """Prefix iterated sums for k signals and exact window recombination.

    P[(i, j)][x, c] = sum over xi_i < ... < xi_j < cut_c of the ordered
    product of spectra-times-phases; windows over (a, b) follow from the
    multiplicative splitting identity solved triangularly.
    """

    def __init__(self, signals: list[SampledSignal]):
        G = _check_common_grid(*signals)
        self.G = G
        self.k = len(signals)
        self.cuts = cut_positions(G)
        t = np.arange(G) / G
        xi = signals[0].frequencies
        E = np.exp(2j * np.pi * np.outer(t, xi))
        g = [E * s.spectrum[None, :] for s in signals]
        zero = np.zeros((G, 1), dtype=complex)
        self.P: dict[tuple[int, int], np.ndarray] = {}
        for i in range(1, self.k + 1):
            run = np.hstack([zero, np.cumsum(g[i - 1], axis=1)])
            self.P[(i, i)] = run
            for j in range(i + 1, self.k + 1):
                inner = self.P[(i, j - 1)][:, :-1]
                run = np.hstack([zero, np.cumsum(g[j - 1] * inner, axis=1)])
                self.P[(i, j)] = run
        self.E = E
        self.g = g

    def window(self, a: int, b: int) -> np.ndarray:
        """W_{1..k}(cut_a, cut_b) at every sample."""
        if b <= a:
            return np.zeros(self.G, dtype=complex)
        k = self.k
        W: dict[tuple[int, int], np.ndarray] = {}
        for j in range(k, 0, -1):
            for i in range(j, 0, -1):
                val = self.P[(i, j)][:, b].copy()
                for l in range(i, j + 1):
                    left = self.P[(i, l)][:, a] if l >= i else None
                    if l == j:
                        val -= self.P[(i, j)][:, a]
                    else:
                        val -= self.P[(i, l)][:, a] * W[(l + 1, j)]
                W[(i, j)] = val
        return W[(1, k)]

    def brute_window(self, a: int, b: int, x_index: int) -> complex:
        """Direct ordered sum over frequency tuples; exponential in k."""
        xi = np.arange(-self.G // 2, self.G // 2)
        lo, hi = self.cuts[a], self.cuts[b]
        idx = np.nonzero((xi > lo) & (xi < hi))[0]
        vals = [self.g[m][x_index, idx] for m in range(self.k)]
        def rec(m, start):
            if m == self.k:
                return 1.0 + 0j
            total = 0j
            for q in range(start, len(idx)):
                total += vals[m][q] * rec(m + 1, q + 1)
            return total
        return rec(0, 0)


def iterated_variation_values(signals: list[SampledSignal], r: float) -> np.ndarray:
    """T over chains of (sum_j |W(N_{j-1}, N_j)|^{r/k})^{k/r} at every sample."""
    k = len(signals)
    if k < 1:
        raise ValueError("need at least one signal")
    iw = IteratedWindows(signals)
    rho = r / k
    G = iw.G
    B = G + 1
    best = np.zeros((G, B))
    for j in range(1, B):
        stack = np.empty((G, j))
        for i in range(j):
            stack[:, i] = np.abs(iw.window(i, j)) ** rho
        best[:, j] = np.max(best[:, :j] + stack, axis=1)
    return np.max(best, axis=1) ** (1.0 / rho)


# ---------------------------------------------------------------------------
# bilinear variation over band projection families
# ---------------------------------------------------------------------------

def _band_projections(f: SampledSignal, bands: list[tuple[float, float]]) -> np.ndarray:
    """Per-band sample arrays; bands are half-open frequency intervals."""
    xi = f.frequencies
    lo = np.array([b[0] for b in bands])
    hi = np.array([b[1] for b in bands])
    order = np.argsort(lo)
    lo, hi = lo[order], hi[order]
    if np.any(hi[:-1] > lo[1:]) or np.any(hi <= lo):
        raise ValueError("bands must be nonempty, disjoint, and ordered")
    out = np.empty((len(bands), f.G), dtype=complex)
    for i in range(len(bands)):
        mask = (xi >= lo[i]) & (xi < hi[i])
        spec = np.where(mask, f.spectrum, 0)
        out[i] = np.fft.ifft(np.fft.ifftshift(spec)) * f.G
    return out


def bilinear_variation(h1: SampledSignal, h2: SampledSignal, r: float,
                       bands1: list[tuple[float, float]],
                       bands2: list[tuple[float, float]]) -> np.ndarray:
    """Pointwise sup over chains of
    (sum_k |sum_{N_{k-1} < i < j <= N_k} (D_i h1)(D~_j h2)|^{r/2})^{2/r}.

    The two band families must have equal length; index pairs follow the
    strict i < j ordering on the common index axis.
    """
    if len(bands1) != len(bands2):
        raise ValueError("band families must have equal length")
    _check_common_grid(h1, h2)
    D1 = _band_projections(h1, bands1)
    D2 = _band_projections(h2, bands2)
    nb, G = D1.shape
    C1 = np.vstack([np.zeros((1, G)), np.cumsum(D1, axis=0)])
    C2 = np.vstack([np.zeros((1, G)), np.cumsum(D2, axis=0)])
    U = np.vstack([np.zeros((1, G)),
                   np.cumsum(D2 * C1[:-1], axis=0)])
    rho = r / 2.0
    B = nb + 1
    best = np.zeros((G, B))
    for j in range(1, B):
        a = (U[j][None, :].T - U[:j].T
             - C1[:j].T * (C2[j][None, :].T - C2[:j].T))
        best[:, j] = np.max(best[:, :j] + np.abs(a) ** rho, axis=1)
    return np.max(best, axis=1) ** (2.0 / r)
