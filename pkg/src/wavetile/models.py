"""Discrete model operators driven by per-sample breakpoint data.

Four kinds, all built from L^1-normalized packets and truncation indicators
of the form 1_{N_{j-1}(x) in lower(omega_P)} 1_{N_j(x) in upper(omega_P)}:

* ``product``      two independent tile sums multiplied (Carleson x Carleson)
* ``paraproduct``  nested tile sums with the scale constraint |I'| <= |I|/16
* ``composed``     tri-tile coefficients composed with a finer tile sum
* ``aligned``      rigid tri-tiles gated by doubled and plain breakpoints
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .constants import DEFAULT_CONSTANTS, ToolkitConstants
from .grid import SampledSignal
from .intervals import DyadicInterval, Interval
from .packets import build_packet
from .tiles import RigidTriples, Tile, TriTile, is_rank1, is_sparse

KINDS = ("product", "paraproduct", "composed", "aligned")


@dataclass
class MeasurableData:
    """Per-sample K(x), breakpoints N_0 <= ... <= N_J, coefficients d_1..d_J.

    Where K(x) >= 1 the coefficient mass sum_j |d_j|^{r/(r-2)} equals one;
    for j > K(x) the coefficients vanish and the breakpoints repeat.
    """

    K: np.ndarray            # (G,) ints >= 0
    breakpoints: np.ndarray  # (G, J+1) floats, sorted along axis 1
    coefficients: np.ndarray  # (G, J) complex, d_j at column j-1

    @property
    def G(self) -> int:
        return self.K.size

    @property
    def J(self) -> int:
        return self.coefficients.shape[1]

    def validate(self, r: float, tol: float = 1e-9):
        if np.any(np.diff(self.breakpoints, axis=1) < 0):
            raise ValueError("breakpoints must be nondecreasing")
        e = r / (r - 2.0)
        mass = np.abs(self.coefficients) ** e
        for x in range(self.G):
            k = int(self.K[x])
            if k > 0 and abs(mass[x, :k].sum() - 1.0) > tol:
                raise ValueError(f"coefficient mass at sample {x} != 1")
            if np.any(self.coefficients[x, k:] != 0):
                raise ValueError(f"d_j nonzero beyond K at sample {x}")
            if k < self.J and np.any(np.diff(self.breakpoints[x, k:]) != 0):
                raise ValueError(f"breakpoints move beyond K at sample {x}")

    @classmethod
    def zero(cls, G: int, J: int = 3) -> "MeasurableData":
        return cls(np.zeros(G, dtype=int), np.zeros((G, J + 1)),
                   np.zeros((G, J), dtype=complex))

    @classmethod
    def random(cls, G: int, r: float, rng: np.random.Generator, J: int = 4,
               freq_span: float | None = None) -> "MeasurableData":
        span = (G / 2.0) if freq_span is None else freq_span
        K = rng.integers(0, J + 1, size=G)
        bp = np.sort(rng.uniform(-span, span, size=(G, J + 1)), axis=1)
        d = rng.standard_normal((G, J)) + 1j * rng.standard_normal((G, J))
        e = r / (r - 2.0)
        for x in range(G):
            k = int(K[x])
            d[x, k:] = 0
            bp[x, k:] = bp[x, k] if k <= J else bp[x, -1]
            if k >= 1:
                mass = (np.abs(d[x, :k]) ** e).sum()
                if mass == 0:
                    d[x, 0] = 1.0
                    mass = 1.0
                d[x, :k] /= mass ** (1.0 / e)
        return cls(K, bp, d)


def _interval_contains(iv: Interval, values: np.ndarray) -> np.ndarray:
    lo = -math.inf if isinstance(iv.lo, float) else float(iv.lo)
    hi = math.inf if isinstance(iv.hi, float) else float(iv.hi)
    return (values >= lo) & (values < hi)


def truncation_indicators(tile_freq, rigid: RigidTriples, data: MeasurableData,
                          doubled: bool = False) -> np.ndarray:
    """(G, J) indicator array: N_{j-1} in lower and N_j in upper (doubled: 2N)."""
    lower = rigid.lower(tile_freq)
    upper = rigid.upper(tile_freq)
    scale = 2.0 if doubled else 1.0
    prev = scale * data.breakpoints[:, :-1]
    curr = scale * data.breakpoints[:, 1:]
    ind = _interval_contains(lower, prev) & _interval_contains(upper, curr)
    j_index = np.arange(1, data.J + 1)[None, :]
    ind &= j_index <= data.K[:, None]
    return ind.astype(float)


def unique_j_selection(tile_freq, rigid: RigidTriples, data: MeasurableData) -> bool:
    """True if at most one j passes the truncation gate at every sample."""
    ind = truncation_indicators(tile_freq, rigid, data)
    return bool(np.all(ind.sum(axis=1) <= 1 + 1e-12))


@dataclass
class ModelOperatorSpec:
    kind: str
    tiles1: Sequence[Tile] = field(default_factory=list)
    rigid1: Optional[RigidTriples] = None
    tiles2: Sequence[Tile] = field(default_factory=list)
    rigid2: Optional[RigidTriples] = None
    tritiles: Sequence[TriTile] = field(default_factory=list)
    tri_rigid: tuple[RigidTriples, ...] = ()
    align_offsets: tuple[int, int] = (0, 0)  # (m2, m3) for 'aligned'
    constants: ToolkitConstants = DEFAULT_CONSTANTS

    def validate(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        c = self.constants
        for tiles in (self.tiles1, self.tiles2):
            if tiles:
                ok, witness = is_sparse(list(tiles), c.sparse_const)
                if not ok:
                    raise ValueError(f"tile collection not sparse: {witness}")
        if self.tritiles:
            ok, witness = is_sparse(list(self.tritiles), c.sparse_const)
            if not ok:
                raise ValueError(f"tri-tile collection not sparse: {witness}")
            ok, witness = is_rank1(list(self.tritiles), c.rank1_const)
            if not ok:
                raise ValueError(f"tri-tile collection not rank one: {witness}")
        if self.kind == "paraproduct":
            if self.rigid1 is None or self.rigid2 is None or \
                    not self.rigid1.same_structure(self.rigid2):
                raise ValueError("paraproduct requires same rigidity structure")
        if self.kind == "aligned":
            m2, m3 = self.align_offsets
            for q in self.tritiles:
                w1, w2, w3 = q.freqs
                h = w1.length
                if not (w2.lo == w1.lo + m2 * h and w2.hi == w1.hi + m2 * h):
                    raise ValueError("aligned: omega_2 offset violated")
                half = w3.dilate_pow2(-1)
                want_lo = w1.lo + m3 * h / 2
                if not (half.lo == want_lo and half.hi == want_lo + h / 2):
                    raise ValueError("aligned: omega_3 half-scale offset violated")


def _tile_sums_by_j(tiles, rigid, f: SampledSignal, data: MeasurableData,
                    G: int, constants) -> dict[Fraction, np.ndarray]:
    """Per spatial scale: (J, G) arrays sum_P |I_P| <f, phi_P> phi~_{P,j}(x)."""
    by_scale: dict[Fraction, np.ndarray] = {}
    for t in tiles:
        packet = build_packet(t, G, p=1.0, constants=constants)
        coef = float(t.space.length) * f.inner(packet.signal)
        ind = truncation_indicators(t.freq, rigid, data)  # (G, J)
        term = (coef * packet.samples)[:, None] * ind     # (G, J)
        acc = by_scale.setdefault(t.space.length, np.zeros((G, data.J), dtype=complex))
        acc += term
    return by_scale


def apply_model(spec: ModelOperatorSpec, f1: SampledSignal, f2: SampledSignal,
                data: MeasurableData) -> SampledSignal:
    """Evaluate the selected model operator pointwise on the grid."""
    spec.validate()
    G = f1.G
    if f2.G != G or data.G != G:
        raise ValueError("signals and data must share one grid")
    d = data.coefficients  # (G, J)
    out = np.zeros(G, dtype=complex)
    c = spec.constants

    if spec.kind == "product":
        s1 = _sum_scales(_tile_sums_by_j(spec.tiles1, spec.rigid1, f1, data, G, c))
        s2 = _sum_scales(_tile_sums_by_j(spec.tiles2, spec.rigid2, f2, data, G, c))
        out = (d * s1 * s2).sum(axis=1)

    elif spec.kind == "paraproduct":
        by1 = _tile_sums_by_j(spec.tiles1, spec.rigid1, f1, data, G, c)
        by2 = _tile_sums_by_j(spec.tiles2, spec.rigid2, f2, data, G, c)
        scales2 = sorted(by2)
        for h1, term1 in by1.items():
            inner = np.zeros((G, data.J), dtype=complex)
            for h2 in scales2:
                if h2 <= h1 / 16:
                    inner += by2[h2]
            out += (d * term1 * inner).sum(axis=1)

    elif spec.kind == "composed":
        rigid = spec.rigid1
        packets = {t: build_packet(t, G, p=1.0, constants=c) for t in spec.tiles1}
        for q in spec.tritiles:
            p1 = build_packet(q.component(1), G, p=1.0, constants=c)
            p2 = build_packet(q.component(2), G, p=1.0, constants=c)
            p3 = build_packet(q.component(3), G, p=1.0, constants=c)
            aq = float(q.space.length) * f1.inner(p1.signal) * f2.inner(p2.signal)
            inner = np.zeros((G, data.J), dtype=complex)
            for t, pk in packets.items():
                if t.space.length > q.space.length:
                    continue
                cc = float(t.space.length) * p3.signal.inner(pk.signal)
                ind = truncation_indicators(t.freq, rigid, data)
                inner += (cc * pk.samples)[:, None] * ind
            out += aq * (d * inner).sum(axis=1)

    elif spec.kind == "aligned":
        r1, r2, r3 = spec.tri_rigid
        for q in spec.tritiles:
            p1 = build_packet(q.component(1), G, p=1.0, constants=c)
            p2 = build_packet(q.component(2), G, p=1.0, constants=c)
            p3 = build_packet(q.component(3), G, p=1.0, constants=c)
            aq = float(q.space.length) * f1.inner(p1.signal) * f2.inner(p2.signal)
            gate = (truncation_indicators(q.freqs[0], r1, data)
                    * truncation_indicators(q.freqs[1], r2, data)
                    * truncation_indicators(q.freqs[2], r3, data, doubled=True))
            out += aq * (d * gate).sum(axis=1) * p3.samples

    return SampledSignal(out)


def _sum_scales(by_scale: dict) -> np.ndarray:
    if not by_scale:
        return 0.0
    return sum(by_scale.values())
