"""Wave packets: smooth frequency tapers modulated and translated to tiles.

A packet for a tile I x omega has spectrum exactly supported on the integer
frequencies inside (5/4) omega (a B-spline taper), so the frequency-support
condition holds with zero tail on the grid; translation and modulation
covariance are exact at grid resolution.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bumps import bspline
from .constants import DEFAULT_CONSTANTS, ToolkitConstants
from .grid import SampledSignal
from .tiles import Tile

_cache_lock = threading.Lock()
_packet_cache: dict = {}


@dataclass(frozen=True)
class WavePacket:
    tile: Tile
    norm_exponent: float
    order: int
    signal: SampledSignal

    @property
    def samples(self) -> np.ndarray:
        return self.signal.samples


def _taper_values(rel: np.ndarray, order: int) -> np.ndarray:
    """B-spline taper supported in [-5/8, 5/8], peak 1 at 0."""
    scale = 1.25 / order
    return bspline(rel / scale, order) / bspline(0.0, order)


def build_packet(tile: Tile, G: int, p: float = 1.0,
                 order: int | None = None,
                 constants: ToolkitConstants = DEFAULT_CONSTANTS) -> WavePacket:
    """Construct the L^p-normalized packet for a tile on a G-point grid.

    The spectrum is a smooth taper over (5/4) omega translated to the tile's
    spatial center; sup |phi| is approximately |I|^(-1/p).
    """
    order = (constants.smooth_order + 2) if order is None else order
    key = (tile, G, p, order)
    with _cache_lock:
        hit = _packet_cache.get(key)
    if hit is not None:
        return hit

    omega = tile.freq
    half = G // 2
    lo_need = float(omega.center) - 0.625 * float(omega.length)
    hi_need = float(omega.center) + 0.625 * float(omega.length)
    if lo_need < -half or hi_need > half:
        raise ValueError(
            f"tile frequency band (5/4)*[{omega.lo},{omega.hi}) exceeds "
            f"Nyquist range [-{half},{half}) at G={G}")
    if tile.space.length * G < 1:
        raise ValueError("tile spatial interval below grid resolution")

    xi = np.arange(-half, half)
    rel = (xi - float(omega.center)) / float(omega.length)
    taper = _taper_values(rel, order)
    phase = np.exp(-2j * np.pi * xi * float(tile.space.center))
    signal = SampledSignal.from_spectrum(taper * phase)
    norm = signal.lp_norm(p)
    signal = SampledSignal.from_spectrum(taper * phase / norm)
    packet = WavePacket(tile, p, order, signal)
    with _cache_lock:
        _packet_cache[key] = packet
    return packet


def spectral_mass_outside(packet: WavePacket) -> float:
    """Relative spectral mass outside (5/4) omega; zero by construction."""
    spec = np.abs(packet.signal.spectrum)
    xi = packet.signal.frequencies
    om = packet.tile.freq
    lo = float(om.center) - 0.625 * float(om.length)
    hi = float(om.center) + 0.625 * float(om.length)
    outside = spec[(xi < lo) | (xi > hi)].sum()
    total = spec.sum()
    return float(outside / total) if total else 0.0


def torus_distance(t: np.ndarray, center: float) -> np.ndarray:
    d = np.abs(t - center)
    return np.minimum(d, 1.0 - d)


def demodulated_derivative(packet: WavePacket, n: int) -> np.ndarray:
    """n-th derivative (in turns) of e^{-2 pi i c(omega) t} phi(t), exact."""
    spec = packet.signal.spectrum.copy()
    xi = packet.signal.frequencies.astype(float)
    c = float(packet.tile.freq.center)
    mult = (2j * np.pi * (xi - c)) ** n
    from .grid import from_spectrum
    return from_spectrum(spec * mult)


def decay_constant(packet: WavePacket, n: int) -> float:
    """Measured constant in the modulated-derivative decay bound.

    C = sup_t |d^n/dt^n (demodulated phi)(t)| * |I|^(n + 1/p)
        * (1 + dist(t, c(I))/|I|)^n.
    """
    g = np.abs(demodulated_derivative(packet, n))
    t = packet.signal.points()
    h = float(packet.tile.space.length)
    cI = float(packet.tile.space.center) % 1.0
    weight = (1.0 + torus_distance(t, cI) / h) ** n
    return float(np.max(g * weight) * h ** (n + 1.0 / packet.norm_exponent))
