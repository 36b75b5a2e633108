"""Sampled periodic signals with exact integer-frequency spectra.

Signals live on the torus sampled at ``x_n = 2*pi*n/G`` for a power-of-two
``G``.  Spatial geometry (tiles, intervals, averages) is expressed in *turns*
``t = x/(2*pi) in [0, 1)``, so dyadic intervals are exact; the spectrum is
indexed by integer frequencies ``xi in [-G/2, G/2)`` and represents the
expansion f(x) = sum_xi c_xi e^{i x xi} = sum_xi c_xi e^{2 pi i t xi}.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .intervals import DyadicInterval, Interval, IntervalLike, as_fraction


def _check_power_of_two(G: int):
    if G < 2 or (G & (G - 1)):
        raise ValueError(f"grid size {G} is not a power of two >= 2")


def frequencies(G: int) -> np.ndarray:
    """Integer frequency axis [-G/2, G/2)."""
    _check_power_of_two(G)
    return np.arange(-(G // 2), G // 2)


def to_spectrum(samples: np.ndarray) -> np.ndarray:
    """Coefficients c_xi of f = sum c_xi e^{i x xi}, xi in [-G/2, G/2)."""
    samples = np.asarray(samples, dtype=complex)
    _check_power_of_two(samples.size)
    return np.fft.fftshift(np.fft.fft(samples)) / samples.size


def from_spectrum(spectrum: np.ndarray) -> np.ndarray:
    """Samples of f = sum c_xi e^{i x xi} at x_n = 2 pi n / G."""
    spectrum = np.asarray(spectrum, dtype=complex)
    _check_power_of_two(spectrum.size)
    return np.fft.ifft(np.fft.ifftshift(spectrum)) * spectrum.size


class SampledSignal:
    """Immutable complex signal on a power-of-two periodic grid."""

    __slots__ = ("samples", "_spectrum")

    def __init__(self, samples, spectrum=None):
        samples = np.asarray(samples, dtype=complex)
        _check_power_of_two(samples.size)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if spectrum is not None:
            spectrum = np.asarray(spectrum, dtype=complex)
            spectrum.setflags(write=False)
        object.__setattr__(self, "_spectrum", spectrum)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("SampledSignal is immutable")

    # -- constructors ----------------------------------------------------
    @classmethod
    def from_spectrum(cls, spectrum) -> "SampledSignal":
        spectrum = np.asarray(spectrum, dtype=complex)
        return cls(from_spectrum(spectrum), spectrum=spectrum)

    @classmethod
    def mode(cls, G: int, xi: int, amplitude: complex = 1.0) -> "SampledSignal":
        """The pure mode ``amplitude * e^{i x xi}``."""
        spec = np.zeros(G, dtype=complex)
        half = G // 2
        if not (-half <= xi < half):
            raise ValueError(f"frequency {xi} outside [-{half}, {half})")
        spec[xi + half] = amplitude
        return cls.from_spectrum(spec)

    @classmethod
    def constant(cls, G: int, value: complex = 1.0) -> "SampledSignal":
        return cls(np.full(G, value, dtype=complex))

    @classmethod
    def random(cls, G: int, rng: np.random.Generator, band: int | None = None) -> "SampledSignal":
        """Random spectrum with iid standard complex Gaussian coefficients.

        If ``band`` is given, only frequencies with ``|xi| < band`` are filled,
        so the same seeded draw defines one signal across grid refinements.
        """
        half = G // 2
        b = half if band is None else min(band, half)
        spec = np.zeros(G, dtype=complex)
        coef = rng.standard_normal(2 * b) + 1j * rng.standard_normal(2 * b)
        spec[half - b:half + b] = coef / math.sqrt(2.0)
        return cls.from_spectrum(spec)

    # -- views -------------------------------------------------------------
    @property
    def G(self) -> int:
        return self.samples.size

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            spec = to_spectrum(self.samples)
            spec.setflags(write=False)
            object.__setattr__(self, "_spectrum", spec)
        return self._spectrum

    @property
    def frequencies(self) -> np.ndarray:
        return frequencies(self.G)

    def points(self) -> np.ndarray:
        """Sample points in turns, t_n = n/G."""
        return np.arange(self.G) / self.G

    # -- algebra ----------------------------------------------------------
    def __add__(self, other: "SampledSignal") -> "SampledSignal":
        return SampledSignal(self.samples + other.samples)

    def __sub__(self, other: "SampledSignal") -> "SampledSignal":
        return SampledSignal(self.samples - other.samples)

    def __mul__(self, scalar: complex) -> "SampledSignal":
        return SampledSignal(self.samples * scalar)

    __rmul__ = __mul__

    def pointwise(self, other: "SampledSignal") -> "SampledSignal":
        return SampledSignal(self.samples * other.samples)

    # -- metrics ----------------------------------------------------------
    def lp_norm(self, p: float) -> float:
        """L^p norm in turn measure, ((1/G) sum |f|^p)^(1/p); p=inf is the sup."""
        a = np.abs(self.samples)
        if math.isinf(p):
            return float(a.max(initial=0.0))
        return float((np.mean(a ** p)) ** (1.0 / p))

    def inner(self, other: "SampledSignal") -> complex:
        """<f, g> = (1/G) sum f conj(g), the turn-measure inner product."""
        return complex(np.mean(self.samples * np.conj(other.samples)))


def parseval_defect(s: SampledSignal) -> float:
    """| ||f||_2^2 - sum |c_xi|^2 |, should vanish to rounding."""
    return abs(s.lp_norm(2) ** 2 - float(np.sum(np.abs(s.spectrum) ** 2)))


# ---------------------------------------------------------------------------
# weights and maximal averages
# ---------------------------------------------------------------------------

def chi_tilde(I: IntervalLike, x, N: int = 1):
    """(1 + |x - c(I)| / |I|)^(-2N), vectorized over x."""
    if N < 1:
        raise ValueError("N must be >= 1")
    c = float(I.center)
    h = float(I.length)
    if h <= 0:
        raise ValueError("interval must have positive length")
    x = np.asarray(x, dtype=float)
    out = (1.0 + np.abs(x - c) / h) ** (-2 * N)
    return out if out.ndim else float(out)


def _interval_average(f: SampledSignal, lo: Fraction, hi: Fraction) -> float | None:
    """Mean of |f| over samples t_n in [lo, hi) clipped to [0, 1)."""
    G = f.G
    lo = max(lo, Fraction(0))
    hi = min(hi, Fraction(1))
    if lo >= hi:
        return None
    n0 = math.ceil(lo * G)
    n1 = math.ceil(hi * G)
    if n1 <= n0:
        return None
    return float(np.mean(np.abs(f.samples[n0:n1])))


def maximal_avg(J: DyadicInterval | Interval, f: SampledSignal) -> float:
    """Maximal dyadic average sup_{I superset J} |I cap [0,1)|-avg of |f|.

    The supremum runs over the chain of dyadic ancestors of J (clipped to the
    sampled domain) together with the full domain.
    """
    if isinstance(J, Interval):
        if not J.finite_length():
            raise ValueError("J must be a bounded interval")
        k = J.length
        kk = math.floor(math.log2(k)) if k > 0 else 0
        J = DyadicInterval.containing(J.lo, min(kk, 0))
    if J.lo >= 1 or J.hi <= 0:
        raise ValueError("J lies outside the sampled domain [0, 1)")
    best = _interval_average(f, Fraction(0), Fraction(1))
    I = J
    while I.length < 2:
        avg = _interval_average(f, I.lo, I.hi)
        if avg is not None:
            best = avg if best is None else max(best, avg)
        I = I.parent
    return best
