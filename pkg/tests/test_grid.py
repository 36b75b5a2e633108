import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavetile.grid import (SampledSignal, chi_tilde, from_spectrum, maximal_avg,
                           parseval_defect, to_spectrum)
from wavetile.intervals import DyadicInterval, Interval, ShiftedDyadicInterval


def test_constant_signal_dc_coefficient():
    s = SampledSignal.constant(16)
    spec = s.spectrum
    assert spec[8] == pytest.approx(1.0)
    assert np.abs(np.delete(spec, 8)).max() < 1e-14


def test_pure_mode_coefficient():
    s = SampledSignal.mode(16, 3)
    assert s.spectrum[8 + 3] == pytest.approx(1.0)
    assert np.abs(np.delete(s.spectrum, 11)).max() < 1e-14
    # samples really are e^{i 3 x} at x = 2 pi n / G
    x = 2 * np.pi * np.arange(16) / 16
    assert np.abs(s.samples - np.exp(3j * x)).max() < 1e-12


def test_round_trip_random_spectra():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(1000):
        G = int(rng.choice([8, 16, 32, 64]))
        s = SampledSignal.random(G, rng)
        back = from_spectrum(to_spectrum(s.samples))
        denom = np.abs(s.samples).max()
        worst = max(worst, np.abs(back - s.samples).max() / denom)
    assert worst < 1e-12


def test_linearity_of_transform():
    rng = np.random.default_rng(7)
    for _ in range(50):
        f = SampledSignal.random(32, rng)
        g = SampledSignal.random(32, rng)
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        lhs = to_spectrum(a * f.samples + b * g.samples)
        rhs = a * f.spectrum + b * g.spectrum
        assert np.abs(lhs - rhs).max() < 1e-12


def test_parseval():
    rng = np.random.default_rng(3)
    for _ in range(20):
        s = SampledSignal.random(64, rng)
        assert parseval_defect(s) < 1e-10


def test_non_power_of_two_rejected():
    with pytest.raises(ValueError):
        to_spectrum(np.zeros(12))
    with pytest.raises(ValueError):
        SampledSignal(np.zeros(5))


# -- chi_tilde --------------------------------------------------------------

def test_chi_tilde_values():
    I = Interval(Fraction(0), Fraction(1))
    assert chi_tilde(I, 0.5, 1) == pytest.approx(1.0)
    assert chi_tilde(I, 1.5, 1) == pytest.approx(0.25)
    I4 = Interval(Fraction(0), Fraction(4))
    assert chi_tilde(I4, 10.0, 2) == pytest.approx(1.0 / 81.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-8, 8), st.integers(1, 3), st.integers(-2, 2), st.integers(-3, 1))
def test_chi_tilde_symmetry_and_covariance(x, N, n, k):
    I = DyadicInterval(n, k)
    c = float(I.center)
    assert chi_tilde(I, c + x, N) == pytest.approx(chi_tilde(I, c - x, N))
    # monotone in |x - c|
    assert chi_tilde(I, c + x, N) >= chi_tilde(I, c + 1.5 * x, N) - 1e-15
    # scale covariance chi(D_y I, 2^y x, N) = chi(I, x, N)
    y = 2
    assert chi_tilde(I.dilate_pow2(y), (2 ** y) * (c + x), N) == \
        pytest.approx(chi_tilde(I, c + x, N))


# -- maximal averages ---------------------------------------------------------

def test_maximal_avg_constant():
    f = SampledSignal.constant(32)
    for J in (DyadicInterval(0, -3), DyadicInterval(5, -3), DyadicInterval(1, -1)):
        assert maximal_avg(J, f) == pytest.approx(1.0)


def test_maximal_avg_indicator_left_half():
    vals = np.zeros(32)
    vals[:16] = 1.0
    f = SampledSignal(vals)
    assert maximal_avg(DyadicInterval(0, -1), f) == pytest.approx(1.0)


def _brute_maximal_avg(J, f):
    G = f.G
    best = np.mean(np.abs(f.samples))
    I = J
    while float(I.length) < 2:
        lo = max(float(I.lo), 0.0)
        hi = min(float(I.hi), 1.0)
        n0, n1 = math.ceil(lo * G), math.ceil(hi * G)
        if n1 > n0:
            best = max(best, float(np.mean(np.abs(f.samples[n0:n1]))))
        I = I.parent
    return best


def test_maximal_avg_matches_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(50):
        f = SampledSignal.random(64, rng)
        J = DyadicInterval(int(rng.integers(0, 16)), -4)
        assert maximal_avg(J, f) == pytest.approx(_brute_maximal_avg(J, f))


def test_maximal_avg_monotone():
    rng = np.random.default_rng(9)
    for _ in range(20):
        f = SampledSignal.random(64, rng)
        g = SampledSignal(f.samples * rng.uniform(0, 1, 64))
        J = DyadicInterval(int(rng.integers(0, 8)), -3)
        assert maximal_avg(J, g) <= maximal_avg(J, f) + 1e-12


# -- interval geometry ---------------------------------------------------------

def test_interval_geometry_examples():
    I = DyadicInterval(0, 1)  # [0, 2)
    assert I.center == 1
    assert [c.interval() for c in I.children] == [Interval(0, 1), Interval(1, 2)]
    assert I.enlarge(3) == Interval(-2, 4)
    S = ShiftedDyadicInterval(0, 1, Fraction(1, 3))  # 2([0,1) - 1/3)
    assert S.interval() == Interval(Fraction(-2, 3), Fraction(4, 3))


def test_shifted_parent_contains():
    for a in (Fraction(0), Fraction(1, 3), Fraction(2, 3)):
        for k in (-3, -2, 0, 2):
            for n in (-5, 0, 7):
                S = ShiftedDyadicInterval(n, k, a)
                P = S.parent
                assert P.length == 2 * S.length
                assert P.contains_interval(S)


def test_dilation_translation():
    I = DyadicInterval(3, -1)
    assert I.dilate_pow2(2).interval() == Interval(6, 8)
    assert I.translate(Fraction(1, 2)) == Interval(2, Fraction(5, 2))
