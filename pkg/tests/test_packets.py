import numpy as np
import pytest

from wavetile.grid import SampledSignal
from wavetile.intervals import DyadicInterval
from wavetile.packets import (build_packet, decay_constant, spectral_mass_outside)
from wavetile.tiles import Tile


def _tile(ns, j):
    # spatial scale 2^-j, frequency band [2^j, 2^{j+1})
    return Tile(DyadicInterval(ns, -j), DyadicInterval(1, j))


def test_translation_covariance():
    G = 128
    a = build_packet(_tile(2, 3), G)
    b = build_packet(_tile(3, 3), G)
    shift = G // 8
    assert np.abs(np.roll(a.samples, shift) - b.samples).max() < 1e-12


def test_l1_mass_in_range():
    G = 256
    for j in (2, 3, 4, 5):
        pk = build_packet(_tile(1, j), G, p=1.0)
        assert 0.5 <= pk.signal.lp_norm(1) <= 2.0


def test_spectral_support_exact():
    G = 128
    for j in (2, 3, 4):
        pk = build_packet(_tile(0, j), G)
        assert spectral_mass_outside(pk) <= 1e-8


def test_nyquist_rejection():
    with pytest.raises(ValueError):
        build_packet(Tile(DyadicInterval(0, -6), DyadicInterval(1, 6)), 64)


def test_subresolution_rejection():
    with pytest.raises(ValueError):
        build_packet(Tile(DyadicInterval(0, -7), DyadicInterval(0, 7)), 64)


def test_decay_constants_scale_uniform():
    G = 512
    constants = {}
    for n in (0, 1, 2):
        for j in (3, 4, 5):
            constants[(n, j)] = decay_constant(build_packet(_tile(1, j), G), n)
    for n in (0, 1, 2):
        vals = [constants[(n, j)] for j in (3, 4, 5)]
        assert max(vals) / min(vals) < 2.0, (n, vals)


def test_modulation_structure():
    # demodulated packet is slowly varying: its spectrum is centered at zero
    G = 128
    pk = build_packet(_tile(1, 4), G)
    t = pk.signal.points()
    c = float(pk.tile.freq.center)
    demod = pk.samples * np.exp(-2j * np.pi * c * t)
    spec = np.abs(SampledSignal(demod).spectrum)
    xi = SampledSignal(demod).frequencies
    inside = spec[np.abs(xi) <= 10].sum()
    assert inside / spec.sum() > 0.999


def test_l2_normalization():
    pk = build_packet(_tile(1, 4), 128, p=2.0)
    assert pk.signal.lp_norm(2) == pytest.approx(1.0)
