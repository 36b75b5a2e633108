from fractions import Fraction

import numpy as np
import pytest

from wavetile.intervals import DyadicInterval, Interval, ShiftedDyadicInterval
from wavetile.tiles import (RigidTriples, Tile, TriTile, is_rank1, is_sparse,
                            make_rigid, tiles_from_json, tiles_to_json)


def test_area_invariant_enforced():
    Tile(DyadicInterval(0, -2), DyadicInterval(1, 2))
    with pytest.raises(ValueError):
        Tile(DyadicInterval(0, -2), DyadicInterval(1, 3))
    with pytest.raises(ValueError):
        TriTile(DyadicInterval(0, -2), (DyadicInterval(0, 2), DyadicInterval(1, 2),
                                        DyadicInterval(2, 3)))


def test_rigid_formula_examples():
    r = make_rigid("both_translates", 3, 4, margin=2)
    I = DyadicInterval(0, 0)
    assert r.lower(I) == Interval(-3, -2)
    assert r.upper(I) == Interval(4, 5)
    ru = make_rigid("upper_halfline", 3, 4, margin=2)
    up = ru.upper(I)
    assert up.lo == 4 and not up.finite_length()
    rl = make_rigid("lower_halfline", 3, 4, margin=2)
    lo = rl.lower(I)
    assert lo.hi == Fraction(-5, 2) and not lo.finite_length()


def test_rigid_offset_range_checked():
    with pytest.raises(ValueError):
        make_rigid("both_translates", 2, 4, margin=2)  # m must exceed margin
    with pytest.raises(ValueError):
        make_rigid("both_translates", 3, 17, margin=2)  # n too large


def test_same_structure():
    a = make_rigid("both_translates", 3, 4, margin=2)
    b = make_rigid("both_translates", 5, 6, margin=2)
    c = make_rigid("upper_halfline", 3, 4, margin=2)
    assert a.same_structure(b)
    assert not a.same_structure(c)


def test_rigid_triple_ordering():
    r = make_rigid("both_translates", 3, 4, margin=2)
    I = DyadicInterval(5, -1)
    lower, mid, upper = r.triple(I)
    assert lower.hi <= mid.lo and mid.hi <= upper.lo


# -- sparseness ----------------------------------------------------------------

def _tile(ns, ks, nf):
    return Tile(DyadicInterval(ns, ks), DyadicInterval(nf, -ks))


def test_sparse_far_bands():
    tiles = [_tile(0, -2, 0), _tile(0, -2, 10)]
    ok, _ = is_sparse(tiles, 2)
    assert ok


def test_sparse_adjacent_bands_fail():
    tiles = [_tile(0, -2, 0), _tile(0, -2, 1)]
    ok, witness = is_sparse(tiles, 4)
    assert not ok and witness is not None


def _brute_sparse(tiles, c0):
    for i, q in enumerate(tiles):
        for r in tiles[i + 1:]:
            a, b = sorted((q, r), key=lambda t: t.scale)
            if b.scale / c0 <= a.scale <= b.scale:
                if a.scale != b.scale:
                    return False
                same = a.freq.lo == b.freq.lo and a.freq.hi == b.freq.hi
                if not same and a.freq.enlarge(c0).intersects(b.freq.enlarge(c0)):
                    return False
    return True


def test_sparse_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(300):
        tiles = []
        for _ in range(int(rng.integers(2, 9))):
            k = int(rng.integers(-4, -1))
            tiles.append(_tile(int(rng.integers(0, 2 ** (-k))), k,
                               int(rng.integers(-6, 6))))
        c0 = float(rng.choice([2, 4, 8]))
        assert is_sparse(tiles, c0)[0] == _brute_sparse(tiles, c0)


# -- rank one -------------------------------------------------------------------

def _tri(ns, ks, base, offs=(0, 3, 6)):
    freqs = tuple(DyadicInterval(base + o, -ks) for o in offs)
    return TriTile(DyadicInterval(ns, ks), freqs)


def test_rank1_single_tritile_vacuous():
    assert is_rank1([_tri(0, -2, 0)], 8)[0]


def test_rank1_same_cube_different_space():
    qs = [_tri(0, -2, 0), _tri(1, -2, 0)]
    assert is_rank1(qs, 8)[0]


def test_rank1_equal_component_unequal_cube():
    a = TriTile(DyadicInterval(0, -2), (DyadicInterval(0, 2), DyadicInterval(3, 2),
                                        DyadicInterval(6, 2)))
    b = TriTile(DyadicInterval(1, -2), (DyadicInterval(0, 2), DyadicInterval(4, 2),
                                        DyadicInterval(8, 2)))
    ok, witness = is_rank1([a, b], 8)
    assert not ok
    assert "equal component" in witness[2]


def _brute_rank1(qs, c1):
    def inside(i1, i2):
        return i2.lo <= i1.lo and i1.hi <= i2.hi
    for q in qs:
        for r in qs:
            if q is r:
                continue
            if any(q.freqs[j].lo == r.freqs[j].lo and q.freqs[j].hi == r.freqs[j].hi
                   for j in range(3)):
                if not all(q.freqs[j].lo == r.freqs[j].lo and
                           q.freqs[j].hi == r.freqs[j].hi for j in range(3)):
                    return False
            for j0 in range(3):
                if inside(q.freqs[j0].enlarge(5), r.freqs[j0].enlarge(5)):
                    if not all(inside(q.freqs[j].enlarge(5 * c1),
                                      r.freqs[j].enlarge(5 * c1)) for j in range(3)):
                        return False
                    if r.scale < q.scale:
                        for j in range(3):
                            if j != j0 and q.freqs[j].enlarge(5).intersects(
                                    r.freqs[j].enlarge(5)):
                                return False
    return True


def test_rank1_matches_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(300):
        qs = []
        for _ in range(int(rng.integers(1, 6))):
            k = int(rng.integers(-3, -1))
            base = int(rng.integers(-4, 4))
            o2 = int(rng.integers(1, 4))
            o3 = o2 + int(rng.integers(1, 4))
            qs.append(_tri(int(rng.integers(0, 2 ** (-k))), k, base, (0, o2, o3)))
        c1 = float(rng.choice([1, 2, 8]))
        assert is_rank1(qs, c1)[0] == _brute_rank1(qs, c1)


# -- serialization ----------------------------------------------------------------

def test_json_round_trip():
    tiles = [_tile(0, -2, 3),
             Tile(DyadicInterval(1, -1), ShiftedDyadicInterval(0, 1, Fraction(1, 3)))]
    rig = make_rigid("both_translates", 3, 4, margin=2)
    text = tiles_to_json(tiles, rig)
    back, rig2 = tiles_from_json(text)
    assert back == tiles
    assert rig2 == rig
