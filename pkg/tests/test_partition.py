import math
from fractions import Fraction

import numpy as np
import pytest

from wavetile.constants import ToolkitConstants
from wavetile.partition import (Details, HPartition, bump_profile, classify_details,
                                eval_tail_direct, eval_tail_form, in_partition,
                                resummed_tail_form, tail_uv_table)
from wavetile.intervals import DyadicInterval


def consts(margin, min_scale):
    return ToolkitConstants(margin=margin, min_scale=Fraction(min_scale))


def test_hand_example_entries():
    # M=0, N=8, margin 1, cutoff 1/4: the mid-range entries are forced
    H = HPartition(0, 8, consts(1, "1/4"))
    got = {(str(e.interval.lo), str(e.interval.hi)) for e in H.entries}
    expected = {("1/2", "1"), ("1", "2"), ("2", "4"), ("4", "6"), ("6", "7"),
                ("7", "15/2"), ("1/4", "1/2"), ("15/2", "31/4")}
    assert got == expected


def test_distance_predicate_holds():
    H = HPartition(0.3, 6.7, consts(2, "1/64"))
    L1 = 2
    for e in H.entries:
        I = e.interval
        assert I.lo - H.M >= L1 * I.length
        assert H.N - I.hi >= L1 * I.length
        assert in_partition(I, H.M, H.N, L1)


def test_lengths_sum_with_residual():
    for M, N in ((0, 8), (0.37, 5.11), (-2.25, 1.5)):
        H = HPartition(M, N, consts(2, "1/128"))
        total = sum((e.interval.length for e in H.entries), Fraction(0))
        assert total + H.residual == H.N - H.M
        assert 0 <= H.residual < Fraction(1, 128) * 40


def test_neighbor_ratio_invariant():
    rng = np.random.default_rng(0)
    for _ in range(25):
        M = rng.uniform(-4, 2)
        N = M + rng.uniform(0.5, 8)
        H = HPartition(M, N, consts(2, "1/256"))
        for a, b in zip(H.entries, H.entries[1:]):
            if a.interval.hi == b.interval.lo:
                assert b.interval.length / a.interval.length in \
                    (Fraction(1, 2), Fraction(1), Fraction(2))


def test_partition_of_unity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        M = rng.uniform(-3, 3)
        N = M + rng.uniform(0.3, 9)
        H = HPartition(M, N, consts(2, "1/256"))
        pad = 10.0 / 256
        xi = rng.uniform(M + pad, N - pad, 300)
        vals = H.partition_sum(xi)
        assert np.abs(vals - 1).max() < 1e-8


def test_details_classification_and_margin_facts():
    H = HPartition(0.123, 7.456, consts(2, "1/256"))
    labels = classify_details(H)
    assert set(labels) <= {1, 2, 3}
    # strict margin fact holds at generic endpoints
    for e in H.entries:
        assert 2 <= min(e.details.m, e.details.n) <= 4


def test_class_ordering_left_to_right():
    # every class-1 entry lies left of every class-3 entry
    rng = np.random.default_rng(2)
    for _ in range(100):
        M = rng.uniform(-5, 5)
        N = M + rng.uniform(0.5, 10)
        H = HPartition(M, N, consts(2, "1/256"))
        last_c1 = [e.interval.hi for e in H.entries if e.detail_class == 1]
        first_c3 = [e.interval.lo for e in H.entries if e.detail_class == 3]
        if last_c1 and first_c3:
            assert max(last_c1) <= min(first_c3)


def test_relative_position_bounds():
    # for xi in (5/4) I: m/(4n) < |xi - M| / |xi - N| < 4 m / n
    rng = np.random.default_rng(3)
    for _ in range(20):
        M = rng.uniform(-2, 2)
        N = M + rng.uniform(1, 6)
        H = HPartition(M, N, consts(2, "1/128"))
        for e in H.entries:
            I = e.interval
            for xi in np.linspace(float(I.center) - 0.624 * float(I.length),
                                  float(I.center) + 0.624 * float(I.length), 5):
                ratio = abs(xi - float(H.M)) / abs(xi - float(H.N))
                m, n = e.details.m, e.details.n
                assert m / (4 * n) < ratio < 4 * m / n


def test_tail_regime_monotonicity():
    # entries left of a class-1 entry have larger n/m ratio
    rng = np.random.default_rng(4)
    for _ in range(40):
        M = rng.uniform(-3, 1)
        N = M + rng.uniform(1, 8)
        H = HPartition(M, N, consts(2, "1/128"))
        for i, e in enumerate(H.entries):
            if e.details.n >= 4 * e.details.m:
                for prev in H.entries[:i]:
                    ratio_prev = prev.details.n / prev.details.m
                    assert ratio_prev > e.details.n / e.details.m


def test_uv_determined_by_details():
    rng = np.random.default_rng(5)
    seen = {}
    for _ in range(60):
        M = rng.uniform(-4, 4)
        N = M + rng.uniform(0.5, 9)
        H = HPartition(M, N, consts(2, "1/256"))
        for e in H.entries[1:-1]:
            key = (e.details.side, e.details.m, e.details.n)
            if key in seen:
                assert seen[key] == (e.u, e.v), f"ratios differ for {key}"
            else:
                seen[key] = (e.u, e.v)
    assert len(seen) > 10


def test_bump_profile_support():
    s = np.linspace(-1, 1, 801)
    for u in (0.5, 1, 2):
        for v in (0.5, 1, 2):
            vals = bump_profile(u, v, Fraction(3, 5), s)
            assert np.all(vals[np.abs(s) > 0.6] == 0)
            assert np.all(vals >= 0)
            assert vals[400] == pytest.approx(1.0)  # the center


# -- tail resummation ----------------------------------------------------------

def test_paper_table_row_at_unit_margin():
    # left-sided entries with n at the margin have neighbor ratios (2, 1/2)
    table = tail_uv_table(1)
    assert table[("left", 1)] == (Fraction(2), Fraction(1, 2))
    assert table[("right", 1)] == (Fraction(1), Fraction(1, 2))
    assert table[("left", 2)] == (Fraction(2), Fraction(1))


def test_tail_table_consistent_margin_two():
    table = tail_uv_table(2)
    assert set(table) == {("left", 2), ("left", 3), ("left", 4),
                          ("right", 2), ("right", 3)}


def test_resummed_form_rejects_small_factor():
    with pytest.raises(ValueError):
        resummed_tail_form("left", 3.0, 2)


def test_resummed_form_term_count():
    for L1 in (1, 2, 4):
        for side in ("left", "right"):
            terms = resummed_tail_form(side, 4.0, L1)
            assert 1 <= len(terms) <= 8 * L1


def _random_partition_interval(rng, L1):
    M = rng.uniform(-4, 0)
    N = M + rng.uniform(2, 12)
    H = HPartition(M, N, consts(L1, "1/64"))
    entries = [e for e in H.entries]
    e = entries[int(rng.integers(0, len(entries)))]
    return M, N, e.interval


def test_resummed_form_matches_direct_sum():
    rng = np.random.default_rng(6)
    L1 = 2
    radius = Fraction(3, 5)
    forms = {s: resummed_tail_form(s, 4.0, L1) for s in ("left", "right")}
    hits = 0
    for _ in range(100):
        M, N, I = _random_partition_interval(rng, L1)
        side = "left" if I.is_left_child() else "right"
        xi = np.linspace(float(I.lo) - float(I.length),
                         float(I.hi) + float(I.length), 41)
        direct = eval_tail_direct(4.0, radius, xi, M, N, I, L1)
        finite = eval_tail_form(forms[side], radius, xi, M, N, I)
        assert np.abs(direct - finite).max() < 1e-10
        hits += int(direct.max() > 0)
    assert hits >= 5  # the comparison is not vacuous


def test_resummed_form_zero_without_membership():
    # an interval violating the distance condition contributes nothing
    terms = resummed_tail_form("left", 4.0, 2)
    I = DyadicInterval(0, 0)
    xi = np.linspace(-1, 2, 31)
    vals = eval_tail_form(terms, Fraction(3, 5), xi, -0.2, 9.7, I)
    direct = eval_tail_direct(4.0, Fraction(3, 5), xi, -0.2, 9.7, I, 2)
    assert np.all(vals == direct)
    assert np.all(direct == 0)
