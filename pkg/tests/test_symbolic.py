import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocycle_rigidity import Point, ShiftSpace, agreement_range
from cocycle_rigidity.symbolic import AdmissibilityError, EnumerationCapError

from conftest import LN2, brute_metric

words2 = st.lists(st.integers(0, 1), min_size=1, max_size=3).map(tuple)
cores2 = st.lists(st.integers(0, 1), min_size=0, max_size=6).map(tuple)
points2 = st.builds(Point, words2, cores2, words2, st.integers(-4, 4))


# -- canonical form ---------------------------------------------------------


def test_canonical_absorbs_tails():
    assert Point((0,), (0, 0, 1, 0, 0), (0,), -2) == Point((0,), (1,), (0,), 0)
    assert Point((0, 0), (), (0,), 5) == Point((0,))
    # same sequence, different cut positions
    assert Point((0, 1), (0, 1, 0, 1), (0, 1), -2) == Point((0, 1), (), (0, 1), 0)


def test_canonical_primitive_roots():
    p = Point((0, 1, 0, 1), (), (0, 1, 0, 1), 2)
    assert len(p.left) == 2 and len(p.right) == 2
    assert p.fully_periodic
    assert p == Point((0, 1))
    # misaligned tails stay a genuine two-tail point
    q = Point((0, 1, 0, 1), (), (1, 0, 1, 0), 1)
    assert not q.fully_periodic
    assert q.symbol_at(0) == 1 and q.symbol_at(1) == 1


def test_point_parse_roundtrip():
    for text in ["(0)*10.01(0)*", "(01)*.(01)*", "(0)*.1(10)*", "(2)*012.0(12)*"]:
        p = Point.parse(text)
        assert Point.parse(str(p)) == p


@given(points2)
@settings(max_examples=200, deadline=None)
def test_parse_format_roundtrip(p):
    assert Point.parse(str(p)) == p


@given(points2, st.integers(-7, 7))
@settings(max_examples=200, deadline=None)
def test_shift_preserves_sequence(p, k):
    q = p.shifted(k)
    for n in range(-6, 7):
        assert q.symbol_at(n) == p.symbol_at(n + k)
    assert q.shifted(-k) == p


# -- spec examples: shift ----------------------------------------------------


def test_shift_fixed_point(full2, all0):
    assert full2.shift(all0, 5) == all0


def test_shift_moves_origin(full2):
    x = Point((0,), (1,), (0,), 0)
    fx = full2.shift(x, 1)
    assert fx.symbol_at(-1) == 1 and fx.symbol_at(0) == 0
    assert full2.shift(fx, -1) == x


# -- metric -------------------------------------------------------------------


def test_metric_examples(full2, all0):
    y = Point((0,), (1,), (0,), 0)
    assert full2.metric(all0, y) == pytest.approx(1.0, abs=1e-15)
    # all-0 vs all-1: 1 + 2 * sum 2^-n = 3, cross-checked against partial sums
    all1 = Point((1,))
    assert full2.metric(all0, all1) == pytest.approx(3.0, abs=1e-12)
    assert brute_metric(all0, all1, LN2) == pytest.approx(3.0, abs=1e-12)
    assert full2.metric(all0, all0) == 0.0


@given(points2, points2)
@settings(max_examples=150, deadline=None)
def test_metric_matches_partial_sums(x, y):
    sp = ShiftSpace(2, LN2)
    assert sp.metric(x, y) == pytest.approx(brute_metric(x, y, LN2), abs=1e-12)


@given(points2, points2, points2)
@settings(max_examples=150, deadline=None)
def test_metric_axioms(x, y, z):
    sp = ShiftSpace(2, LN2)
    dxy = sp.metric(x, y)
    assert dxy == pytest.approx(sp.metric(y, x), abs=1e-12)
    assert (dxy == 0.0) == (x == y)
    assert dxy <= sp.metric(x, z) + sp.metric(z, y) + 1e-12


@given(points2, points2)
@settings(max_examples=150, deadline=None)
def test_bi_lipschitz(x, y):
    sp = ShiftSpace(2, LN2)
    d = sp.metric(x, y)
    lam = math.exp(LN2)
    assert sp.metric(sp.shift(x, 1), sp.shift(y, 1)) <= lam * d + 1e-12
    assert sp.metric(sp.shift(x, -1), sp.shift(y, -1)) <= lam * d + 1e-12


def test_stable_contraction_exact(full2, rng):
    from cocycle_rigidity.sampling import random_homoclinic, random_stable_pair

    anchor = Point((0,))
    for _ in range(50):
        y = random_homoclinic(full2, rng, anchor)
        z = random_stable_pair(full2, rng, y)
        assert agreement_range(y, z).s_index <= 0
        d = full2.metric(y, z)
        for n in range(1, 5):
            dn = full2.metric(full2.shift(y, n), full2.shift(z, n))
            assert dn == pytest.approx(math.exp(-LN2 * n) * d, rel=1e-12)


# -- agreement ----------------------------------------------------------------


def test_agreement_examples(all0):
    y = Point((0,), (1,), (0,), 0)
    ag = agreement_range(all0, y)
    assert (ag.s_index, ag.u_index) == (1, -1)
    eq = agreement_range(all0, all0)
    assert eq.everywhere and eq.u_index == math.inf
    far = agreement_range(all0, Point((1,)))
    assert far.s_index == math.inf and far.u_index == -math.inf
    assert not far.stable and not far.unstable


def test_stable_epsilon_characterization():
    # at lambda = ln 3 the one-sided tail mass e^-lam/(1-e^-lam) equals 1/2,
    # so membership in W^s_eps with eps = 1/2 is exactly right agreement
    sp = ShiftSpace(2, math.log(3.0))
    x = Point((0,))
    agree = Point((1,), (1, 1), (0,), -2)  # random past, zero future
    assert agreement_range(x, agree).s_index <= 0
    assert sp.in_stable_epsilon(x, agree)
    disagree = Point((0,), (1,), (0,), 3)
    assert not sp.in_stable_epsilon(x, disagree)
    # at lambda = ln 2 the metric constraint genuinely bites
    sp2 = ShiftSpace(2, LN2)
    all_past_one = Point((1,), (), (0,), 0)
    assert agreement_range(x, all_past_one).s_index <= 0
    assert sp2.metric(x, all_past_one) == pytest.approx(1.0)
    assert not sp2.in_stable_epsilon(x, all_past_one)


# -- bracket ------------------------------------------------------------------


def test_bracket_examples(full2, all0):
    assert full2.bracket(all0, all0) == all0
    y = Point((0,), (1,), (0,), -5)
    assert full2.bracket(all0, y) == y  # future of zeros, past of y
    x = Point((0,), (1,), (0,), 0)
    with pytest.raises(ValueError, match="bracket undefined"):
        full2.bracket(x, all0)


def test_bracket_splice_rule(full2, rng):
    from cocycle_rigidity.sampling import random_point

    done = 0
    while done < 25:
        x = random_point(full2, rng)
        y = random_point(full2, rng)
        if not full2.metric(x, y) < full2.tau:
            continue
        z = full2.bracket(x, y)
        for n in range(-6, 7):
            assert z.symbol_at(n) == (x.symbol_at(n) if n >= 0 else y.symbol_at(n))
        done += 1


def test_bracket_unique_among_splices(full2):
    # brute force: among all points built from (past, future) choices of x, y,
    # the bracket is the only one in both epsilon-sets
    x = Point((0,), (1, 1), (0,), 3)
    y = Point((0,), (1,), (0,), -3)
    assert full2.metric(x, y) < full2.tau
    z = full2.bracket(x, y)
    candidates = []
    for past in (x, y):
        for future in (x, y):
            w = Point(
                past.left,
                past.window(min(past.offset, 0), 0) + future.window(0, max(future.right_start, 0)),
                future.right,
                min(past.offset, 0),
            )
            candidates.append(w)
    good = [
        w
        for w in candidates
        if agreement_range(w, x).s_index <= 0 and agreement_range(w, y).u_index >= 0
    ]
    assert good == [z]


def test_bracket_admissible_in_sft(golden):
    x = Point((0,), (1,), (0,), 2)
    y = Point((0,), (1,), (0,), -2)
    assert golden.metric(x, y) < golden.tau
    z = golden.bracket(x, y)
    assert golden.is_admissible(z)


# -- closing ------------------------------------------------------------------


def test_closing_periodic_input_is_fixed(full2):
    p = Point((0, 1))
    assert full2.closing(p, 2) == p


def test_closing_example(full2):
    z = Point((0,), (1, 0, 1, 0, 1, 0), (0,), 0)
    gap = full2.metric(full2.shift(z, 2), z)
    assert gap == pytest.approx(0.3125)
    p = full2.closing(z, 2)
    assert p == Point((1, 0))
    assert full2.shift(p, 2) == p
    for j in range(3):
        d = full2.metric(full2.shift(z, j), full2.shift(p, j))
        assert d <= full2.shadowing_bound(j, 2, gap)


def test_closing_rejects_far(full2, all0):
    z = Point((1,), (), (0,), 0)
    with pytest.raises(ValueError, match="closing precondition"):
        full2.closing(z, 3)


def test_closing_shadowing_seeded(full2, rng):
    from cocycle_rigidity.sampling import random_near_recurrent

    for _ in range(100):
        n = int(rng.integers(1, 9))
        z = random_near_recurrent(full2, rng, n)
        gap = full2.metric(full2.shift(z, n), z)
        assert gap < full2.epsilon0
        p = full2.closing(z, n)
        assert full2.shift(p, n) == p
        for j in range(n + 1):
            d = full2.metric(full2.shift(z, j), full2.shift(p, j))
            assert d <= full2.shadowing_bound(j, n, gap)


# -- periodic enumeration -----------------------------------------------------


def test_enumerate_periodic_counts(full2, golden):
    assert len(full2.periodic_points(1)) == 2
    pts = full2.periodic_points(2)
    assert len(pts) == 4  # trace of T^2 for the full 2-shift
    assert len(set(pts)) == 4
    assert len(golden.periodic_points(2)) == 3  # trace of [[1,1],[1,0]]^2
    t = np.array([[1, 1], [1, 0]])
    for n in range(1, 7):
        assert len(golden.periodic_points(n)) == np.linalg.matrix_power(t, n).trace()


def test_enumerate_cap():
    sp = ShiftSpace(2, LN2, enumeration_cap=10)
    with pytest.raises(EnumerationCapError):
        sp.periodic_points(6)


# -- homoclinic approximants ----------------------------------------------------


def test_homoclinic_approximant_examples(full2, all0):
    z = Point((1,))
    h = full2.homoclinic_approximant(z, all0, 2)
    for n in range(-8, 9):
        assert h.symbol_at(n) == (1 if abs(n) <= 2 else 0)
    y = Point((0,), (1,), (0,), 0)
    assert full2.homoclinic_approximant(y, all0, 3) == y
    ds = [full2.metric(z, full2.homoclinic_approximant(z, all0, r)) for r in range(1, 11)]
    for a, b in zip(ds, ds[1:]):
        assert b / a == pytest.approx(math.exp(-LN2), rel=1e-9)


def test_homoclinic_approximant_sft_junction(golden):
    # core ends in 1; tail of 0s is fine, but a tail of (10)* may need a connector
    anchor = Point((0,))
    z = Point((1, 0))
    h = golden.homoclinic_approximant(z, anchor, 1)
    assert golden.is_admissible(h)
    assert h.window(-1, 2) == z.window(-1, 2)


# -- space validation ------------------------------------------------------------


def test_space_rejects_bad_transition():
    with pytest.raises(ValueError, match="fixed point"):
        ShiftSpace(2, LN2, [[0, 1], [1, 0]])
    with pytest.raises(ValueError, match="stranded"):
        ShiftSpace(2, LN2, [[1, 0], [0, 0]])
    with pytest.raises(ValueError, match="mixing"):
        ShiftSpace(3, LN2, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_derived_constants(full2):
    assert full2.tau == pytest.approx(0.5)
    assert full2.epsilon0 == pytest.approx(0.5)
    assert full2.c5 == pytest.approx(2.0 / 0.5)
    assert full2.with_step(2).rate == pytest.approx(2 * LN2)
