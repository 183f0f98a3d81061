import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multisens import fixedpoint as fx
from multisens.core import (Angle, Ball, Collapsed, Cylinder, DomainError, Hashed, Membership,
                            Nat, Pair, Prefixed, Tower, Word, periodic, sampled_profile, word)
from multisens.sensitivity import sensitivity_times
from multisens.systems import (CATALOG, FullShift, NatCompactification, NaturalExtension, PointSet,
                               ProductSystem, Projection, Rotation, build, entry, level_set,
                               make_collapse_quotient, make_full_shift, make_natural_extension,
                               make_product, make_referee_example, make_rotation, make_sturmian,
                               make_toeplitz_odometer_pair, transitive_word)
from multisens.systems.referee import RefereeCollapse, _level_diam

from oracles import golden_factors, golden_word, one_sided_diam, quotient_level_diam


# ---------------------------------------------------------------------------
# rotation


def test_rotation_examples():
    r = make_rotation("golden")
    assert float(r.iterate(Angle(0), 2)) == pytest.approx(0.236068, abs=1e-6)
    assert len(r.basis(3)) == 8
    prof = r.diam_profile(Ball(Angle.of(0.3), 0.05), 1000)
    assert prof.exact and np.all(prof.lo == prof.lo[0]) and prof.lo[0] == pytest.approx(0.1)


def test_rotation_rejects_rational_angles():
    with pytest.raises(ValueError):
        make_rotation(Fraction(2, 5))


def test_rotation_orbit_membership_matches_float_scan():
    r = Rotation()
    u = Ball(Angle(0), 0.05)
    inside, unc = r.orbit_membership(Angle(0), u, 2000)
    a = (np.sqrt(5) - 1) / 2
    d = np.abs(((np.arange(2001) * a) + 0.5) % 1 - 0.5)
    assert not unc.any()
    assert (inside == (d < 0.05)).all()


# ---------------------------------------------------------------------------
# full shift


@pytest.mark.parametrize("w", [(0, 1), (1,), (1, 1, 0), (0, 0, 1, 0)])
def test_full_shift_diam_matches_enumeration(w):
    s = make_full_shift("one")
    prof = s.diam_profile(Cylinder(w), 8)
    assert prof.exact
    for n in range(8):
        assert prof.lo[n] == one_sided_diam(w, n)


def test_full_shift_examples():
    s = make_full_shift("one")
    prof = s.diam_profile(Cylinder((0, 1)), 5)
    assert prof.lo[0] == 0.25 and prof.lo[5] == 1.0
    assert make_full_shift("two").invertible
    assert not s.invertible


def test_two_sided_cylinder_diam():
    s = make_full_shift("two")
    prof = s.diam_profile(Cylinder((1, 0, 1), -1), 6)
    # window -1..1 fixes |i| <= 1: diameter 2^-2, then the window leaves 0
    assert prof.lo[0] == 0.25
    assert (prof.lo[2:] == 1.0).all()


def test_transitive_word_contains_every_short_word():
    x = transitive_word(seed=3, prefix=(1, 1, 0))
    blk = x.block(0, 5000).tolist()
    assert blk[:3] == [1, 1, 0]
    text = "".join(map(str, blk))
    for L in range(1, 7):
        for k in range(2 ** L):
            assert format(k, f"0{L}b") in text


# ---------------------------------------------------------------------------
# Sturmian


def test_sturmian_coding_matches_exact_floor_formula():
    s, _ = make_sturmian()
    assert s.point().block(-200, 800).tolist() == golden_word(-200, 800)


@pytest.mark.parametrize("n", range(1, 13))
def test_sturmian_complexity(n):
    s, _ = make_sturmian()
    lang = s.language(n)
    assert len(lang) == n + 1
    assert set(lang) == golden_factors(n, 100 * n + 200)


def test_sturmian_fibers():
    s, cm = make_sturmian()
    assert len(cm.fiber(Angle(0), 2, 20)) == 2
    assert len(cm.fiber(Angle.of(0.123456789), 2, 20)) == 1


def test_sturmian_profile_bounds_sampled_pairs():
    s, _ = make_sturmian()
    for u in s.basis(5):
        exact = s.diam_profile(u, 40)
        sampled = sampled_profile(s, u, 40, count=12, seed=1)
        assert (sampled.lo <= exact.hi + 1e-12).all()


def test_sturmian_factor_map_commutes():
    s, cm = make_sturmian()
    for x in s.sample(Cylinder(()), 20, 4):
        a = cm.project(s.step(x))
        b = cm.target.step(cm.project(x))
        assert a.value == b.value


# ---------------------------------------------------------------------------
# Toeplitz / odometer


def _trailing_ones(i):
    c = 0
    while i & 1:
        i >>= 1
        c += 1
    return c


def test_toeplitz_skeleton_rule():
    t, _, _ = make_toeplitz_odometer_pair((2, 4, 8))
    blk = t.point().block(0, 10 ** 4).tolist()
    assert blk == [_trailing_ones(i) % 2 for i in range(10 ** 4)]


def test_toeplitz_rejects_non_dividing_periods():
    with pytest.raises(ValueError):
        make_toeplitz_odometer_pair((2, 6, 9))


def test_odometer_is_isometry_and_factor_commutes():
    t, o, f = make_toeplitz_odometer_pair((2, 4, 8))
    rng = random.Random(0)
    for j in range(200):
        z, w = o.random_point(j), o.random_point(j + 1000)
        assert o.metric(o.step(z), o.step(w)) == o.metric(z, w)
    for j in range(1000):
        z = o.random_point(rng.randrange(10 ** 6))
        x = t.point(z, offset=rng.randrange(100))
        assert o.metric(f.project(t.step(x)), o.step(f.project(x))) == 0.0


def test_toeplitz_fiber_singletons_off_the_hole_orbit():
    t, o, f = make_toeplitz_odometer_pair((2, 4, 8))
    assert len(f.fiber(o.random_point(5), 2, 20)) == 1
    # -1 = ...111 is deep at every level: the fill symbol matters
    minus_one = o.zero().shifted(-1)
    assert len(f.fiber(minus_one, 2, 20)) == 2


# ---------------------------------------------------------------------------
# products, natural extension, quotients


def test_product_examples():
    r2 = make_product(Rotation(), Rotation())
    u = r2.basis(2)[3]
    prof = r2.diam_profile(u, 50)
    assert (prof.lo == prof.lo[0]).all()
    assert r2.invertible
    assert not make_product(Rotation(), FullShift("one")).invertible
    fs = ProductSystem(FullShift("one"), FullShift("one"))
    u = fs.basis(2)[1]
    a, b = u.parts
    pa = FullShift("one").diam_profile(a, 5).lo
    pb = FullShift("one").diam_profile(b, 5).lo
    assert (fs.diam_profile(u, 5).lo == np.maximum(pa, pb)).all()


def test_projection_fibers_are_large():
    fs = ProductSystem(FullShift("one"), FullShift("one"))
    proj = Projection(fs)
    pts = proj.fiber(word("(0)"), 4, 20)
    assert max(fs.metric(p, q) for p in pts for q in pts) == 1.0


def test_natural_extension_hand_computed_distances():
    ne = make_natural_extension(FullShift("one"), 32)
    z = ne.lift(word("(0)"))
    assert ne.metric(z, ne.lift(word("1(0)"))) == pytest.approx(Fraction(1, 3) * (1 - Fraction(1, 4 ** 32)), abs=2 ** -30)
    assert ne.metric(ne.lift(word("11(0)")), ne.lift(word("10(0)"))) == pytest.approx(1 / 6, abs=2 ** -30)
    levels = tuple(Word(Prefixed((1,) * n, periodic((0,)))) for n in range(32))
    assert ne.metric(Tower(levels), z) == pytest.approx(0.25 - 2.0 ** -33, abs=2 ** -30)
    assert ne.metric(z, z) == 0


def test_natural_extension_of_invertible_system_is_isometric_up_to_truncation():
    r = Rotation()
    ne = NaturalExtension(r, 32)
    rng = np.random.default_rng(0)
    for a, b in rng.random((20, 2)):
        x, y = Angle.of(a), Angle.of(b)
        want = r.metric(x, y) * (1 - 2.0 ** -32) / ne.M
        assert abs(ne.metric(ne.lift(x), ne.lift(y)) - want) < 2.0 ** -30
        assert ne.metric(ne.step(ne.lift(x)), ne.lift(r.step(x))) < 2.0 ** -32


def test_natural_extension_towers_are_consistent():
    ne = NaturalExtension(FullShift("one"), 8)
    t = ne.lift(transitive_word(1))
    for a, b in zip(t.levels, t.levels[1:]):
        assert FullShift("one").step(b).block(0, 30).tolist() == a.block(0, 30).tolist()
    back = ne.step_inverse(ne.step(t))
    assert ne.metric(back, t) < 2.0 ** -8


def test_nat_compactification_metric():
    n = NatCompactification()
    assert n.metric(Nat(2), Nat(4)) == 0.25
    assert n.metric(Nat(3), Nat(None)) == pytest.approx(1 / 3)
    assert n.contains(Ball(Nat(5), n.isolating_radius(5)), Nat(6)) is Membership.OUTSIDE


def test_collapsing_a_fixed_point_keeps_distances():
    r = make_full_shift("one")
    q = make_collapse_quotient(r, PointSet(r, word("(0)")))
    rng = np.random.default_rng(1)
    for j in range(20):
        x = Word(Hashed(int(rng.integers(1000))))
        y = Word(Hashed(int(rng.integers(1000))))
        assert q.metric(q.point(x), q.point(y)) <= r.metric(x, y)
    assert q.step(Collapsed()) == Collapsed()
    with pytest.raises(DomainError):
        make_collapse_quotient(r, PointSet(r, word("1(0)")))


# ---------------------------------------------------------------------------
# referee example


def test_referee_examples():
    ref = make_referee_example()
    assert ref.iterate(Collapsed(), 17) == Collapsed()
    x = ref.point(transitive_word(2), 5)
    y = ref.iterate(x, 9)
    assert y.second == Nat(5)
    for delta in (0.5, 0.25, 0.125, 0.0625):
        for p in range(int(2 / delta) + 1, int(2 / delta) + 6):
            s = sensitivity_times(ref, level_set(p), delta, 2000)
            assert s.mode.value == "exact" and not s


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_referee_levels_are_small(p, s1, s2):
    ref = make_referee_example()
    a, b = ref.point(Word(Hashed(s1)), p), ref.point(Word(Hashed(s2)), p)
    assert ref.metric(a, b) <= min(1.0, 2.0 / p) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 10 ** 6), st.integers(1, 12)), min_size=3, max_size=3))
def test_referee_triangle_inequality(pts):
    ref = make_referee_example()
    x, y, z = (ref.point(Word(Hashed(s)), p) for s, p in pts)
    assert ref.metric(x, z) <= ref.metric(x, y) + ref.metric(y, z) + 1e-12
    assert ref.metric(x, y) <= ref.base.metric(x, y)


def test_level_diameter_formula_matches_enumeration():
    rng = random.Random(7)
    checked = 0
    while checked < 20:
        L = rng.randint(0, 3)
        a = rng.randint(-2, 2)
        if L and a + L - 1 > 3:
            continue
        w = tuple(rng.randint(0, 1) for _ in range(L))
        p = rng.randint(1, 9)
        assert _level_diam(w, a, p) == pytest.approx(quotient_level_diam(w, a, p), abs=1e-12)
        checked += 1


def test_referee_collapsed_set():
    c = RefereeCollapse()
    assert c.member(Pair(word("(0)"), Nat(4)))
    assert c.member(Pair(transitive_word(1), Nat(None)))
    assert not c.member(Pair(transitive_word(1), Nat(4)))


# ---------------------------------------------------------------------------
# catalog


def test_catalog_flags_match_predictions():
    for name, e in CATALOG.items():
        s = e.make()
        if "invertible" in e.predictions:
            assert s.invertible == e.predictions["invertible"].value, name
        if "minimal" in e.predictions:
            assert s.minimal_expected == e.predictions["minimal"].value, name
        assert e.to_json()["name"] == name
        for p in e.predictions.values():
            assert p.reason


def test_catalog_lookup():
    assert build("rotation").id.startswith("rotation")
    with pytest.raises(KeyError):
        entry("nope")
