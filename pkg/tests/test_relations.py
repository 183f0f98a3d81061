import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multisens.core import (Angle, Ball, Champernowne, Collapsed, DomainError, Hashed,
                            IdentityMap, Patched, Word, periodic, word)
from multisens.relations import (almost_automorphic_test, almost_one_to_one_evidence,
                                 fiber_diameter, minimality_evidence, product_proximal_check,
                                 proximal_test, return_times, return_times_pair, rp_delta_test,
                                 rp_veech_test, veech_pair)
from multisens.systems import (FullShift, ProductSystem, Projection, Rotation, make_referee_example,
                               make_sturmian, make_toeplitz_odometer_pair, transitive_word)
from multisens.timesets import TimeSet, max_gap

from oracles import circle_dist, golden_word, return_times as brute_returns


def test_proximal_examples():
    one = FullShift("one")
    v = proximal_test(one, word("(0)"), word("1(0)"), 0.1, 100)
    assert v.witnessed and v.data == {"n": 1, "d": 0.0, "eps": 0.1}
    x = transitive_word(4)
    assert proximal_test(one, x, x, 0.01, 10).data["n"] == 1
    r = Rotation()
    v = proximal_test(r, Angle.of(0.1), Angle.of(0.35), 0.2, 10 ** 5)
    assert v.status == "no_witness_up_to"
    with pytest.raises(ValueError):
        proximal_test(r, Angle(0), Angle(0), 0, 10)


def test_proximal_witness_revalidates():
    two = FullShift("two")
    x, y = transitive_word(1), Word(Patched(transitive_word(1).rule, ((40, (1, 0, 1)),)))
    v = proximal_test(two, x, y, 2.0 ** -5, 500)
    n = v.data["n"]
    assert two.metric(two.iterate(x, n), two.iterate(y, n)) < 2.0 ** -5
    for m in range(1, n):
        assert two.metric(two.iterate(x, m), two.iterate(y, m)) >= 2.0 ** -5


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1, exclude_max=True), st.floats(0.01, 0.5))
def test_rotation_never_proximal_for_distinct_points(a, gap):
    r = Rotation()
    x, y = Angle.of(a), Angle.of(a + gap)
    eps = r.metric(x, y) * 0.99
    assert not proximal_test(r, x, y, eps, 1000).witnessed


# ---------------------------------------------------------------------------
# return times


def test_rotation_return_times_three_gaps():
    r = Rotation()
    ts = return_times(r, Angle(0), Ball(Angle(0), 0.05), 10 ** 4)
    a = (np.sqrt(5) - 1) / 2
    want = [n for n in range(1, 10 ** 4 + 1) if circle_dist(n * a, 0) < 0.05]
    assert ts.members() == want
    steps = set(np.diff(want).tolist())
    assert len(steps) <= 3
    assert max_gap(ts) <= 13


def test_fixed_point_returns_always():
    ref = make_referee_example()
    ts = return_times(ref, Collapsed(), Ball(Collapsed(), 0.25), 500)
    assert ts.members() == list(range(1, 501))


def test_transitive_point_visits_every_cylinder():
    one = FullShift("one")
    x = transitive_word(2)
    for u in one.basis(6):
        assert return_times(one, x, u, 3000)


def test_sturmian_return_times_match_scan():
    s, _ = make_sturmian()
    x = s.point()
    sym = golden_word(0, 2100)
    for u in s.basis(4):
        got = return_times(s, x, u, 2000).members()
        assert got == brute_returns(sym, u.word, u.offset, 2000)


def test_return_times_pair_contains_point_returns():
    s, _ = make_sturmian()
    u, v = s.basis(3)[0], s.basis(3)[2]
    both = return_times_pair(s, u, v, 500, count=8)
    for x in s.sample(u, 8, 0):
        assert return_times(s, x, v, 500).bits & ~both.bits == 0


# ---------------------------------------------------------------------------
# regional proximality


def test_veech_refuses_non_minimal_systems():
    two = FullShift("two")
    x = transitive_word(1)
    with pytest.raises(DomainError):
        rp_veech_test(two, x, x, Ball(x, 0.25), Ball(x, 0.25), 100)


def test_veech_diagonal_for_minimal_system():
    s, _ = make_sturmian()
    x = s.point(theta=Angle.of(0.2).value)
    u = Ball(x, 2.0 ** -3)
    v = rp_veech_test(s, x, x, u, u, 2000)
    assert v.witnessed
    n, m = v.data["n"], v.data["m"]
    for t in (n, m, n + m):
        assert s.metric(s.iterate(x, t), x) < 2.0 ** -3


def test_full_shift_pairs_are_regionally_proximal():
    two = FullShift("two")
    for seed in range(10):
        x, y = Word(Hashed(seed)), Word(Hashed(seed + 100))
        u, v = Ball(x, 0.25), Ball(y, 0.25)
        ver = rp_veech_test(two, x, y, u, v, 1000, require_minimal=False)
        assert ver.witnessed and "note" in ver.data
        n, m = ver.data["n"], ver.data["m"]
        assert n + m <= 1000
        d2 = rp_delta_test(two, x, y, v, 1000, 2, require_minimal=False)
        assert d2.witnessed
        d3 = rp_delta_test(two, x, y, v, 10 ** 4, 3, require_minimal=False)
        tower = d3.data["tower"]
        B = TimeSet.from_json(d3.data["B"])
        assert all((b - a) in B for i, a in enumerate(tower) for b in tower[i + 1:])


def test_rotation_separated_pairs_have_no_witness():
    r = Rotation()
    x, y = Angle.of(0.1), Angle.of(0.6)
    u, v = Ball(x, 0.01), Ball(y, 0.01)
    assert not rp_veech_test(r, x, y, u, v, 10 ** 5).witnessed
    assert not rp_delta_test(r, x, y, v, 10 ** 5, 3).witnessed


@settings(max_examples=100, deadline=None)
@given(st.sets(st.integers(1, 60)), st.sets(st.integers(1, 60)))
def test_veech_pair_is_least(a, b):
    A, B = TimeSet.from_members(a, 60), TimeSet.from_members(b, 60)
    want = None
    for m in sorted(b):
        hits = [n for n in sorted(a) if n + m in a]
        if hits:
            want = (hits[0], m)
            break
    assert veech_pair(A, B) == want


# ---------------------------------------------------------------------------
# minimality


def test_minimality_evidence():
    r = Rotation()
    assert minimality_evidence(r, [Angle.of(0.3)], 4, 5000).passed
    s, _ = make_sturmian()
    rep = minimality_evidence(s, [s.point()], 5, 5000)
    assert rep.passed and rep.max_gap < 500
    one = FullShift("one")
    rep = minimality_evidence(one, [word("(0)")], 1, 1000)
    assert not rep.passed
    assert rep.failures[0]["set"]["word"] == [1]


# ---------------------------------------------------------------------------
# fibers


def test_fiber_diameters():
    s, cm = make_sturmian()
    assert fiber_diameter(cm, Angle.of(0.3141592653), resolution=20).singleton
    zero = fiber_diameter(cm, Angle(0), resolution=20)
    assert zero.lower_bound >= 0.5 and not zero.singleton
    ident = fiber_diameter(IdentityMap(Rotation()), Angle.of(0.4))
    assert ident.lower_bound == 0 and ident.singleton


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1, exclude_max=True), st.integers(2, 20), st.integers(2, 20))
def test_singleton_evidence_is_monotone_in_resolution(t, r1, r2):
    s, cm = make_sturmian()
    lo, hi = sorted((r1, r2))
    y = Angle.of(t)
    if fiber_diameter(cm, y, resolution=hi).singleton:
        assert fiber_diameter(cm, y, resolution=lo).singleton


def test_almost_one_to_one_evidence():
    s, cm = make_sturmian()
    rng = np.random.default_rng(0)
    grid = [Angle.of(t) for t in rng.random(20)]
    rep = almost_one_to_one_evidence(cm, grid)
    assert rep.singleton_fraction == 1.0
    t, o, f = make_toeplitz_odometer_pair()
    rep = almost_one_to_one_evidence(f, [o.random_point(j) for j in range(10)])
    assert rep.singleton_fraction == 1.0
    fs = ProductSystem(FullShift("one"), FullShift("one"))
    rep = almost_one_to_one_evidence(Projection(fs), [transitive_word(j) for j in range(5)])
    assert rep.singleton_fraction == 0 and rep.min_psi == 1.0
    assert "no singleton" in rep.verdict


def test_product_proximal_check():
    r = Rotation()
    ident = IdentityMap(r)
    rep = product_proximal_check(ident, ident, [(Angle.of(0.1), Angle.of(0.7))], 0.01, 10)
    assert rep.rate == 1.0 and rep.vacuous == 1
    s, cm = make_sturmian()
    orbit = [r.iterate(Angle(0), -j) for j in range(3)]
    rep = product_proximal_check(cm, cm, [(a, b) for a in orbit for b in orbit], 2.0 ** -6, 200)
    assert rep.rate == 1.0 and rep.vacuous == 0


# ---------------------------------------------------------------------------
# almost automorphy


def test_almost_automorphic_examples():
    r = Rotation()
    assert almost_automorphic_test(r, Angle.of(0.3), 10, 10 ** 5).passed
    s, _ = make_sturmian()
    rep = almost_automorphic_test(s, s.point(theta=Angle.of(0.3).value), 10, 10 ** 5)
    assert rep.passed and len(rep.times) == 8
    assert all(b < a or a == 0 for a, b in zip(rep.forward, rep.forward[1:])) or rep.forward[-1] < 2 ** -9


def test_almost_automorphic_fails_for_adversarial_limit():
    two = FullShift("two")
    # zeros on the left, growing blocks of ones on the right
    patches = tuple((4 ** j, (1,) * j) for j in range(2, 12))
    x = Word(Patched(Champernowne(2, periodic((0,))), patches))
    rep = almost_automorphic_test(two, x, 10, 10 ** 5, x_prime=Word(periodic((1,))))
    # the near returns exist but never pull x' back towards x
    assert not rep.passed and len(rep.times) >= 4
    assert min(rep.backward) == 1.0


def test_almost_automorphic_needs_invertible():
    with pytest.raises(DomainError):
        almost_automorphic_test(FullShift("one"), word("(0)"), 5, 100)
