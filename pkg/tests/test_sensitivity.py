import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multisens.core import Angle, Ball, Cylinder, Hashed, Word, sampled_profile, word
from multisens.sensitivity import (NO, UNKNOWN, YES, SensitivityQuery, classify, eq_point_test,
                                   multi_sensitivity_witness, possible_times, profile_of,
                                   pullback_window, radius_grid, sensitivity_times,
                                   stability_times, syndetic_eq_point_test, timeset_digest)
from multisens.systems import (FullShift, ProductSystem, Rotation, build, level_set,
                               make_referee_example, make_sturmian, transitive_word)
from multisens.timesets import Mode, TimeSet, is_valid, SetCertificate

from oracles import one_sided_diam


def test_full_shift_sensitivity_times():
    s = FullShift("one")
    got = sensitivity_times(s, Cylinder((0, 1)), 0.5, 1000)
    assert got.mode is Mode.EXACT
    assert got.members() == list(range(2, 1001))
    assert stability_times(s, Cylinder((0, 1)), 0.5, 1000).members() == [1]
    # first few times against enumeration
    for n in range(1, 9):
        assert (n in got) == (one_sided_diam((0, 1), n) > 0.5)


def test_boundary_diameter_is_not_a_member():
    s = FullShift("one")
    # diam(s^(L-1)[w]) = 1/2 exactly, which is not > 1/2
    got = sensitivity_times(s, Cylinder((1, 1, 0, 1)), 0.5, 20)
    assert 3 not in got and 4 in got


def test_rotation_and_referee_sets_are_empty():
    r = Rotation()
    for u in r.basis(4):
        # arcs of radius 1/16 have diameter 1/8: never more than 1/8, always more than 1/9
        assert not sensitivity_times(r, u, 0.125, 10 ** 4)
        assert sensitivity_times(r, u, 1 / 9, 10 ** 4).members() == list(range(1, 10 ** 4 + 1))
    assert stability_times(r, r.basis(4)[0], 0.2, 100).members() == list(range(1, 101))
    ref = make_referee_example()
    assert not sensitivity_times(ref, level_set(9), 0.25, 3000)


def test_large_delta_warns():
    with pytest.warns(UserWarning):
        sensitivity_times(Rotation(), Rotation().basis(2)[0], 0.5, 10)


def test_sampled_mode_lists_only_witnessed_times():
    s = FullShift("one")
    u = Cylinder((0, 1, 1))
    prof = sampled_profile(s, u, 40, count=8, seed=3)
    got = sensitivity_times(s, u, 0.5, 40, prof, mode="sampled")
    assert got.mode is Mode.CERTIFIED_MEMBERS
    for n in got.members():
        a, b = prof.witnesses[n]
        assert s.metric(s.iterate(a, n), s.iterate(b, n)) > 0.5
    assert set(got.members()) <= set(sensitivity_times(s, u, 0.5, 40).members())


def test_multi_witness_examples():
    s = FullShift("one")
    rng = np.random.default_rng(4)
    for _ in range(10):
        lengths = rng.integers(1, 9, size=5)
        lengths[0] = 8
        sets = [Cylinder(tuple(rng.integers(0, 2, size=L).tolist())) for L in lengths]
        w = multi_sensitivity_witness(s, 0.5, sets, 200)
        assert w.n == 8 and w.exact
    r = Rotation()
    assert multi_sensitivity_witness(r, 0.25, r.basis(3)[:3], 1000) is None
    u = Cylinder((1, 0, 0))
    assert multi_sensitivity_witness(s, 0.5, [u], 100).n == sensitivity_times(s, u, 0.5, 100).min()


def test_pullback_window_on_full_shift():
    s = FullShift("one")
    for k in (1, 5, 20):
        n, ok, S = pullback_window(s, Cylinder((0, 1, 1)), 0.5, k, 500)
        assert ok and all((n - i) in S for i in range(k + 1))


def test_possible_times_contain_exact_times():
    s, _ = make_sturmian()
    for u in s.basis(4):
        a = sensitivity_times(s, u, 0.125, 2000)
        b = possible_times(s, u, 0.125, 2000)
        assert a.bits & ~b.bits == 0


words = st.lists(st.integers(0, 1), min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(words, words, st.integers(1, 6), st.integers(1, 6), st.sampled_from(["full", "sturmian"]))
def test_monotone_in_delta_and_set(w, ext, j1, j2, kind):
    s = FullShift("two") if kind == "full" else make_sturmian()[0]
    if kind == "sturmian":
        lang = s.language(len(w) + len(ext))
        full = lang[hash(tuple(w + ext)) % len(lang)]
        w, ext = list(full[:len(w)]), list(full[len(w):])
    big, small = Cylinder(tuple(w), 0), Cylinder(tuple(w + ext), 0)
    d1, d2 = sorted([2.0 ** -j1, 2.0 ** -j2])
    a = sensitivity_times(s, big, d2, 300)
    b = sensitivity_times(s, big, d1, 300)
    assert a.bits & ~b.bits == 0
    c = sensitivity_times(s, small, d1, 300)
    assert c.bits & ~b.bits == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 8))
def test_complement_coherence(seed, j):
    s, _ = make_sturmian()
    u = s.basis(5)[seed % 6]
    a = sensitivity_times(s, u, 2.0 ** -j, 500)
    b = stability_times(s, u, 2.0 ** -j, 500)
    assert a.bits | b.bits == TimeSet.full(500).bits and a.bits & b.bits == 0


# ---------------------------------------------------------------------------
# classification


def _report(name, **kw):
    sys_ = build(name)
    q = SensitivityQuery(sys_.id, **kw)
    return sys_, classify(sys_, q)


def test_query_validation():
    with pytest.raises(ValueError):
        SensitivityQuery("x", deltas=[-1.0])
    with pytest.raises(ValueError):
        SensitivityQuery("x", horizon=1)
    with pytest.raises(ValueError):
        SensitivityQuery("x", mode="guess")


@pytest.mark.parametrize("name,expected", [
    ("full_shift", (YES, YES, YES)),
    ("rotation", (NO, NO, NO)),
    ("sturmian", (YES, NO, NO)),
    ("referee_example", (NO, NO, NO)),
    ("shift_square", (YES, YES, YES)),
])
def test_classify_verdicts(name, expected):
    _, rep = _report(name, horizon=4000)
    got = tuple(rep.verdicts[c].status for c in ("sensitive", "thickly_sensitive", "multi_sensitive"))
    assert got == expected
    assert rep.checks["monotone_in_delta"] and rep.checks["coherent"]
    assert rep.checks["multi_implies_thick"]
    if expected[2] == NO:
        assert rep.verdicts["multi_sensitive"].derived


def test_report_evidence_revalidates():
    _, rep = _report("full_shift", horizon=2000)
    data = rep.to_json()
    for rec in data["timesets"]:
        assert rec["digest"] == timeset_digest(rec)
    for e in data["verdicts"]["thickly_sensitive"]["evidence"]:
        ts = TimeSet.from_json(data["timesets"][e["timeset"]])
        assert is_valid(SetCertificate.from_json(e["certificate"]), ts)
    for e in data["verdicts"]["sensitive"]["evidence"]:
        assert TimeSet.from_json(data["timesets"][e["timeset"]]).max() == e["max"] > 1000


def test_sturmian_thick_refutation_carries_syndetic_complement():
    _, rep = _report("sturmian", horizon=4000)
    data = rep.to_json()
    ev = data["verdicts"]["thickly_sensitive"]["evidence"]
    assert any("complement_gap" in e for e in ev)


def test_classify_is_deterministic_across_workers():
    s = build("sturmian")
    q = SensitivityQuery(s.id, horizon=3000, seed=5)
    assert classify(s, q).to_json() == classify(s, q, workers=4).to_json()


# ---------------------------------------------------------------------------
# equicontinuity points


def test_rotation_equicontinuity_radius():
    r = Rotation()
    for t in (0.0, 0.3, 0.77):
        for eps in (2.0 ** -3, 2.0 ** -5):
            res = eq_point_test(r, Angle.of(t), eps, 10 ** 4)
            # an arc of radius r has diameter 2r
            assert res.radius == eps / 2
            syn = syndetic_eq_point_test(r, Angle.of(t), eps, 1, 10 ** 4)
            assert syn.radius == eps / 2 and syn.certificate.data == (0,)


def test_full_shift_has_no_equicontinuity_points():
    s = FullShift("one")
    assert not eq_point_test(s, transitive_word(1), 0.5, 200)
    assert not eq_point_test(s, word("(0)"), 0.5, 200)


def test_referee_points_fail_both_tests():
    ref = make_referee_example()
    x = ref.point(transitive_word(3), 3)
    eq = eq_point_test(ref, x, 0.2, 2000)
    syn = syndetic_eq_point_test(ref, x, 0.2, 64, 2000)
    assert not eq and not syn
    assert len(syn.refuted) > 0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 6), st.integers(1, 50),
       st.sampled_from(["rotation", "odometer", "toeplitz"]))
def test_equicontinuity_implies_syndetic(seed, j, g, name):
    s = build(name)
    x = s.sample(s.basis(1)[seed % 2], 1, seed)[0]
    eps = 2.0 ** -j
    radii = radius_grid(s, 14)
    eq = eq_point_test(s, x, eps, 400, radii)
    if eq:
        assert syndetic_eq_point_test(s, x, eps, g, 400, radii=[eq.radius])


def test_radius_grid():
    g = radius_grid(Rotation(), 4)
    assert g == [0.5, 0.25, 0.125, 0.0625, 0.03125]
