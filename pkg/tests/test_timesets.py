import itertools

import pytest
from hypothesis import given, settings, strategies as st

from multisens.timesets import (CertificateError, Mode, SetCertificate, TimeSet, delta_tower_search,
                                difference_set, first_window, gaps, greedy_ip_generators, intersect,
                                ip_fragment_check, is_syndetic_up_to, is_thick_up_to, is_valid,
                                max_gap, thick_meets_syndetic, validate)


def ts(members, n, mode=Mode.EXACT):
    return TimeSet.from_members(members, n, mode)


def test_members_must_lie_in_horizon():
    with pytest.raises(ValueError):
        ts([0], 10)
    with pytest.raises(ValueError):
        ts([11], 10)


def test_rle_round_trip():
    s = ts([1, 2, 3, 7, 9, 10], 12)
    assert s.rle() == [[1, 3], [7, 1], [9, 2]]
    assert TimeSet.from_json(s.to_json()) == s


def test_intersection_examples():
    a, b = TimeSet.interval(2, 10, 10), TimeSet.interval(5, 10, 10)
    assert intersect(a, b).members() == list(range(5, 11))
    assert not intersect(a, TimeSet.empty(10))
    c = intersect(ts([2, 4, 6], 10), ts([4], 10, Mode.CERTIFIED_MEMBERS))
    assert c.members() == [4] and c.mode is Mode.CERTIFIED_MEMBERS
    d = intersect(ts([4], 10, Mode.CERTIFIED_ABSENCES), ts([4], 10, Mode.CERTIFIED_MEMBERS))
    assert d.mode is Mode.CERTIFIED_MEMBERS and "degraded" in d.provenance
    with pytest.raises(ValueError):
        intersect(TimeSet.empty(5), TimeSet.empty(6))


def test_thick_examples():
    cert = is_thick_up_to(TimeSet.interval(2, 1000, 1000), 100)
    assert cert.data == (100, 2)
    assert is_thick_up_to(ts(range(2, 1001, 2), 1000), 1) is None
    with pytest.raises(ValueError):
        is_thick_up_to(ts([1], 10, Mode.CERTIFIED_ABSENCES), 2)


def test_syndetic_examples():
    assert is_syndetic_up_to(TimeSet.full(100), 1).data == (0,)
    squares = ts([k * k for k in range(1, 101)], 10 ** 4)
    assert is_syndetic_up_to(squares, 50) is None
    assert max_gap(squares) == 198


def test_difference_set_examples():
    assert difference_set([1, 3, 6]).members() == [2, 3, 5]
    assert difference_set([1, 2]).members() == [1]
    assert difference_set([1, 2, 4, 8]).members() == [1, 2, 3, 4, 6, 7]
    with pytest.raises(ValueError):
        difference_set([3, 2])


def test_delta_tower_examples():
    assert delta_tower_search(TimeSet.full(50), 5).data == (1, 2, 3, 4, 5)
    assert delta_tower_search(ts(range(1, 200, 2), 200), 3) is None
    seq = [3, 6, 12, 24, 48]
    s = difference_set(seq)
    cert = delta_tower_search(s, len(seq))
    assert cert is not None
    validate(cert, s)


def test_ip_examples():
    assert ip_fragment_check(TimeSet.full(10), [1, 2, 4])
    assert not ip_fragment_check(ts([1, 2, 4, 5], 10), [1, 2])
    with pytest.raises(ValueError):
        ip_fragment_check(TimeSet.full(5), [4, 4])
    s = ts([n for n in range(1, 400) if n % 3 == 0], 400)
    gens = greedy_ip_generators(s, 4)
    assert len(gens) == 4 and ip_fragment_check(s, gens)


def test_thick_meets_syndetic_examples():
    a = TimeSet.interval(100, 200, 1000)
    b = ts(range(7, 1001, 7), 1000)
    n = thick_meets_syndetic(a, is_thick_up_to(a, 7), b, is_syndetic_up_to(b, 7))
    assert n == 105
    full = TimeSet.full(50)
    assert thick_meets_syndetic(full, is_thick_up_to(full, 1), full, is_syndetic_up_to(full, 1)) == 1


def test_corrupt_certificates_rejected():
    s = TimeSet.interval(5, 60, 100)
    with pytest.raises(CertificateError):
        validate(SetCertificate("thick_window", (10, 6), 100), s)  # not least
    with pytest.raises(CertificateError):
        validate(SetCertificate("syndetic_gap", (3,), 100), s)
    with pytest.raises(CertificateError):
        validate(SetCertificate("thick_window", (10, 5), 99), s)
    with pytest.raises(CertificateError):
        validate(SetCertificate("bogus", (1,), 100), s)


# ---------------------------------------------------------------------------
# properties against direct enumeration

sets = st.integers(2, 80).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.integers(1, n))))


def _brute_window(members, n, k):
    for a in range(1, n - k + 1):
        if all(a + i in members for i in range(k + 1)):
            return a
    return None


def _brute_gap(members, n):
    best = run = 0
    for i in range(1, n + 1):
        run = 0 if i in members else run + 1
        best = max(best, run)
    return best


@settings(max_examples=200, deadline=None)
@given(sets, st.integers(1, 10))
def test_thick_matches_enumeration(nm, k):
    n, members = nm
    if k >= n:
        return
    s = ts(members, n)
    assert first_window(s, k) == _brute_window(members, n, k)
    cert = is_thick_up_to(s, k)
    if cert:
        assert is_valid(cert, s)


@settings(max_examples=200, deadline=None)
@given(sets)
def test_gap_matches_enumeration(nm):
    n, members = nm
    s = ts(members, n)
    assert max_gap(s) == _brute_gap(members, n)
    assert sum(gaps(s)) == n - len(members)
    g = max_gap(s)
    if g < n:
        assert is_valid(is_syndetic_up_to(s, g), s)
    if 0 < g:
        assert is_syndetic_up_to(s, g - 1) is None


@settings(max_examples=200, deadline=None)
@given(sets)
def test_complement_is_bit_exact(nm):
    n, members = nm
    s = ts(members, n)
    c = s.complement()
    assert set(c.members()) == set(range(1, n + 1)) - set(members)
    assert (c.complement().bits, c.complement().mode) == (s.bits, s.mode)


@settings(max_examples=100, deadline=None)
@given(sets, st.integers(2, 4))
def test_tower_matches_enumeration(nm, depth):
    n, members = nm
    s = ts(members, n)
    cert = delta_tower_search(s, depth)
    # least tower starting at 1 by brute force
    want = None
    for rest in itertools.combinations(range(2, n + 2), depth - 1):
        tower = (1,) + rest
        if all(b - a in members for a, b in itertools.combinations(tower, 2)):
            want = tower
            break
    assert (cert.data if cert else None) == want


@settings(max_examples=200, deadline=None)
@given(sets, st.integers(1, 10), st.integers(0, 8))
def test_single_bit_flip_breaks_window(nm, k, bit):
    n, members = nm
    if k >= n:
        return
    s = ts(members, n)
    cert = is_thick_up_to(s, k)
    if cert is None:
        return
    k0, a = cert.data
    bad = SetCertificate("thick_window", (k0, a ^ (1 << bit)), n)
    assert not is_valid(bad, s)
