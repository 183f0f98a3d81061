"""Finite-horizon subsets of N with evidence semantics and set certificates.

A :class:`TimeSet` is a bitset over ``{1, ..., N}`` held in a Python int
(bit n <-> time n, bit 0 always clear).  Window scans use shift-and folding
on the whole integer, so a thickness test at scale k costs O(log k)
big-integer operations regardless of N.

Infinite-horizon notions (thick, syndetic) are always answered *at a scale*
and *up to a horizon*; certificates name both.  Certificates are canonical
(least window, least gap, lexicographically first tower) so that any altered
witness fails re-validation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np


class Mode(str, enum.Enum):
    EXACT = "exact"
    CERTIFIED_MEMBERS = "certified_members"
    CERTIFIED_ABSENCES = "certified_absences"


class CertificateError(ValueError):
    """A certificate failed re-validation."""


@dataclass(frozen=True)
class TimeSet:
    horizon: int
    bits: int = 0
    mode: Mode = Mode.EXACT
    provenance: str = ""

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.bits < 0 or self.bits & 1 or self.bits >> (self.horizon + 1):
            raise ValueError("members must lie in {1, ..., horizon}")
        object.__setattr__(self, "mode", Mode(self.mode))

    # -- construction ---------------------------------------------------------
    @classmethod
    def from_members(cls, members: Iterable[int], horizon: int, mode=Mode.EXACT, provenance=""):
        bits = 0
        for n in members:
            if not 1 <= n <= horizon:
                raise ValueError(f"member {n} outside 1..{horizon}")
            bits |= 1 << n
        return cls(horizon, bits, mode, provenance)

    @classmethod
    def from_mask(cls, mask: np.ndarray, mode=Mode.EXACT, provenance=""):
        """``mask[n]`` for ``n = 0..N``; index 0 is ignored."""
        mask = np.asarray(mask, dtype=bool).copy()
        horizon = len(mask) - 1
        mask[0] = False
        raw = np.packbits(mask, bitorder="little").tobytes()
        return cls(horizon, int.from_bytes(raw, "little"), mode, provenance)

    @classmethod
    def interval(cls, lo: int, hi: int, horizon: int, mode=Mode.EXACT, provenance=""):
        lo, hi = max(lo, 1), min(hi, horizon)
        bits = 0 if lo > hi else ((1 << (hi - lo + 1)) - 1) << lo
        return cls(horizon, bits, mode, provenance)

    @classmethod
    def full(cls, horizon: int, **kw):
        return cls.interval(1, horizon, horizon, **kw)

    @classmethod
    def empty(cls, horizon: int, **kw):
        return cls(horizon, 0, **kw)

    # -- views ----------------------------------------------------------------
    @property
    def universe(self) -> int:
        return ((1 << self.horizon) - 1) << 1

    def mask(self) -> np.ndarray:
        nbytes = (self.horizon + 8) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.horizon + 1].astype(bool)

    def members(self) -> list[int]:
        return np.flatnonzero(self.mask()).tolist()

    def __contains__(self, n: int) -> bool:
        return 1 <= n <= self.horizon and bool(self.bits >> n & 1)

    def __len__(self) -> int:
        return self.bits.bit_count() if hasattr(int, "bit_count") else bin(self.bits).count("1")

    def __bool__(self) -> bool:
        return self.bits != 0

    def min(self) -> int | None:
        return None if not self.bits else (self.bits & -self.bits).bit_length() - 1

    def max(self) -> int | None:
        return None if not self.bits else self.bits.bit_length() - 1

    def complement(self) -> "TimeSet":
        dual = {Mode.EXACT: Mode.EXACT,
                Mode.CERTIFIED_MEMBERS: Mode.CERTIFIED_ABSENCES,
                Mode.CERTIFIED_ABSENCES: Mode.CERTIFIED_MEMBERS}[self.mode]
        return TimeSet(self.horizon, self.universe & ~self.bits, dual, f"complement({self.provenance})")

    def shifted(self, m: int, horizon: int | None = None) -> "TimeSet":
        """``m + S`` truncated to the horizon."""
        horizon = self.horizon if horizon is None else horizon
        bits = (self.bits << m) & (((1 << horizon) - 1) << 1)
        return TimeSet(horizon, bits, self.mode, f"{m}+({self.provenance})")

    # -- serialization ------------------------------------------------------------
    def rle(self) -> list[list[int]]:
        """Runs of members as ``[start, length]`` pairs."""
        m = self.mask().astype(np.int8)
        d = np.diff(np.concatenate(([0], m, [0])))
        starts = np.flatnonzero(d == 1)
        stops = np.flatnonzero(d == -1)
        return [[int(a), int(b - a)] for a, b in zip(starts, stops)]

    @classmethod
    def from_rle(cls, runs, horizon: int, mode=Mode.EXACT, provenance=""):
        bits = 0
        for start, length in runs:
            if length <= 0 or start < 1 or start + length - 1 > horizon:
                raise ValueError(f"bad run {start},{length}")
            bits |= ((1 << length) - 1) << start
        return cls(horizon, bits, mode, provenance)

    def to_json(self) -> dict:
        return {"provenance": self.provenance, "horizon": self.horizon,
                "mode": self.mode.value, "members_rle": self.rle()}

    @classmethod
    def from_json(cls, rec: dict) -> "TimeSet":
        return cls.from_rle(rec["members_rle"], rec["horizon"], Mode(rec["mode"]), rec.get("provenance", ""))


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class SetCertificate:
    """``kind`` is one of thick_window, syndetic_gap, delta_tower, ip_generators.

    thick_window: data = (k, n), {n..n+k} inside the set, n least.
    syndetic_gap: data = (g,), g the longest run of non-members in [1, N].
    delta_tower: data = (s_1, ..., s_d), canonical depth-first tower.
    ip_generators: data = (p_1, ..., p_k).
    """

    kind: str
    data: tuple[int, ...]
    horizon: int

    def to_json(self) -> dict:
        return {"kind": self.kind, "data": list(self.data), "horizon": self.horizon}

    @classmethod
    def from_json(cls, rec: dict) -> "SetCertificate":
        return cls(rec["kind"], tuple(int(v) for v in rec["data"]), int(rec["horizon"]))


def _need_members(s: TimeSet) -> None:
    if s.mode is Mode.CERTIFIED_ABSENCES:
        raise ValueError("cannot certify presence from a certified_absences set")


def _runs_of(bits: int, length: int) -> int:
    """Bit n set iff bits n..n+length-1 are all set."""
    m, have = bits, 1
    while have < length and m:
        s = min(have, length - have)
        m &= m >> s
        have += s
    return m


def first_window(s: TimeSet, k: int) -> int | None:
    """Least n with {n, ..., n+k} inside ``s`` (window within the horizon)."""
    m = _runs_of(s.bits, k + 1)
    return None if not m else (m & -m).bit_length() - 1


def max_gap(s: TimeSet) -> int:
    """Longest run of non-members inside [1, N] (0 if s is everything)."""
    comp = s.mask()[1:] == 0
    if not comp.any():
        return 0
    d = np.diff(np.concatenate(([0], comp.astype(np.int8), [0])))
    return int((np.flatnonzero(d == -1) - np.flatnonzero(d == 1)).max())


def gaps(s: TimeSet) -> list[int]:
    """Lengths of the runs of non-members, in order (leading and trailing included)."""
    comp = s.mask()[1:] == 0
    d = np.diff(np.concatenate(([0], comp.astype(np.int8), [0])))
    return (np.flatnonzero(d == -1) - np.flatnonzero(d == 1)).tolist()


def intersect(a: TimeSet, b: TimeSet) -> TimeSet:
    if a.horizon != b.horizon:
        raise ValueError(f"horizon mismatch {a.horizon} != {b.horizon}")
    modes = {a.mode, b.mode}
    prov = f"({a.provenance})&({b.provenance})"
    if modes == {Mode.EXACT}:
        mode = Mode.EXACT
    elif Mode.CERTIFIED_MEMBERS in modes and Mode.CERTIFIED_ABSENCES in modes:
        mode = Mode.CERTIFIED_MEMBERS
        prov += " [degraded: mixed member/absence certification]"
    elif Mode.CERTIFIED_MEMBERS in modes:
        mode = Mode.CERTIFIED_MEMBERS
    else:
        mode = Mode.CERTIFIED_ABSENCES
    return TimeSet(a.horizon, a.bits & b.bits, mode, prov)


def intersect_all(sets: Sequence[TimeSet]) -> TimeSet:
    out = sets[0]
    for s in sets[1:]:
        out = intersect(out, s)
    return out


def is_thick_up_to(s: TimeSet, k: int) -> SetCertificate | None:
    """Window certificate for ``k + 1`` consecutive members, or None.

    On an exact set, None certifies "not thick at scale k up to N".
    """
    _need_members(s)
    if not 1 <= k < s.horizon:
        raise ValueError(f"scale k={k} must satisfy 1 <= k < {s.horizon}")
    n = first_window(s, k)
    return None if n is None else SetCertificate("thick_window", (k, n), s.horizon)


def is_syndetic_up_to(s: TimeSet, g: int) -> SetCertificate | None:
    """Certificate iff every window {n..n+g} inside [1, N] meets ``s``.

    The certificate carries the tight gap (<= g), which makes it canonical.
    """
    _need_members(s)
    if not 0 <= g < s.horizon:
        raise ValueError(f"gap g={g} must satisfy 0 <= g < {s.horizon}")
    tight = max_gap(s)
    return SetCertificate("syndetic_gap", (tight,), s.horizon) if tight <= g else None


def difference_set(seq: Sequence[int]) -> TimeSet:
    seq = list(seq)
    if len(seq) < 2 or any(b <= a for a, b in zip(seq, seq[1:])):
        raise ValueError("need a strictly increasing sequence of length >= 2")
    diffs = {b - a for a, b in combinations(seq, 2)}
    return TimeSet.from_members(diffs, seq[-1] - seq[0], provenance=f"delta{tuple(seq)}")


def delta_tower_search(s: TimeSet, depth: int, budget: int = 200_000) -> SetCertificate | None:
    """Find s_1 < ... < s_d (s_1 = 1) with every pairwise difference in ``s``.

    Depth-first in increasing order, so the result is the lexicographically
    least tower; None means no tower within the horizon (or budget).
    """
    _need_members(s)
    if depth < 2:
        raise ValueError("depth must be >= 2")
    members = s.bits
    nodes = 0

    def dfs(chosen: list[int], cand: int) -> list[int] | None:
        nonlocal nodes
        if len(chosen) == depth - 1:
            return chosen
        while cand:
            nodes += 1
            if nodes > budget:
                return None
            t = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            nxt = cand & (members << t)
            if len(chosen) + 2 == depth or nxt:
                found = dfs(chosen + [t], nxt)
                if found is not None:
                    return found
        return None

    rel = dfs([], members)
    if rel is None:
        return None
    return SetCertificate("delta_tower", tuple([1] + [1 + t for t in rel]), s.horizon)


def subset_sums(generators: Sequence[int]) -> list[int]:
    sums = {0}
    for p in generators:
        sums |= {x + p for x in sums}
    sums.discard(0)
    return sorted(sums)


def ip_fragment_check(s: TimeSet, generators: Sequence[int]) -> bool:
    if not generators or any(p < 1 for p in generators):
        raise ValueError("generators must be positive")
    if sum(generators) > s.horizon:
        raise ValueError(f"subset sums exceed horizon {s.horizon}")
    return all(n in s for n in subset_sums(generators))


def greedy_ip_generators(s: TimeSet, count: int) -> list[int]:
    """Greedy extraction: each new generator is the least member m such that
    m plus every existing subset sum stays in ``s``."""
    gens: list[int] = []
    sums: list[int] = []
    start = 1
    while len(gens) < count:
        found = None
        for m in range(start, s.horizon + 1):
            if m in s and all((m + x) in s for x in sums):
                found = m
                break
        if found is None:
            break
        sums = sums + [found] + [found + x for x in sums]
        gens.append(found)
        start = found + 1
    return gens


def thick_meets_syndetic(a: TimeSet, thick: SetCertificate, b: TimeSet, synd: SetCertificate) -> int:
    """Least n of ``b`` inside ``a``'s certified window."""
    if a.horizon != b.horizon:
        raise ValueError("horizon mismatch")
    validate(thick, a)
    validate(synd, b)
    k, n0 = thick.data
    (g,) = synd.data
    if k < g:
        raise ValueError(f"window length {k + 1} cannot be forced to meet gap {g}")
    window = ((1 << (k + 1)) - 1) << n0
    hit = window & b.bits
    if not hit:
        raise CertificateError("window misses a set certified syndetic at its scale")
    return (hit & -hit).bit_length() - 1


def validate(cert: SetCertificate, s: TimeSet) -> None:
    """Raise :class:`CertificateError` unless ``cert`` is the canonical certificate of ``s``."""
    if cert.horizon != s.horizon:
        raise CertificateError(f"horizon {cert.horizon} != {s.horizon}")
    kind, data = cert.kind, cert.data
    if kind == "thick_window":
        if len(data) != 2:
            raise CertificateError("thick_window needs (k, n)")
        k, n = data
        if k < 1 or n < 1 or n + k > s.horizon:
            raise CertificateError("window outside horizon")
        if first_window(s, k) != n:
            raise CertificateError(f"({k}, {n}) is not the least thick window")
    elif kind == "syndetic_gap":
        if len(data) != 1 or data[0] != max_gap(s):
            raise CertificateError(f"gap {data} is not the tight gap {max_gap(s)}")
    elif kind == "delta_tower":
        tower = list(data)
        if len(tower) < 2 or any(b <= a for a, b in zip(tower, tower[1:])):
            raise CertificateError("tower must be strictly increasing")
        if any((b - a) not in s for a, b in combinations(tower, 2)):
            raise CertificateError("tower difference outside the set")
        canon = delta_tower_search(s, len(tower))
        if canon is None or canon.data != cert.data:
            raise CertificateError("tower is not the canonical one")
    elif kind == "ip_generators":
        if not data or sum(data) > s.horizon or not ip_fragment_check(s, data):
            raise CertificateError("subset sum outside the set")
    else:
        raise CertificateError(f"unknown certificate kind {kind!r}")


def is_valid(cert: SetCertificate, s: TimeSet) -> bool:
    try:
        validate(cert, s)
    except CertificateError:
        return False
    return True
