"""Sensitivity time sets, classification and equicontinuity-point tests.

``S(U, delta) = {n : diam(T^n U) > delta}`` (strict) and ``J(U, delta)`` is
its complement in ``{1..N}``.  When a system gives exact diameter profiles
the sets are exact; otherwise S is built from certified lower bounds and is
only trusted for its members.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import (Ball, DiamProfile, DomainError, DynSystem, Membership, describe_point,
                   describe_set, sampled_profile, spread)
from . import core
from .timesets import (Mode, SetCertificate, TimeSet, first_window, intersect_all,
                       is_syndetic_up_to, is_thick_up_to, max_gap)

YES = "evidence_yes"
NO = "certified_no_at_scale"
UNKNOWN = "inconclusive"
CLASSES = ("sensitive", "thickly_sensitive", "multi_sensitive")


def profile_of(system: DynSystem, u, horizon: int, mode: str = "exact-if-available") -> DiamProfile:
    if mode == "sampled":
        return sampled_profile(system, u, horizon)
    return system.diam_profile(u, horizon)


def _times(mask: np.ndarray, mode: Mode, label: str) -> TimeSet:
    return TimeSet.from_mask(mask, mode, label)


def sensitivity_times(system: DynSystem, u, delta: float, horizon: int,
                      profile: DiamProfile | None = None, mode: str = "exact-if-available") -> TimeSet:
    """``S(u, delta)`` up to ``horizon``: exact or certified_members."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if delta >= system.diameter:
        warnings.warn(f"delta={delta} >= diameter of {system.id}: S is always empty", stacklevel=2)
    prof = profile if profile is not None else profile_of(system, u, horizon, mode)
    exact = prof.exact and mode != "sampled"
    label = f"S[{system.id}; delta={delta!r}]"
    return _times(prof.lo > delta, Mode.EXACT if exact else Mode.CERTIFIED_MEMBERS, label)


def stability_times(system: DynSystem, u, delta: float, horizon: int,
                    profile: DiamProfile | None = None, mode: str = "exact-if-available") -> TimeSet:
    """``J(u, delta)``: the complement of S, with the dual evidence mode."""
    return sensitivity_times(system, u, delta, horizon, profile, mode).complement()


def certified_stable_times(system: DynSystem, u, delta: float, horizon: int,
                           profile: DiamProfile | None = None) -> TimeSet:
    """Times certified to lie in ``J(u, delta)`` (``diam <= delta`` proven)."""
    prof = profile if profile is not None else system.diam_profile(u, horizon)
    mode = Mode.EXACT if prof.exact else Mode.CERTIFIED_MEMBERS
    return _times(prof.hi <= delta, mode, f"J[{system.id}; delta={delta!r}]")


@dataclass
class MultiWitness:
    n: int
    diameters: list[float]
    exact: bool


def multi_sensitivity_witness(system: DynSystem, delta: float, sets: list, horizon: int,
                              profiles: list | None = None) -> MultiWitness | None:
    """Least n in every ``S(U_i, delta)``, or None (a certified empty
    intersection when every profile is exact)."""
    profiles = profiles or [system.diam_profile(u, horizon) for u in sets]
    ts = [sensitivity_times(system, u, delta, horizon, p) for u, p in zip(sets, profiles)]
    both = intersect_all(ts)
    n = both.min()
    if n is None:
        return None
    return MultiWitness(n, [float(p.lo[n]) for p in profiles], all(p.exact for p in profiles))


def pullback_window(system: DynSystem, u, delta: float, k: int, horizon: int):
    """Replay of "multi-sensitive implies thickly sensitive".

    With ``U_i = T^-i U`` for ``i = 0..k``, any n in every ``S(U_i, delta)``
    gives ``{n-k, ..., n}`` inside ``S(U, delta)``.  Returns
    ``(n, window_ok, S)``; n is None when the pulled-back sets have no common
    time with ``n > k``.
    """
    pulled = [system.pullback(u, i, k, delta, None) for i in range(k + 1)]
    ts = [sensitivity_times(system, v, delta, horizon) for v in pulled]
    common = intersect_all(ts)
    common = TimeSet(horizon, common.bits & ~((1 << (k + 1)) - 1), common.mode)
    n = common.min()
    s = sensitivity_times(system, u, delta, horizon)
    if n is None:
        return None, False, s
    ok = all((n - i) in s for i in range(k + 1))
    return n, ok, s


# ---------------------------------------------------------------------------
# classification


def default_deltas(system: DynSystem, count: int = 12) -> list[float]:
    return [system.diameter * 2.0 ** -j for j in range(1, count + 1)]


@dataclass
class SensitivityQuery:
    system_id: str
    deltas: list[float] | None = None
    resolution: int = 6
    horizon: int = 100_000
    k: int = 3
    thick_scale: int = 64
    gap: int = 256
    seed: int = 0
    mode: str = "exact-if-available"
    basis_cap: int = 64
    random_subsets: int = 64
    refine_depth: int = 64
    refine_limit: int = 8

    def __post_init__(self):
        if self.deltas is not None:
            self.deltas = [float(d) for d in self.deltas]
            if any(d <= 0 for d in self.deltas):
                raise ValueError("every delta must be positive")
        if self.horizon < 2:
            raise ValueError("horizon must be >= 2")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 1 <= self.thick_scale < self.horizon:
            raise ValueError("thick scale must lie in [1, horizon)")
        if self.mode not in ("exact-if-available", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def to_json(self):
        return asdict(self)


@dataclass
class Verdict:
    status: str = UNKNOWN
    delta: float | None = None
    derived: bool = False
    note: str = ""
    evidence: list = field(default_factory=list)

    def to_json(self):
        return {"status": self.status, "delta": self.delta, "derived": self.derived,
                "note": self.note, "evidence": self.evidence}


def timeset_digest(rec: dict) -> str:
    body = {k: rec[k] for k in ("horizon", "mode", "members_rle")}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()[:16]


class _Book:
    """Timesets referenced by a report, stored once each."""

    def __init__(self):
        self.records: list[dict] = []
        self.index: dict[tuple, int] = {}

    def add(self, key, ts: TimeSet, u, delta: float, kind: str = "S") -> int:
        if key in self.index:
            return self.index[key]
        rec = ts.to_json()
        rec.update({"kind": kind, "delta": delta, "set": describe_set(u)})
        rec["digest"] = timeset_digest(rec)
        self.records.append(rec)
        self.index[key] = len(self.records) - 1
        return self.index[key]


@dataclass
class SensitivityReport:
    query: SensitivityQuery
    system: dict
    basis_size: int
    deltas: list[float]
    verdicts: dict[str, Verdict]
    timesets: list[dict]
    checks: dict

    def to_json(self):
        return {"query": self.query.to_json(), "system": self.system,
                "basis_size": self.basis_size, "deltas": self.deltas,
                "verdicts": {k: v.to_json() for k, v in self.verdicts.items()},
                "timesets": self.timesets, "checks": self.checks}


class _Profiles:
    def __init__(self, system, horizon, mode, workers):
        self.system, self.horizon, self.mode, self.workers = system, horizon, mode, workers
        self.cache: dict = {}

    def _key(self, u):
        return repr(u)

    def get(self, u) -> DiamProfile:
        key = self._key(u)
        if key not in self.cache:
            self.cache[key] = profile_of(self.system, u, self.horizon, self.mode)
        return self.cache[key]

    def warm(self, sets):
        todo = list({self._key(u): u for u in sets if self._key(u) not in self.cache}.values())
        if self.workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                for u, p in zip(todo, pool.map(lambda v: profile_of(self.system, v, self.horizon, self.mode), todo)):
                    self.cache[self._key(u)] = p
        else:
            for u in todo:
                self.get(u)


def _subsets(size: int, k: int, random_count: int, seed: int):
    idx = range(size)
    for j in range(1, min(k, 3, size) + 1):
        yield from itertools.combinations(idx, j)
    rng = np.random.default_rng(seed)
    for j in range(4, min(k, 8, size) + 1):
        for _ in range(random_count):
            yield tuple(sorted(rng.choice(size, j, replace=False).tolist()))


def possible_times(system: DynSystem, u, delta: float, horizon: int,
                   profile: DiamProfile | None = None) -> TimeSet:
    """Superset of ``S(u, delta)``: times not proven to have ``diam <= delta``.

    Its absences are certified, so an empty window or a bounded maximum here
    is a certified statement about S.
    """
    prof = profile if profile is not None else system.diam_profile(u, horizon)
    mode = Mode.EXACT if prof.exact else Mode.CERTIFIED_ABSENCES
    return _times(prof.hi > delta, mode, f"S+[{system.id}; delta={delta!r}]")


def _refuters(system, q, profiles):
    """Sets at ever finer resolution whose upper bounds might refute."""
    if q.mode == "sampled":
        return
    top = min(q.resolution + q.refine_depth, system.max_resolution)
    steps = sorted({q.resolution + d for d in [0] + [2 ** j for j in range(8)]
                    if q.resolution + d <= top} | {top})
    for res in steps:
        try:
            cands = system.refinement_candidates(res, q.refine_limit)
        except DomainError:
            return
        for u in cands:
            try:
                yield u, profiles.get(u)
            except DomainError:
                continue


def classify(system: DynSystem, query: SensitivityQuery, workers: int = 1) -> SensitivityReport:
    q = query
    n_top = q.horizon
    deltas = sorted(q.deltas or default_deltas(system), reverse=True)
    full = core.basis(system, q.resolution)
    sets = spread(full, q.basis_cap)
    profiles = _Profiles(system, n_top, q.mode, workers)
    profiles.warm(sets)
    book = _Book()
    verdicts = {c: Verdict() for c in CLASSES}
    per_delta = {c: [] for c in CLASSES}
    checks = {"monotone_in_delta": True, "multi_implies_thick": True, "coherent": True}
    prev: dict[int, TimeSet] = {}
    refuter_iter = _refuters(system, q, profiles)
    seen_refuters: list = []

    def refuters():
        yield from seen_refuters
        for item in refuter_iter:
            seen_refuters.append(item)
            yield item

    for delta in deltas:
        S = [sensitivity_times(system, u, delta, n_top, profiles.get(u)) for u in sets]
        for j, s in enumerate(S):
            if j in prev and prev[j].bits & ~s.bits:
                checks["monotone_in_delta"] = False
            prev[j] = s

        # refutations: an exact set whose S is bounded / has no thick window
        sens_no = thick_no = None
        for u, prof in refuters():
            s = possible_times(system, u, delta, n_top, prof)
            if sens_no is None and (s.max() or 0) <= n_top // 2:
                sens_no = (u, s)
            if thick_no is None and first_window(s, q.thick_scale) is None:
                thick_no = (u, s)
            if sens_no and thick_no:
                break
        if sens_no:
            thick_no = thick_no or sens_no

        # sensitive
        if sens_no:
            u, s = sens_no
            i = book.add(("S+", repr(u), delta), s, u, delta, "S+")
            per_delta["sensitive"].append((delta, NO, [{"timeset": i, "max": s.max()}]))
        elif all(s.max() is not None and s.max() > n_top // 2 for s in S):
            ev = [{"timeset": book.add(("S", repr(u), delta), s, u, delta), "max": s.max()}
                  for u, s in zip(sets, S)]
            per_delta["sensitive"].append((delta, YES, ev))
        else:
            per_delta["sensitive"].append((delta, UNKNOWN, []))

        # thickly sensitive
        if thick_no:
            u, s = thick_no
            i = book.add(("S+", repr(u), delta), s, u, delta, "S+")
            item = {"timeset": i, "scale": q.thick_scale}
            jcert = is_syndetic_up_to(s.complement(), min(q.gap, n_top - 1))
            if jcert is not None:
                item["complement_gap"] = jcert.to_json()
            per_delta["thickly_sensitive"].append((delta, NO, [item]))
        else:
            certs = [is_thick_up_to(s, q.thick_scale) for s in S]
            if all(c is not None for c in certs):
                ev = [{"timeset": book.add(("S", repr(u), delta), s, u, delta), "certificate": c.to_json()}
                      for u, s, c in zip(sets, S, certs)]
                per_delta["thickly_sensitive"].append((delta, YES, ev))
            else:
                per_delta["thickly_sensitive"].append((delta, UNKNOWN, []))

        # multi-sensitive (a non-thick S at delta rules it out at delta)
        if thick_no:
            per_delta["multi_sensitive"].append((delta, NO, [{"from": "thickly_sensitive"}]))
        elif any(r[1] == YES for r in per_delta["multi_sensitive"]):
            per_delta["multi_sensitive"].append((delta, UNKNOWN, []))
        else:
            ev, ok = [], True
            for sub in _subsets(len(sets), q.k, q.random_subsets, q.seed):
                both = intersect_all([S[i] for i in sub])
                n = both.min()
                if n is None:
                    ok = False
                    break
                if len(ev) < 32:
                    ev.append({"timesets": [book.add(("S", repr(sets[i]), delta), S[i], sets[i], delta)
                                            for i in sub], "n": n})
            per_delta["multi_sensitive"].append((delta, YES if ok else UNKNOWN, ev if ok else []))

    for c in CLASSES:
        rows = per_delta[c]
        yes = [r for r in rows if r[1] == YES]
        v = verdicts[c]
        if yes:
            delta, _, ev = yes[0]
            v.status, v.delta, v.evidence = YES, delta, ev
        elif rows and all(r[1] == NO for r in rows):
            v.status, v.delta = NO, rows[-1][0]
            v.evidence = [{"delta": d, **e} for d, _, evs in rows for e in evs]
        v.derived = c == "multi_sensitive" and v.status == NO
    verdicts["sensitive"].note = "proxy: S nonempty with a member in (N/2, N]"
    verdicts["thickly_sensitive"].note = f"scale k={q.thick_scale}, horizon N={n_top}"
    verdicts["multi_sensitive"].note = (f"collections of size <= {q.k}"
                                        + ("; no derived from a non-thick S" if verdicts["multi_sensitive"].derived else ""))

    # replay the pull-back argument at the multi delta: pulled-back
    # collections of size k give windows of length k in each S(U)
    mv = verdicts["multi_sensitive"]
    if mv.status == YES and q.k >= 2:
        for u in sets:
            try:
                n, ok, _ = pullback_window(system, u, mv.delta, q.k - 1, n_top)
            except DomainError:
                continue
            if n is not None and not ok:
                checks["multi_implies_thick"] = False
    if verdicts["sensitive"].status == NO and (verdicts["thickly_sensitive"].status != NO
                                               or verdicts["multi_sensitive"].status != NO):
        checks["coherent"] = False
    checks["basis_resolution"] = q.resolution
    return SensitivityReport(q, system.describe(), len(full), deltas, verdicts, book.records, checks)


# ---------------------------------------------------------------------------
# equicontinuity points


def radius_grid(system: DynSystem, levels: int = 40) -> list[float]:
    return [system.diameter * 2.0 ** -j for j in range(levels + 1)]


@dataclass
class EqResult:
    radius: float | None
    certificate: SetCertificate | None = None
    refuted: list[float] = field(default_factory=list)
    entry_time: int = 0

    def __bool__(self):
        return self.radius is not None

    def to_json(self):
        return {"radius": self.radius, "entry_time": self.entry_time,
                "certificate": self.certificate.to_json() if self.certificate else None,
                "refuted": self.refuted}


def _ball_profile(system, x, r, horizon):
    try:
        return system.diam_profile(Ball(x, r), horizon)
    except DomainError:
        return None


def eq_point_test(system: DynSystem, x, eps: float, horizon: int, radii=None) -> EqResult:
    """Largest grid radius r with ``diam(T^n B(x, r)) <= eps`` proven for all
    ``n <= horizon``.  Radii whose lower bounds exceed eps somewhere are listed
    as refuted."""
    out = EqResult(None)
    for r in radii or radius_grid(system):
        prof = _ball_profile(system, x, r, horizon)
        if prof is None:
            continue
        if (prof.hi <= eps).all():
            out.radius = r
            return out
        if (prof.lo > eps).any():
            out.refuted.append(r)
    return out


def syndetic_eq_point_test(system: DynSystem, x, eps: float, gap: int, horizon: int,
                           radii=None, entry: tuple | None = None) -> EqResult:
    """Radius r with ``J(B(x, r), eps)`` certified syndetic at ``gap``.

    ``entry = (m, V)`` uses a set V entered at time m: if ``T^m B(x, r)`` lies
    in V then ``J(B(x, r))`` contains ``m + J(V)``, and the certificate is for
    that shifted set.  A radius is refuted when even the times not excluded
    by lower bounds fail the gap.
    """
    out = EqResult(None)
    shifted = None
    if entry is not None:
        m, v = entry
        if system.contains(v, system.iterate(x, m)) is not Membership.INSIDE:
            raise DomainError("T^m x is not in the entry set")
        base = certified_stable_times(system, v, eps, horizon)
        shifted = base.shifted(m)
        out.entry_time = m
    for r in radii or radius_grid(system):
        if shifted is not None:
            if not maps_into(system, Ball(x, r), entry[0], entry[1]):
                continue
            cert = is_syndetic_up_to(shifted, gap)
            if cert is not None:
                out.radius, out.certificate = r, cert
                return out
            continue
        prof = _ball_profile(system, x, r, horizon)
        if prof is None:
            continue
        j = certified_stable_times(system, Ball(x, r), eps, horizon, prof)
        cert = is_syndetic_up_to(j, gap)
        if cert is not None:
            out.radius, out.certificate = r, cert
            return out
        possible = TimeSet.from_mask(prof.lo <= eps)
        if max_gap(possible) > gap:
            out.refuted.append(r)
    return out


def maps_into(system: DynSystem, ball: Ball, m: int, target) -> bool:
    """Whether ``T^m ball`` is contained in ``target`` (shifts and rotations)."""
    from .systems.rotation import Rotation
    from .systems.shift import Subshift
    from . import fixedpoint as fx
    if isinstance(system, Subshift):
        src = system.as_cylinder(ball)
        dst = system.as_cylinder(target)
        a, b = src.window
        c, d = dst.window
        c, d = c + m, d + m
        if dst.word and not (a <= c and d <= b):
            return False
        return system.contains(system.pullback(dst, m), ball.center) is Membership.INSIDE
    if isinstance(system, Rotation):
        moved = system.iterate(ball.center, m)
        gap = fx.circ_dist(moved.value, target.center.value)
        return (gap + fx.round_fraction(ball.radius) + moved.err + target.center.err
                <= fx.round_fraction(target.radius))
    raise DomainError(f"no containment rule for {system.id}")


def describe_eq(system, x, eps, res: EqResult) -> dict:
    return {"system": system.id, "point": describe_point(x), "eps": eps, **res.to_json()}
