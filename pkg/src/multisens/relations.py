"""Proximality, regional proximality through return times, minimality
evidence and fiber analysis of factor maps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import fixedpoint as fx
from .core import (DomainError, DynSystem, FactorMap, Membership, Pair, describe_point,
                   describe_set, spread)
from .systems.combinators import ProductSystem
from .systems.rotation import Rotation
from .systems.shift import Subshift, ball_radius_depth
from .timesets import Mode, TimeSet, delta_tower_search, max_gap

WITNESSED = "witnessed"
NO_WITNESS = "no_witness_up_to"


@dataclass
class RelationVerdict:
    relation: str
    status: str
    data: dict = field(default_factory=dict)
    pair: tuple = ()

    @property
    def witnessed(self) -> bool:
        return self.status == WITNESSED

    def to_json(self):
        return {"relation": self.relation, "status": self.status, "data": self.data,
                "pair": [describe_point(p) for p in self.pair]}


# ---------------------------------------------------------------------------
# proximality


def _close_times_shift(system: Subshift, x, y, eps: float, horizon: int) -> np.ndarray:
    """Mask over n = 0..horizon of ``d(T^n x, T^n y) < eps``."""
    k = ball_radius_depth(eps)
    if k == 0:
        return np.ones(horizon + 1, bool)
    if system.two_sided:
        lo, width = -(k - 1), 2 * k - 1
    else:
        lo, width = 0, k
    diff = x.block(lo, lo + horizon + width) != y.block(lo, lo + horizon + width)
    return ~sliding_window_view(diff, width).any(axis=1)


def proximal_test(system: DynSystem, x, y, eps: float, horizon: int) -> RelationVerdict:
    """Least ``n in 1..N`` with ``d(T^n x, T^n y) < eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    n_hit = None
    if isinstance(system, Subshift):
        close = _close_times_shift(system, x, y, eps, horizon)
        close[0] = False
        hits = np.flatnonzero(close)
        n_hit = int(hits[0]) if hits.size else None
    elif isinstance(system, Rotation):
        # T^n x - T^n y = x - y exactly in fixed point
        n_hit = 1 if system.metric(x, y) < eps else None
    else:
        a, b = system.step(x), system.step(y)
        for n in range(1, horizon + 1):
            if system.metric(a, b) < eps:
                n_hit = n
                break
            a, b = system.step(a), system.step(b)
    if n_hit is None:
        return RelationVerdict("proximal", NO_WITNESS, {"eps": eps, "horizon": horizon}, (x, y))
    d = system.metric(system.iterate(x, n_hit), system.iterate(y, n_hit))
    return RelationVerdict("proximal", WITNESSED, {"n": n_hit, "d": d, "eps": eps}, (x, y))


# ---------------------------------------------------------------------------
# return times


def return_times(system: DynSystem, x, u, horizon: int) -> TimeSet:
    """``N(x, U) = {n : T^n x in U}``; boundary-uncertain times are left out."""
    inside, uncertain = system.orbit_membership(x, u, horizon)
    mode = Mode.CERTIFIED_MEMBERS if uncertain[1:].any() else Mode.EXACT
    ts = TimeSet.from_mask(inside, mode, f"N[{system.id}]")
    return ts


def uncertain_count(system: DynSystem, x, u, horizon: int) -> int:
    _, uncertain = system.orbit_membership(x, u, horizon)
    return int(uncertain[1:].sum())


def return_times_pair(system: DynSystem, u, v, horizon: int, count: int = 16, seed: int = 0) -> TimeSet:
    """``N(U, V) = {n : U meets T^-n V}`` from sampled points of U (members only)."""
    bits = 0
    for x in system.sample(u, count, seed):
        if system.contains(u, x) is Membership.INSIDE:
            bits |= return_times(system, x, v, horizon).bits
    return TimeSet(horizon, bits, Mode.CERTIFIED_MEMBERS, f"N[{system.id}; U,V]")


def _require_inside(system, u, x, what):
    if system.contains(u, x) is not Membership.INSIDE:
        raise DomainError(f"{what} is not inside its neighbourhood")


def veech_pair(a: TimeSet, b: TimeSet) -> tuple[int, int] | None:
    """Least m in B, then least n, with n and n+m in A."""
    for m in b.members():
        hit = a.bits & (a.bits >> m)
        hit &= ~1
        if hit:
            return (hit & -hit).bit_length() - 1, m
    return None


def rp_veech_test(system: DynSystem, x, y, u, v, horizon: int,
                  require_minimal: bool = True) -> RelationVerdict:
    """Search ``n, m`` with ``T^n x, T^(n+m) x in U`` and ``T^m x in V``.

    A witness puts (x, y) in the regionally proximal relation on any system;
    its absence only means something for minimal systems, so by default
    other systems are refused.
    """
    if require_minimal and not system.minimal_expected:
        raise DomainError(f"{system.id} is not minimal; pass require_minimal=False to search anyway")
    _require_inside(system, u, x, "x")
    _require_inside(system, v, y, "y")
    a = return_times(system, x, u, horizon)
    b = return_times(system, x, v, horizon)
    shrunk = uncertain_count(system, x, u, horizon) + uncertain_count(system, x, v, horizon)
    data = {"A": a.to_json(), "B": b.to_json(), "uncertain_dropped": shrunk,
            "U": describe_set(u), "V": describe_set(v), "horizon": horizon}
    if not system.minimal_expected:
        data["note"] = "system not minimal: absence of a witness is not evidence"
    found = veech_pair(a, b)
    if found is None:
        return RelationVerdict("regionally_proximal", NO_WITNESS, data, (x, y))
    data["n"], data["m"] = found
    return RelationVerdict("regionally_proximal", WITNESSED, data, (x, y))


def rp_delta_test(system: DynSystem, x, y, v, horizon: int, depth: int,
                  require_minimal: bool = True) -> RelationVerdict:
    """Depth-d tower ``s_1 < .. < s_d`` with all differences in ``N(x, V)``."""
    if require_minimal and not system.minimal_expected:
        raise DomainError(f"{system.id} is not minimal; pass require_minimal=False to search anyway")
    _require_inside(system, v, y, "y")
    b = return_times(system, x, v, horizon)
    data = {"B": b.to_json(), "V": describe_set(v), "depth": depth, "horizon": horizon}
    cert = delta_tower_search(b, depth)
    if cert is None:
        return RelationVerdict("delta_return", NO_WITNESS, data, (x, y))
    data["tower"] = list(cert.data)
    return RelationVerdict("delta_return", WITNESSED, data, (x, y))


# ---------------------------------------------------------------------------
# minimality


@dataclass
class MinimalityReport:
    passed: bool
    max_gap: int
    gap_bound: int
    checked: int
    failures: list = field(default_factory=list)

    def to_json(self):
        return {"passed": self.passed, "max_gap": self.max_gap, "gap_bound": self.gap_bound,
                "checked": self.checked, "failures": self.failures[:20]}


def minimality_evidence(system: DynSystem, points: list, resolution: int, horizon: int,
                        gap_bound: int | None = None, basis_cap: int = 256) -> MinimalityReport:
    """Every ``N(x, U)`` (U in the bases up to ``resolution``) is syndetic
    with tight gap below ``gap_bound`` (default N/10)."""
    bound = gap_bound if gap_bound is not None else horizon // 10
    worst, checked, failures = 0, 0, []
    for r in range(1, resolution + 1):
        for u in spread(system.basis(r), basis_cap):
            for i, x in enumerate(points):
                g = max_gap(return_times(system, x, u, horizon))
                checked += 1
                worst = max(worst, g)
                if g >= bound:
                    failures.append({"point": i, "set": describe_set(u), "gap": g})
    return MinimalityReport(not failures, worst, bound, checked, failures)


# ---------------------------------------------------------------------------
# fibers


@dataclass
class FiberEstimate:
    lower_bound: float
    singleton: bool
    size: int
    resolution: int

    def to_json(self):
        return {"psi_lower": self.lower_bound, "singleton": self.singleton,
                "fiber_points": self.size, "resolution": self.resolution}


def fiber_diameter(fmap: FactorMap, y, count: int = 8, resolution: int = 20) -> FiberEstimate:
    """Lower bound on ``diam(pi^-1 y)`` from the constructed fiber points."""
    pts = fmap.fiber(y, count, resolution)
    src = fmap.source
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, src.metric(pts[i], pts[j], resolution))
    return FiberEstimate(best, best < 2.0 ** -resolution, len(pts), resolution)


@dataclass
class AlmostOneToOneReport:
    singleton_fraction: float
    min_psi: float
    verdict: str
    estimates: list

    def to_json(self):
        return {"singleton_fraction": self.singleton_fraction, "min_psi": self.min_psi,
                "verdict": self.verdict, "estimates": [e.to_json() for e in self.estimates]}


def almost_one_to_one_evidence(fmap: FactorMap, grid: list, resolution: int = 20,
                               count: int = 8) -> AlmostOneToOneReport:
    """Either singleton fibers show up (dense singletons, almost one-to-one) or
    the fiber diameter stays bounded away from 0 on the grid."""
    est = [fiber_diameter(fmap, y, count, resolution) for y in grid]
    frac = sum(e.singleton for e in est) / max(len(est), 1)
    low = min((e.lower_bound for e in est), default=0.0)
    if frac > 0:
        verdict = "singleton fibers observed: consistent with almost one-to-one"
    else:
        verdict = f"no singleton fibers; fiber diameter >= {low} on the grid"
    return AlmostOneToOneReport(frac, low, verdict, est)


@dataclass
class ProductProximalReport:
    pairs: int
    witnessed: int
    vacuous: int
    verdicts: list

    @property
    def rate(self) -> float:
        return self.witnessed / self.pairs if self.pairs else 1.0

    def to_json(self):
        return {"pairs": self.pairs, "witnessed": self.witnessed, "vacuous": self.vacuous,
                "rate": self.rate, "verdicts": [v.to_json() for v in self.verdicts]}


def product_proximal_check(map1: FactorMap, map2: FactorMap, pairs: list, eps: float,
                           horizon: int, resolution: int = 20) -> ProductProximalReport:
    """Proximality of fiber pairs of ``pi1 x pi2`` on the product."""
    prod = ProductSystem(map1.source, map2.source)
    out, hits, vac = [], 0, 0
    for y1, y2 in pairs:
        f1 = map1.fiber(y1, 2, resolution)
        f2 = map2.fiber(y2, 2, resolution)
        a, b = Pair(f1[0], f2[0]), Pair(f1[-1], f2[-1])
        if len(f1) == 1 and len(f2) == 1:
            vac += 1
        v = proximal_test(prod, a, b, eps, horizon)
        hits += v.witnessed
        out.append(v)
    return ProductProximalReport(len(pairs), hits, vac, out)


# ---------------------------------------------------------------------------
# almost automorphy


@dataclass
class AlmostAutomorphicReport:
    passed: bool
    times: list
    forward: list
    backward: list
    target: float

    def to_json(self):
        return {"passed": self.passed, "times": self.times, "forward": self.forward,
                "backward": self.backward, "target": self.target}


def _approach(system, x, target, j, start, horizon):
    """Least n in (start, horizon] with ``d(T^n x, target) < 2**-j``."""
    eps = 2.0 ** -j
    if isinstance(system, Subshift):
        k = ball_radius_depth(eps)
        lo, width = (-(k - 1), 2 * k - 1) if system.two_sided else (0, k)
        block = x.block(lo, lo + horizon + width)
        pat = target.block(lo, lo + width)
        hits = np.flatnonzero((sliding_window_view(block, width) == pat).all(axis=1))
        hits = hits[hits > start]
        return int(hits[0]) if hits.size else None
    if isinstance(system, Rotation):
        hi, lo_ = fx.orbit(x.value, system.alpha, 0, horizon + 1)
        r = fx.round_fraction(eps) - horizon - 1
        inside = fx.in_open_arc(hi, lo_, target.value - r, 2 * r)
        hits = np.flatnonzero(inside)
        hits = hits[hits > start]
        return int(hits[0]) if hits.size else None
    y = system.iterate(x, start + 1)
    for n in range(start + 1, horizon + 1):
        if system.metric(y, target) < eps:
            return n
        y = system.step(y)
    return None


def almost_automorphic_test(system: DynSystem, x, precision: int, horizon: int,
                            x_prime=None) -> AlmostAutomorphicReport:
    """Near returns ``T^n_j x -> x'`` at thresholds ``2**-j`` (j = 3..precision)
    and the backward distances ``d(T^-n_j x', x)``.

    Passes when the deepest backward distance is at most ``2**-(precision // 2)``.
    ``x'`` defaults to x itself.
    """
    if not system.invertible:
        raise DomainError(f"{system.id} is not invertible")
    target = x if x_prime is None else x_prime
    times, fwd, back = [], [], []
    last = 0
    for j in range(3, precision + 1):
        n = _approach(system, x, target, j, last, horizon)
        if n is None:
            break
        times.append(n)
        fwd.append(system.metric(system.iterate(x, n), target))
        back.append(system.metric(system.iterate(target, -n), x))
        last = n
    goal = 2.0 ** -(precision // 2)
    ok = len(times) == precision - 2 and back[-1] <= goal
    return AlmostAutomorphicReport(ok, times, fwd, back, goal)
