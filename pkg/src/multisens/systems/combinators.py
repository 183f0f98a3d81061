"""Products, natural extensions, collapse quotients and the one-point
compactification of N."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..core import (Ball, Collapsed, DiamProfile, DomainError, DynSystem, FactorMap, Membership,
                    Nat, Pair, Product, QuotientImage, Tower, sampled_profile, spread)


def _both(a: Membership, b: Membership) -> Membership:
    if a is Membership.OUTSIDE or b is Membership.OUTSIDE:
        return Membership.OUTSIDE
    if a is Membership.INSIDE and b is Membership.INSIDE:
        return Membership.INSIDE
    return Membership.UNCERTAIN


class ProductSystem(DynSystem):
    """``(x, y) -> (Tx, Sy)`` with the max metric."""

    def __init__(self, a: DynSystem, b: DynSystem):
        self.a, self.b = a, b
        self.id = f"({a.id})x({b.id})"
        self.invertible = a.invertible and b.invertible
        self.minimal_expected = False
        self.exact_mode = a.exact_mode and b.exact_mode
        self.diameter = max(a.diameter, b.diameter)
        self.max_resolution = min(a.max_resolution, b.max_resolution)

    def step(self, x):
        return Pair(self.a.step(x.first), self.b.step(x.second))

    def step_inverse(self, x):
        return Pair(self.a.step_inverse(x.first), self.b.step_inverse(x.second))

    def iterate(self, x, n):
        if n < 0 and not self.invertible:
            raise DomainError(f"negative iterate on non-invertible {self.id}")
        return Pair(self.a.iterate(x.first, n), self.b.iterate(x.second, n))

    def preimage(self, x):
        return Pair(self.a.preimage(x.first), self.b.preimage(x.second))

    def check_point(self, x):
        if not isinstance(x, Pair):
            raise DomainError(f"{self.id} expects pairs")
        self.a.check_point(x.first)
        self.b.check_point(x.second)

    def metric(self, x, y, precision=64):
        return max(self.a.metric(x.first, y.first, precision),
                   self.b.metric(x.second, y.second, precision))

    def _parts(self, u):
        if isinstance(u, Product) and len(u.parts) == 2:
            return u.parts
        if isinstance(u, Ball) and isinstance(u.center, Pair):
            # balls for the max metric are products of balls
            return Ball(u.center.first, u.radius), Ball(u.center.second, u.radius)
        raise DomainError(f"{self.id} open sets are products of two sets")

    def basis(self, resolution):
        return [Product((ua, ub)) for ua in self.a.basis(resolution)
                for ub in self.b.basis(resolution)]

    def refinement_candidates(self, resolution, limit):
        side = max(1, int(limit ** 0.5))
        return [Product((ua, ub)) for ua in self.a.refinement_candidates(resolution, side)
                for ub in self.b.refinement_candidates(resolution, side)][:limit]

    def contains(self, u, x):
        ua, ub = self._parts(u)
        return _both(self.a.contains(ua, x.first), self.b.contains(ub, x.second))

    def orbit_membership(self, x, u, horizon):
        ua, ub = self._parts(u)
        ia, ca = self.a.orbit_membership(x.first, ua, horizon)
        ib, cb = self.b.orbit_membership(x.second, ub, horizon)
        out = (~ia & ~ca) | (~ib & ~cb)
        inside = ia & ib
        return inside, ~inside & ~out

    def diam_profile(self, u, horizon):
        ua, ub = self._parts(u)
        pa = self.a.diam_profile(ua, horizon)
        pb = self.b.diam_profile(ub, horizon)
        return DiamProfile(np.maximum(pa.lo, pb.lo), np.maximum(pa.hi, pb.hi))

    def sample(self, u, count, seed):
        ua, ub = self._parts(u)
        xa = self.a.sample(ua, count, seed)
        xb = self.b.sample(ub, count, seed + 1)
        return [Pair(p, q) for p, q in zip(xa, xb)]

    def pullback(self, u, i, k=0, delta=0.0, rng=None):
        ua, ub = self._parts(u)
        return Product((self.a.pullback(ua, i, k, delta, rng), self.b.pullback(ub, i, k, delta, rng)))

    def describe(self):
        return {"id": self.id, "factors": [self.a.describe(), self.b.describe()]}


class Projection(FactorMap):
    """First-coordinate projection of a product onto its first factor."""

    def __init__(self, product: ProductSystem, seed: int = 0):
        super().__init__(product, product.a, "projection")
        self.seed = seed

    def project(self, x):
        return x.first

    def fiber(self, y, count, resolution):
        whole = self.source.b.basis(1)
        pts = []
        for j, u in enumerate(whole):
            pts += self.source.b.sample(u, max(1, count // len(whole)), self.seed + j)
        return [Pair(y, q) for q in pts]


class NaturalExtension(DynSystem):
    """Inverse limit ``{(x_1, x_2, ...) : T x_(i+1) = x_i}`` truncated at depth K.

    ``d = sum_n rho(x_n, y_n) / (2**n M)``, ``M = diam(X) + 1``; the neglected
    tail is below ``2**-K``.  Missing levels come from the base system's
    ``preimage`` rule.
    """

    invertible = True

    def __init__(self, base: DynSystem, depth: int = 32):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        if not hasattr(base, "preimage"):
            raise DomainError(f"{base.id} has no preimage rule")
        self.base = base
        self.depth = depth
        self.M = base.diameter + 1.0
        self.id = f"natext({base.id})"
        self.minimal_expected = base.minimal_expected
        self.diameter = base.diameter / self.M
        self.max_resolution = base.max_resolution

    def lift(self, x) -> Tower:
        levels = [x]
        for _ in range(self.depth - 1):
            levels.append(self.base.preimage(levels[-1]))
        return Tower(tuple(levels))

    def step(self, x):
        return Tower((self.base.step(x.levels[0]),) + x.levels[:-1])

    def step_inverse(self, x):
        return Tower(x.levels[1:] + (self.base.preimage(x.levels[-1]),))

    def check_point(self, x):
        if not isinstance(x, Tower) or x.depth != self.depth:
            raise DomainError(f"{self.id} expects towers of depth {self.depth}")

    def metric(self, x, y, precision=64):
        return sum(self.base.metric(a, b, precision) / (2.0 ** n * self.M)
                   for n, (a, b) in enumerate(zip(x.levels, y.levels), start=1))

    def basis(self, resolution):
        out = []
        for j, u in enumerate(spread(self.base.basis(resolution), 256)):
            centre = self.base.sample(u, 1, j)[0]
            out.append(Ball(self.lift(centre), 2.0 ** -resolution))
        return out

    def contains(self, u, x):
        if not isinstance(u, Ball):
            raise DomainError(f"{self.id} open sets are balls")
        d = self.metric(u.center, x)
        slack = 2.0 ** -self.depth
        if d + slack < u.radius:
            return Membership.INSIDE
        if d - slack >= u.radius:
            return Membership.OUTSIDE
        return Membership.UNCERTAIN

    def sample(self, u, count, seed):
        if not isinstance(u, Ball):
            raise DomainError(f"{self.id} open sets are balls")
        top = u.center.levels[0]
        cand = self.base.sample(Ball(top, u.radius * self.M), 4 * count, seed)
        pts = [u.center]
        for y in cand:
            t = self.lift(y)
            if self.metric(u.center, t) < u.radius:
                pts.append(t)
            if len(pts) >= count:
                break
        return pts

    def describe(self):
        return {"id": self.id, "base": self.base.describe(), "depth": self.depth, "M": self.M}


class NatCompactification(DynSystem):
    """``N u {inf}`` with ``d(m, n) = |1/m - 1/n|`` and the identity map."""

    invertible = True
    minimal_expected = False
    exact_mode = True
    diameter = 1.0
    max_resolution = 30
    id = "nat_compactification"

    def step(self, x):
        return x

    def step_inverse(self, x):
        return x

    def iterate(self, x, n):
        return x

    def preimage(self, x):
        return x

    @staticmethod
    def inv(x: Nat) -> Fraction:
        return Fraction(0) if x.value is None else Fraction(1, x.value)

    def check_point(self, x):
        if not isinstance(x, Nat):
            raise DomainError("expected a Nat point")

    def metric(self, x, y, precision=64):
        return float(abs(self.inv(x) - self.inv(y)))

    @staticmethod
    def isolating_radius(p: int) -> float:
        """Radius whose ball around p is exactly ``{p}``."""
        return 1.0 / (2 * p * (p + 1))

    def basis(self, resolution):
        top = 2 ** resolution
        return ([Ball(Nat(p), self.isolating_radius(p)) for p in range(1, top + 1)]
                + [Ball(Nat(None), 2.0 ** -resolution)])

    def contains(self, u, x):
        return (Membership.INSIDE if abs(self.inv(u.center) - self.inv(x)) < Fraction(u.radius)
                else Membership.OUTSIDE)

    def members_range(self, u) -> tuple[Fraction, Fraction]:
        """Infimum and supremum of ``1/n`` over the ball (``1/inf = 0``)."""
        c, r = self.inv(u.center), Fraction(u.radius)
        top, bottom = c + r, c - r
        n_min = 1 if top > 1 else math.floor(1 / top) + 1
        if bottom <= 0:
            return Fraction(0), Fraction(1, n_min)
        n_max = math.ceil(1 / bottom) - 1
        return Fraction(1, n_max), Fraction(1, n_min)

    def diam_profile(self, u, horizon):
        inf, sup = self.members_range(u)
        d = np.full(horizon + 1, float(max(sup - inf, 0)))
        return DiamProfile(d, d.copy())

    def sample(self, u, count, seed):
        inf, sup = self.members_range(u)
        first = int(1 / sup)
        last = None if inf == 0 else int(1 / inf)
        vals = [Nat(n) for n in range(first, first + count) if last is None or n <= last]
        if self.contains(u, Nat(None)) is Membership.INSIDE:
            vals[-1:] = [Nat(None)]
        return vals


class ClosedSet:
    """Closed set to collapse: membership, distance and invariance."""

    def member(self, x) -> bool:
        raise NotImplementedError

    def dist(self, x) -> float:
        raise NotImplementedError

    def witnesses(self) -> list:
        """Sample points of the set, used to check invariance."""
        return []

    def describe(self) -> dict:
        return {"set": type(self).__name__}


class PointSet(ClosedSet):
    def __init__(self, system: DynSystem, point):
        self.system, self.point = system, point

    def member(self, x):
        return self.system.metric(x, self.point) == 0

    def dist(self, x):
        return self.system.metric(x, self.point)

    def witnesses(self):
        return [self.point]


class CollapseQuotient(DynSystem):
    """``X / C`` with ``d'(a, b) = min(d(a, b), d(a, C) + d(C, b))``; the class
    of C is the fixed point ``Collapsed()``.

    Open sets are ``QuotientImage(U)`` for base sets U missing C, or metric
    balls of the quotient.
    """

    def __init__(self, base: DynSystem, collapsed: ClosedSet, check_invariance: bool = True):
        self.base, self.C = base, collapsed
        self.id = f"quotient({base.id})"
        self.invertible = base.invertible
        self.minimal_expected = False
        self.diameter = base.diameter
        self.max_resolution = base.max_resolution
        if check_invariance:
            for w in collapsed.witnesses():
                if not collapsed.member(base.step(w)):
                    raise DomainError("collapsed set is not forward invariant")

    def point(self, x):
        return Collapsed() if isinstance(x, Collapsed) or self.C.member(x) else x

    def step(self, x):
        return x if isinstance(x, Collapsed) else self.point(self.base.step(x))

    def step_inverse(self, x):
        return x if isinstance(x, Collapsed) else self.point(self.base.step_inverse(x))

    def preimage(self, x):
        return self.step_inverse(x)

    def check_point(self, x):
        if not isinstance(x, Collapsed):
            self.base.check_point(x)

    def metric(self, x, y, precision=64):
        cx, cy = isinstance(x, Collapsed), isinstance(y, Collapsed)
        if cx and cy:
            return 0.0
        if cx:
            return self.C.dist(y)
        if cy:
            return self.C.dist(x)
        return min(self.base.metric(x, y, precision), self.C.dist(x) + self.C.dist(y))

    def basis(self, resolution):
        return [QuotientImage(u) for u in self.base.basis(resolution)]

    def contains(self, u, x):
        if isinstance(u, QuotientImage):
            if isinstance(x, Collapsed):
                return Membership.OUTSIDE
            return self.base.contains(u.inner, x)
        if isinstance(u, Ball):
            return Membership.INSIDE if self.metric(u.center, x) < u.radius else Membership.OUTSIDE
        raise DomainError(f"{self.id} cannot interpret {type(u).__name__}")

    def sample(self, u, count, seed):
        if isinstance(u, QuotientImage):
            return [p for p in self.base.sample(u.inner, count, seed) if not self.C.member(p)]
        if isinstance(u, Ball) and not isinstance(u.center, Collapsed):
            pts = self.base.sample(Ball(u.center, u.radius), count, seed)
            return [self.point(p) for p in pts if self.metric(u.center, self.point(p)) < u.radius]
        raise DomainError(f"{self.id} cannot sample {u!r}")

    def diam_profile(self, u, horizon):
        return sampled_profile(self, u, horizon)

    def describe(self):
        return {"id": self.id, "base": self.base.describe(), "collapsed": self.C.describe()}


def make_product(a: DynSystem, b: DynSystem) -> ProductSystem:
    return ProductSystem(a, b)


def make_natural_extension(a: DynSystem, depth: int = 32) -> NaturalExtension:
    return NaturalExtension(a, depth)


def make_collapse_quotient(a: DynSystem, c: ClosedSet) -> CollapseQuotient:
    return CollapseQuotient(a, c)
