"""Two-sided full shift times the compactified naturals (identity map), with
``C = (Y1 x {inf}) u ({0^inf} x Y2)`` collapsed to a fixed point e.

Distance to C is ``d((u, p), C) = min(1/p, rho(u, 0^inf))``, and two points on
the same level p are at distance ``min(rho(u, v), d(a, C) + d(b, C))``.  Each
level ``Y1 x {p}`` is invariant with diameter ``min(1, 2/p)``.

A *level cylinder* is ``[w]_o x {p}`` with the point of C removed; these are
open and give the basis, together with small balls around e.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..core import (Ball, Collapsed, Cylinder, DiamProfile, DomainError, Membership, Nat, Pair,
                    Product, QuotientImage, Word, periodic)
from .combinators import ClosedSet, CollapseQuotient, NatCompactification, ProductSystem
from .shift import FullShift, ball_radius_depth, first_difference

ZERO = Word(periodic((0,)))
PRECISION = 64


class RefereeCollapse(ClosedSet):
    """``(Y1 x {inf}) u ({0^inf} x Y2)``."""

    def __init__(self, precision: int = PRECISION):
        self.precision = precision

    def _zero_depth(self, u: Word) -> int | None:
        return first_difference(u, ZERO, self.precision, True)

    def member(self, x):
        return x.second.value is None or self._zero_depth(x.first) is None

    def dist(self, x):
        p = x.second.value
        k = self._zero_depth(x.first)
        du = 0.0 if k is None else 2.0 ** -k
        return du if p is None else min(1.0 / p, du)

    def witnesses(self):
        return [Pair(ZERO, Nat(3)), Pair(Word(periodic((1, 0))), Nat(None))]

    def describe(self):
        return {"set": "Y1 x {inf} u {0^inf} x Y2"}


def level_set(p: int, word=(), offset: int = 0) -> QuotientImage:
    """``[word]_offset x {p}``; with an empty word, the whole level."""
    nat = NatCompactification.isolating_radius(p)
    return QuotientImage(Product((Cylinder(tuple(word), offset), Ball(Nat(p), nat))))


def _level_diam(word: tuple[int, ...], a: int, p: int) -> float:
    """Diameter of ``[word]_a x {p}`` under the quotient metric."""
    b = a + len(word) - 1
    fixed = {a + j: s for j, s in enumerate(word)}
    free = lambda i: i not in fixed
    can1 = lambda i: free(i) or fixed[i] == 1
    if not word or a > 0 or b < 0:
        k = 0
    else:
        k = min(1 - a, b + 1)
    ones = [abs(i) for i, s in fixed.items() if s == 1]
    m0 = min(ones) if ones else None
    cap = Fraction(1, p)

    def c(t):
        return min(cap, Fraction(1, 2 ** t))

    def best_sum(t):
        low = k if m0 is None else min(m0, k)
        if low < t:
            return 2 * c(low)
        pos = {k, -k}
        if len(pos) == 2 and all(can1(i) for i in pos) and any(free(i) for i in pos):
            return 2 * c(k)
        z2 = k + 1
        while not (can1(z2) or can1(-z2)):
            z2 += 1
        return c(k) + c(z2)

    d = max(min(Fraction(1, 2 ** k), best_sum(k)), min(Fraction(1, 2 ** (k + 1)), best_sum(k + 1)))
    return float(d)


class RefereeExample(CollapseQuotient):
    """Sensitive system in which no time set ``S(U, delta)`` need be thick and
    no point is a syndetic equicontinuity point."""

    def __init__(self):
        self.shift = FullShift("two")
        self.nat = NatCompactification()
        super().__init__(ProductSystem(self.shift, self.nat), RefereeCollapse())
        self.id = "referee_example"
        self.invertible = True
        self.minimal_expected = False
        self.exact_mode = True
        self.diameter = 1.0
        self.max_resolution = 24

    def point(self, u: Word | None = None, p: int | None = None):
        if u is None:
            return Collapsed()
        return super().point(Pair(u, Nat(p)))

    def check_point(self, x):
        if isinstance(x, Collapsed):
            return
        if not isinstance(x, Pair) or not isinstance(x.second, Nat):
            raise DomainError("referee points are (word, level) pairs or e")
        self.shift.check_point(x.first)

    def iterate(self, x, n):
        if isinstance(x, Collapsed):
            return x
        return self.point(x.first.shifted(n), x.second.value)

    def level_gap(self, p: int) -> float:
        return 1.0 / (p * (p + 1))

    # -- open sets -------------------------------------------------------------
    def as_level(self, u) -> tuple[int, tuple[int, ...], int] | None:
        """(p, word, offset) for a level cylinder, None for a ball around e."""
        if isinstance(u, QuotientImage) and isinstance(u.inner, Product):
            cyl, nb = u.inner.parts
            if not isinstance(cyl, Cylinder) or nb.center.value is None:
                raise DomainError("level cylinders need a finite level")
            if nb.radius > self.nat.isolating_radius(nb.center.value):
                raise DomainError("level ball must isolate its level")
            return nb.center.value, cyl.word, cyl.offset
        if isinstance(u, Ball):
            x = u.center
            if isinstance(x, Collapsed):
                return None
            p = x.second.value
            m = self.C.dist(x)
            if u.radius <= min(m, self.level_gap(p)):
                k = ball_radius_depth(u.radius)
                word = tuple(x.first.block(-(k - 1), k).tolist()) if k else ()
                return p, word, -(k - 1) if k else 0
            raise DomainError("ball is not a level cylinder")
        raise DomainError(f"{self.id} cannot interpret {type(u).__name__}")

    def inscribed_level(self, u: Ball):
        """Largest dyadic level cylinder inside a ball around a non-collapsed point."""
        x = u.center
        r = min(u.radius, self.C.dist(x), self.level_gap(x.second.value))
        r = 2.0 ** -ball_radius_depth(r) if r < 1 else r
        return self.as_level(Ball(x, r))

    def basis(self, resolution):
        k = resolution
        off = -((k - 1) // 2)
        out = []
        for p in range(1, 2 ** resolution + 1):
            out += [level_set(p, c.word, off) for c in self.shift.basis(k)]
        out.append(Ball(Collapsed(), 2.0 ** -resolution))
        return out

    def refinement_candidates(self, resolution, limit):
        p = 2 ** resolution
        words = self.shift.refinement_candidates(resolution, limit)
        return [level_set(p, c.word, c.offset) for c in words]

    def contains(self, u, x):
        if isinstance(u, Ball):
            return super().contains(u, x)
        p, w, o = self.as_level(u)
        if isinstance(x, Collapsed) or x.second.value != p:
            return Membership.OUTSIDE
        ok = tuple(x.first.block(o, o + len(w)).tolist()) == tuple(w)
        return Membership.INSIDE if ok and not self.C.member(x) else Membership.OUTSIDE

    def orbit_membership(self, x, u, horizon):
        if isinstance(u, Ball):
            return _scan(self, x, u, horizon)
        p, w, o = self.as_level(u)
        if isinstance(x, Collapsed) or x.second.value != p:
            return np.zeros(horizon + 1, bool), np.zeros(horizon + 1, bool)
        return self.shift.orbit_membership(x.first, Cylinder(w, o), horizon)

    def diam_profile(self, u, horizon):
        if isinstance(u, Ball) and isinstance(u.center, Collapsed):
            # contains every level p with 1/p < r, plus e
            p0 = int(1 / u.radius) + 1
            lo = np.full(horizon + 1, min(1.0, 2.0 / p0))
            return DiamProfile(lo, np.ones(horizon + 1))
        if isinstance(u, Ball):
            try:
                lev = self.as_level(u)
                exact = True
            except DomainError:
                lev = self.inscribed_level(u)
                exact = False
        else:
            lev, exact = self.as_level(u), True
        p, w, o = lev
        # once the window has moved left of 0 the value no longer changes
        d = np.full(horizon + 1, _level_diam((), 0, p))
        for n in range(min(horizon, o + len(w) - 1) + 1):
            d[n] = _level_diam(w, o - n, p)
        return DiamProfile(d, d.copy() if exact else np.ones(horizon + 1))

    def sample(self, u, count, seed):
        if isinstance(u, Ball) and isinstance(u.center, Collapsed):
            p0 = int(1 / u.radius) + 1
            return [Collapsed()] + [Pair(w, Nat(p0 + j)) for j, w in
                                    enumerate(self.shift.sample(Cylinder(()), count - 1, seed))]
        if isinstance(u, Ball):
            u = level_set(*self.inscribed_level(u))
        p, w, o = self.as_level(u)
        pts = self.shift.sample(Cylinder(w, o), count, seed)
        return [Pair(x, Nat(p)) for x in pts if not self.C.member(Pair(x, Nat(p)))]

    def pullback(self, u, i, k=0, delta=0.0, rng=None):
        p, w, o = self.as_level(u)
        return level_set(p, w, o + i)

    def describe(self):
        return {"id": self.id, "base": "full_shift_two x (N u {inf})",
                "collapsed": self.C.describe(), "metric": "min(d(a,b), d(a,C) + d(C,b))"}


def _scan(system, x, u, horizon):
    inside = np.zeros(horizon + 1, bool)
    y = x
    for n in range(horizon + 1):
        inside[n] = system.contains(u, y) is Membership.INSIDE
        y = system.step(y)
    return inside, np.zeros(horizon + 1, bool)


def make_referee_example() -> RefereeExample:
    return RefereeExample()
