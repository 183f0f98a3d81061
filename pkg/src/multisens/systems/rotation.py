"""Irrational rotation of the circle R/Z on 128-bit fixed-point angles."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .. import fixedpoint as fx
from ..core import Angle, Ball, DiamProfile, DomainError, DynSystem, Membership


def _fixed(radius: float) -> int:
    return fx.round_fraction(Fraction(radius))


class Rotation(DynSystem):
    """``x -> x + alpha`` with the arc-length metric (diameter 1/2)."""

    invertible = True
    minimal_expected = True
    exact_mode = True
    diameter = 0.5
    max_resolution = 60

    def __init__(self, alpha="golden"):
        self.alpha = fx.parse_alpha(alpha)
        self.alpha_name = alpha
        self.id = f"rotation[{alpha if isinstance(alpha, str) else 'cf'}]"

    def point(self, value) -> Angle:
        return Angle.of(value)

    def step(self, x):
        return Angle(x.value + self.alpha, x.err + 1)

    def step_inverse(self, x):
        return Angle(x.value - self.alpha, x.err + 1)

    def iterate(self, x, n):
        return Angle(x.value + n * self.alpha, x.err + abs(n))

    def check_point(self, x):
        if not isinstance(x, Angle):
            raise DomainError(f"{self.id} expects circle angles, got {type(x).__name__}")

    def metric(self, x, y, precision=64):
        return float(Fraction(fx.circ_dist(x.value, y.value), fx.ONE))

    def _ball(self, u) -> Ball:
        if not isinstance(u, Ball) or not isinstance(u.center, Angle):
            raise DomainError(f"{self.id} open sets are arcs (balls)")
        if u.radius <= 0:
            raise DomainError("radius must be positive")
        return u

    def basis(self, resolution):
        r = 2.0 ** -resolution
        shift = fx.BITS - resolution
        return [Ball(Angle(j << shift), r) for j in range(1 << resolution)]

    def refinement_candidates(self, resolution, limit):
        count = min(limit, 1 << resolution)
        stride = (1 << resolution) // count
        shift = fx.BITS - resolution
        return [Ball(Angle((j * stride) << shift), 2.0 ** -resolution) for j in range(count)]

    def contains(self, u, x):
        u = self._ball(u)
        d = fx.circ_dist(u.center.value, x.value)
        r = _fixed(u.radius)
        slack = u.center.err + x.err
        if d + slack < r:
            return Membership.INSIDE
        if d - slack >= r:
            return Membership.OUTSIDE
        return Membership.UNCERTAIN

    def orbit_membership(self, x, u, horizon):
        u = self._ball(u)
        r = min(_fixed(u.radius), fx.HALF)
        hi, lo = fx.orbit(x.value, self.alpha, 0, horizon + 1)
        slack = x.err + u.center.err + horizon + 1
        start = u.center.value - r
        if r >= fx.HALF:
            # the open ball of radius >= 1/2 is the circle minus the antipode
            sure = ~fx.in_arc(hi, lo, u.center.value + fx.HALF - slack, 2 * slack + 1)
            return sure, ~sure
        sure = fx.in_open_arc(hi, lo, start + slack, 2 * r - 2 * slack)
        maybe = fx.in_open_arc(hi, lo, start - slack, 2 * r + 2 * slack)
        return sure, maybe & ~sure

    def diam_profile(self, u, horizon):
        u = self._ball(u)
        d = np.full(horizon + 1, min(2 * u.radius, 0.5))
        return DiamProfile(d, d.copy())

    def sample(self, u, count, seed):
        u = self._ball(u)
        r = min(_fixed(u.radius), fx.HALF)
        rng = np.random.default_rng(seed)
        fr = rng.random(count) * 1.8 - 0.9
        return [Angle(u.center.value + int(f * r)) for f in fr]

    def pullback(self, u, i, k=0, delta=0.0, rng=None):
        u = self._ball(u)
        return Ball(Angle(u.center.value - i * self.alpha, u.center.err + abs(i)), u.radius)

    def preimage(self, x):
        return self.step_inverse(x)

    def describe(self):
        return {"id": self.id, "alpha": self.alpha_name, "alpha_fixed": str(self.alpha)}
