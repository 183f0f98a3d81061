"""Shift spaces over a finite alphabet and the full shift.

Metric: one-sided ``2**-min{i >= 0 : x_i != y_i}``, two-sided
``2**-min{|i| : x_i != y_i}``.  Cylinders ``[w]`` at offset ``o`` fix
coordinates ``o .. o+len(w)-1``.
"""

from __future__ import annotations

from itertools import product

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..core import (Ball, Champernowne, Cylinder, DiamProfile, DomainError, DynSystem,
                    EventuallyPeriodic, Hashed, Membership, Patched, Prefixed, Word,
                    dyadic_diam)


def first_difference(x: Word, y: Word, limit: int, two_sided: bool) -> int | None:
    """Smallest |i| (or i >= 0) with x_i != y_i, searched up to ``limit``."""
    if two_sided:
        a, b = x.block(-limit, limit + 1), y.block(-limit, limit + 1)
        idx = np.flatnonzero(a != b)
        return None if idx.size == 0 else int(np.abs(idx - limit).min())
    idx = np.flatnonzero(x.block(0, limit + 1) != y.block(0, limit + 1))
    return None if idx.size == 0 else int(idx[0])


def ball_radius_depth(radius: float) -> int:
    """Least K with ``2**-K < radius``: the ball is the set agreeing below depth K."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    k = 0
    while 2.0 ** -k >= radius:
        k += 1
    return k


class Subshift(DynSystem):
    """Common machinery for shift-invariant sets of symbolic words."""

    exact_mode = True
    diameter = 1.0
    max_resolution = 20

    def __init__(self, sides: str = "one", alphabet: int = 2):
        if sides not in ("one", "two"):
            raise ValueError("sides must be 'one' or 'two'")
        if alphabet < 2:
            raise ValueError("alphabet needs at least two symbols")
        self.sides = sides
        self.alphabet = alphabet
        self.invertible = sides == "two"

    @property
    def two_sided(self) -> bool:
        return self.sides == "two"

    # -- map ---------------------------------------------------------------
    def step(self, x):
        return x.shifted(1)

    def step_inverse(self, x):
        if not self.two_sided:
            raise DomainError(f"{self.id} is one-sided")
        return x.shifted(-1)

    def iterate(self, x, n):
        if n < 0 and not self.two_sided:
            raise DomainError(f"negative iterate on non-invertible {self.id}")
        return x.shifted(n)

    # -- geometry -------------------------------------------------------------
    def check_point(self, x):
        if not isinstance(x, Word):
            raise DomainError(f"{self.id} expects symbolic words, got {type(x).__name__}")
        if int(x.block(-4 if self.two_sided else 0, 8).max()) >= self.alphabet:
            raise DomainError("symbol outside alphabet")

    def metric(self, x, y, precision=64):
        k = first_difference(x, y, precision, self.two_sided)
        return 0.0 if k is None else 2.0 ** -k

    def window_offset(self, length: int) -> int:
        return -((length - 1) // 2) if self.two_sided else 0

    def as_cylinder(self, u) -> Cylinder:
        if isinstance(u, Cylinder):
            if not self.two_sided and u.offset < 0 and u.word:
                raise DomainError("one-sided cylinders need offset >= 0")
            if any(s >= self.alphabet for s in u.word):
                raise DomainError("symbol outside alphabet")
            return u
        if isinstance(u, Ball):
            self.check_point(u.center)
            k = ball_radius_depth(u.radius)
            if k == 0:
                return Cylinder((), 0)
            if self.two_sided:
                return Cylinder(tuple(u.center.block(-(k - 1), k).tolist()), -(k - 1))
            return Cylinder(tuple(u.center.block(0, k).tolist()), 0)
        raise DomainError(f"{self.id} cannot interpret {type(u).__name__}")

    def contains(self, u, x):
        cyl = self.as_cylinder(u)
        if not cyl.word:
            return Membership.INSIDE
        got = x.block(cyl.offset, cyl.offset + len(cyl.word))
        return Membership.INSIDE if tuple(got.tolist()) == cyl.word else Membership.OUTSIDE

    def orbit_membership(self, x, u, horizon):
        cyl = self.as_cylinder(u)
        if not cyl.word:
            return np.ones(horizon + 1, bool), np.zeros(horizon + 1, bool)
        length = len(cyl.word)
        block = x.block(cyl.offset, cyl.offset + horizon + length)
        windows = sliding_window_view(block, length)
        inside = (windows == np.asarray(cyl.word, dtype=np.uint8)).all(axis=1)
        return inside, np.zeros(horizon + 1, bool)

    def pullback(self, u, i, k=0, delta=0.0, rng=None):
        """``T^-i [w]_o`` is ``[w]_(o+i)``."""
        cyl = self.as_cylinder(u)
        return Cylinder(cyl.word, cyl.offset + i)

    def preimage(self, x):
        """A point y with ``T y = x``: the rule's own coordinate at -1."""
        return x.shifted(-1)

    def describe(self):
        return {"id": self.id, "sides": self.sides, "alphabet": self.alphabet}


class FullShift(Subshift):
    """All sequences over ``{0, .., alphabet-1}``."""

    def __init__(self, sides: str = "one", alphabet: int = 2):
        super().__init__(sides, alphabet)
        self.id = f"full_shift_{sides}"
        self.minimal_expected = False

    def _words(self, length: int, indices) -> list[tuple[int, ...]]:
        out = []
        for j in indices:
            digits = []
            for _ in range(length):
                j, r = divmod(j, self.alphabet)
                digits.append(r)
            out.append(tuple(reversed(digits)))
        return out

    def basis(self, resolution):
        off = self.window_offset(resolution)
        return [Cylinder(w, off) for w in product(range(self.alphabet), repeat=resolution)]

    def refinement_candidates(self, resolution, limit):
        total = self.alphabet ** resolution
        step = max(1, total // max(limit, 1))
        off = self.window_offset(resolution)
        return [Cylinder(w, off) for w in self._words(resolution, range(0, total, step)[:limit])]

    def diam_profile(self, u, horizon):
        cyl = self.as_cylinder(u)
        n = np.arange(horizon + 1)
        if not cyl.word:
            d = np.ones(horizon + 1)
            return DiamProfile(d, d.copy())
        a, b = cyl.window
        if self.two_sided:
            lo, hi = a - n, b - n
            covers0 = (lo <= 0) & (hi >= 0)
            d = np.where(covers0, dyadic_diam(np.minimum(1 - lo, hi + 1)), 1.0)
        else:
            free0 = (a - n > 0) | (b - n < 0)
            d = np.where(free0, 1.0, dyadic_diam(np.maximum(b - n + 1, 0)))
        return DiamProfile(d, d.copy())

    def preimage(self, x):
        """Lexicographically least preimage: prepend the symbol 0."""
        if self.two_sided:
            return x.shifted(-1)
        return Word(Prefixed((0,), x.rule, x.offset))

    def sample(self, u, count, seed):
        cyl = self.as_cylinder(u)
        patch = ((cyl.offset, cyl.word),) if cyl.word else ()
        return [Word(Patched(Hashed(seed * 1_000_003 + j, self.alphabet), patch))
                for j in range(count)]


def transitive_word(seed: int | None = None, prefix=(), alphabet: int = 2) -> Word:
    """Optional ``prefix`` then every finite word in turn: a point with a dense orbit.

    Negative coordinates (two-sided use) are pseudo-random when a seed is
    given and zero otherwise.
    """
    left = EventuallyPeriodic() if seed is None else Hashed(seed, alphabet)
    rule = Champernowne(alphabet, left)
    if prefix:
        rule = Prefixed(tuple(prefix), rule)
    return Word(rule)
