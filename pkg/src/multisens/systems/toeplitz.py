"""Regular Toeplitz subshift over its odometer.

Ratios ``q_1, q_2, ...`` (repeated cyclically) give periods
``p_K = q_1 ... q_K``.  An odometer point z is a digit sequence
``z = d_0 + d_1 p_1 + d_2 p_2 + ...``.  Position ``t = z + i`` has level
``1 + (number of trailing maximal digits q_j - 1)``; the symbol there is
``symbols[(level - 1) % len(symbols)]``.  Level-K positions form one residue
class modulo ``p_K``, so the skeleton of period ``p_K`` leaves a single hole
per period, at ``t = -1 mod p_K``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..core import (Ball, Cylinder, DiamProfile, DomainError, DynSystem, EventuallyPeriodic,
                    FactorMap, Hashed, Membership, Prefixed, SymbolRule, Word, dyadic_diam)
from .shift import Subshift, ball_radius_depth

DEPTH_CAP = 240
HOLE = 255
MAX_PERIOD = 512


@dataclass(frozen=True)
class Adic:
    """Odometer point: digits (taken modulo the ratios) plus an integer addend."""

    digits: SymbolRule
    add: int = 0

    def shifted(self, n: int) -> "Adic":
        return Adic(self.digits, self.add + n)

    def describe(self) -> dict:
        return {"tag": "adic", "digits": self.digits.describe(), "add": self.add}


class Ratios:
    def __init__(self, ratios):
        ratios = tuple(int(q) for q in ratios)
        if not ratios or any(q < 2 or q > 254 for q in ratios):
            raise ValueError("ratios must lie in 2..254")
        self.ratios = ratios

    def q(self, j: int) -> int:
        return self.ratios[j % len(self.ratios)]

    def period(self, k: int) -> int:
        p = 1
        for j in range(k):
            p *= self.q(j)
        return p

    def residue(self, z: Adic, k: int) -> int:
        digits = z.digits.block(0, k)
        acc, p = 0, 1
        for j in range(k):
            q = self.q(j)
            acc += (int(digits[j]) % q) * p
            p *= q
        return (acc + z.add) % p

    def digits_of(self, c: int, k: int) -> tuple[int, ...]:
        out = []
        for j in range(k):
            c, d = divmod(c, self.q(j))
            out.append(d)
        return tuple(out)

    def level_for_window(self, span: int) -> int:
        """Least K with ``p_K > 4 * span`` and ``p_K`` a safe int64."""
        k = 1
        while self.period(k) <= 4 * span:
            k += 1
        return k


def parse_periods(periods) -> tuple[int, ...]:
    """``(2, 4, 8)`` -> ratios ``(2, 2, 2)``; each period must divide the next."""
    periods = [int(p) for p in periods]
    if not periods or periods[0] < 2:
        raise ValueError("periods must start at >= 2")
    ratios = [periods[0]]
    for a, b in zip(periods, periods[1:]):
        if b % a or b == a:
            raise ValueError(f"period {a} does not properly divide {b}")
        ratios.append(b // a)
    return tuple(ratios)


def _levels(rat: Ratios, z: Adic, start: int, stop: int) -> np.ndarray:
    """Level minus one of positions ``z + i``; -1 marks a position deeper than the cap."""
    k = rat.level_for_window(max(stop - start, 1))
    while rat.period(k) < 2 ** 40 and rat.period(k + 1) < 2 ** 62:
        k += 1
    p = rat.period(k)
    base = (rat.residue(z, k) + start) % p
    v = (base + np.arange(stop - start, dtype=np.int64)) % p
    count = np.zeros(stop - start, dtype=np.int64)
    alive = np.ones(stop - start, dtype=bool)
    for j in range(k):
        q = rat.q(j)
        alive &= (v % q) == q - 1
        count += alive
        v //= q
    for idx in np.flatnonzero(count == k):
        count[idx] = _deep_level(rat, z, start + int(idx))
    return count


def _deep_level(rat: Ratios, z: Adic, i: int) -> int:
    t = rat.residue(z, DEPTH_CAP) + i
    for j in range(DEPTH_CAP):
        q = rat.q(j)
        t, d = divmod(t, q)
        if d != q - 1:
            return j
    return -1


@dataclass(frozen=True)
class ToeplitzRule(SymbolRule):
    z: Adic
    ratios: tuple[int, ...]
    symbols: tuple[int, ...]
    fill: int | None = None

    def block(self, start, stop):
        lev = _levels(Ratios(self.ratios), self.z, start, stop)
        sym = np.asarray(self.symbols, dtype=np.uint8)
        out = sym[np.maximum(lev, 0) % len(self.symbols)]
        out[lev < 0] = self.symbols[0] if self.fill is None else self.fill
        return out

    def describe(self):
        return {"rule": "toeplitz", "z": self.z.describe(), "ratios": list(self.ratios),
                "symbols": list(self.symbols), "fill": self.fill}


class Odometer(DynSystem):
    """``z -> z + 1`` on the inverse limit of ``Z / p_K``, metric ``2**-K``
    with K the deepest level on which two points agree."""

    invertible = True
    minimal_expected = True
    exact_mode = True
    diameter = 1.0
    max_resolution = 40

    def __init__(self, ratios):
        self.rat = Ratios(ratios)
        self.id = "odometer"

    def zero(self) -> Adic:
        return Adic(EventuallyPeriodic((), (0,), (0,)))

    def random_point(self, seed: int) -> Adic:
        return Adic(Hashed(seed, 255))

    def step(self, x):
        return x.shifted(1)

    def step_inverse(self, x):
        return x.shifted(-1)

    def iterate(self, x, n):
        return x.shifted(n)

    def check_point(self, x):
        if not isinstance(x, Adic):
            raise DomainError("odometer points are Adic values")

    def metric(self, x, y, precision=64):
        p = self.rat.period(precision)
        diff = (self.rat.residue(x, precision) - self.rat.residue(y, precision)) % p
        if diff == 0:
            return 0.0
        k = 0
        while diff % self.rat.period(k + 1) == 0:
            k += 1
        return 2.0 ** -k

    def _cls(self, u) -> Cylinder:
        if isinstance(u, Cylinder):
            return u
        if isinstance(u, Ball):
            k = ball_radius_depth(u.radius)
            return Cylinder(self.rat.digits_of(self.rat.residue(u.center, k), k), 0)
        raise DomainError("odometer open sets are digit cylinders or balls")

    def basis(self, resolution):
        p = self.rat.period(resolution)
        return [Cylinder(self.rat.digits_of(c, resolution), 0) for c in range(p)]

    def refinement_candidates(self, resolution, limit):
        p = self.rat.period(resolution)
        step = max(1, p // max(limit, 1))
        return [Cylinder(self.rat.digits_of(c, resolution), 0) for c in range(0, p, step)[:limit]]

    def contains(self, u, x):
        cyl = self._cls(u)
        k = len(cyl.word)
        return (Membership.INSIDE if self.rat.digits_of(self.rat.residue(x, k), k) == cyl.word
                else Membership.OUTSIDE)

    def diam_profile(self, u, horizon):
        d = np.full(horizon + 1, 2.0 ** -len(self._cls(u).word))
        return DiamProfile(d, d.copy())

    def sample(self, u, count, seed):
        cyl = self._cls(u)
        return [Adic(Prefixed(cyl.word, Hashed(seed * 7919 + j, 255))) for j in range(count)]

    def pullback(self, u, i, k=0, delta=0.0, rng=None):
        cyl = self._cls(u)
        k = len(cyl.word)
        p = self.rat.period(k)
        c = 0
        for j, d in enumerate(cyl.word):
            c += d * self.rat.period(j)
        return Cylinder(self.rat.digits_of((c - i) % p, k), 0)

    def describe(self):
        return {"id": self.id, "ratios": list(self.rat.ratios)}


@lru_cache(maxsize=64)
def _skeleton(ratios: tuple[int, ...], symbols: tuple[int, ...], k: int) -> np.ndarray:
    rat = Ratios(ratios)
    p = rat.period(k)
    v = np.arange(p, dtype=np.int64)
    count = np.zeros(p, dtype=np.int64)
    alive = np.ones(p, dtype=bool)
    for j in range(k):
        q = rat.q(j)
        alive &= (v % q) == q - 1
        count += alive
        v //= q
    s = np.asarray(symbols, dtype=np.uint8)[count % len(symbols)]
    s[p - 1] = HOLE
    return s


class ToeplitzShift(Subshift):
    minimal_expected = True
    max_resolution = 24

    def __init__(self, periods=(2, 4, 8), symbols=(0, 1), sides: str = "one"):
        super().__init__(sides, max(symbols) + 1)
        self.ratios = parse_periods(periods)
        if len(set(symbols)) < 2:
            raise ValueError("need two distinct symbols")
        self.symbols = tuple(int(s) for s in symbols)
        self.rat = Ratios(self.ratios)
        self.id = f"toeplitz_{sides}"

    def point(self, z: Adic | None = None, offset: int = 0, fill: int | None = None) -> Word:
        z = Odometer(self.ratios).zero() if z is None else z
        return Word(ToeplitzRule(z, self.ratios, self.symbols, fill), offset)

    def check_point(self, x):
        super().check_point(x)
        r = x.rule
        if not isinstance(r, ToeplitzRule) or r.ratios != self.ratios or r.symbols != self.symbols:
            raise DomainError("not a point of this Toeplitz subshift")

    def _classes(self, cyl: Cylinder, k: int):
        """Genuine and residual classes mod ``p_K`` for the cylinder."""
        s = _skeleton(self.ratios, self.symbols, k)
        p = len(s)
        a, b = cyl.window
        pos = (np.arange(p)[:, None] + np.arange(a, b + 1)[None, :]) % p
        vals = s[pos]
        word = np.asarray(cyl.word, dtype=np.uint8)
        hole = vals == HOLE
        agree = (vals == word) | hole
        ok = agree.all(axis=1)
        genuine = np.flatnonzero(ok & ~hole.any(axis=1))
        residual = np.flatnonzero(ok & hole.any(axis=1))
        return genuine, residual

    def _rows(self, cyl: Cylinder, k: int):
        """Candidate classes c mod ``p_K`` and, for residual ones, the absolute
        position of their in-window hole together with the symbol U forces there."""
        genuine, residual = self._classes(cyl, k)
        if genuine.size == 0 and residual.size == 0:
            raise DomainError(f"word {cyl.word} is not in the language")
        s = _skeleton(self.ratios, self.symbols, k)
        p = len(s)
        a, _ = cyl.window
        fills = []
        for c in residual:
            i0 = int((p - 1 - c) % p)
            i0 += ((a - i0) // p + (1 if (a - i0) % p else 0)) * p
            fills.append((i0, cyl.word[i0 - a]))
        return s, genuine, residual, fills

    def _explicit_profile(self, cyl: Cylinder, k: int, count: int):
        """lo/hi of ``diam(T^n U)`` for ``n < count`` from the class rows.

        The largest distance over pairs is set by the first column (in
        metric order) where some pair can differ, so each column is checked
        once: two distinct fixed symbols, or a hole.  Holes of genuine classes
        realise every symbol and count for both bounds; a residual class only
        contains points carrying the forced symbol at its in-window hole, and
        its other holes count for the upper bound only.
        """
        s, genuine, residual, fills = self._rows(cyl, k)
        p = len(s)
        classes = np.concatenate([genuine, residual]).astype(np.int64)
        real = np.concatenate([np.ones(genuine.size, bool), np.zeros(residual.size, bool)])
        if self.two_sided:
            js = np.array([0] + [v for t in range(1, p + 1) for v in (-t, t)])
        else:
            js = np.arange(p + 1)
        weight = np.abs(js)
        lo = np.zeros(count)
        hi = np.zeros(count)
        chunk = max(1, 4_000_000 // (classes.size * js.size))
        for n0 in range(0, count, chunk):
            ns = np.arange(n0, min(count, n0 + chunk))
            v = s[(classes[:, None, None] + ns[None, :, None] + js[None, None, :]) % p].astype(np.int16)
            for r, (i0, sym) in enumerate(fills):
                row = v[genuine.size + r]
                row[(ns[:, None] + js[None, :]) == i0] = sym
            hole = v == HOLE
            fixed_lo = np.where(hole, np.int16(HOLE), v).min(axis=0)
            fixed_hi = np.where(hole, np.int16(-1), v).max(axis=0)
            split = (fixed_hi >= 0) & (fixed_lo != fixed_hi)
            lo_col = split | (hole & real[:, None, None]).any(axis=0)
            hi_col = split | hole.any(axis=0)
            for col, out in ((lo_col, lo), (hi_col, hi)):
                found = col.any(axis=1)
                first = weight[col.argmax(axis=1)]
                out[ns] = np.where(found, np.ldexp(1.0, -first), 0.0)
        return lo, hi

    def diam_profile(self, u, horizon):
        cyl = self.as_cylinder(u)
        if not cyl.word:
            d = np.ones(horizon + 1)
            return DiamProfile(d, d.copy())
        a, b = cyl.window
        k = self.rat.level_for_window(b - a + 1)
        if self.rat.period(k) > MAX_PERIOD:
            raise DomainError("cylinder too long for the exact engine")
        n = np.arange(horizon + 1)
        lo = np.zeros(horizon + 1)
        hi = np.ones(horizon + 1)
        # every level gives valid bounds; deeper levels split residual classes
        for level in range(k, k + 4):
            p = self.rat.period(level)
            if p > MAX_PERIOD:
                break
            # past the window (plus a period) the in-window holes are out of
            # reach and the profile is periodic with period p
            settle = max(b, 0) + p + 1
            plo, phi = self._explicit_profile(cyl, level, settle + p)
            idx = np.where(n < settle + p, n, settle + (n - settle) % p)
            lo = np.maximum(lo, plo[idx])
            hi = np.minimum(hi, phi[idx])
            if np.array_equal(lo, hi):
                break
        return DiamProfile(lo, hi)

    def basis(self, resolution):
        off = self.window_offset(resolution)
        k = self.rat.level_for_window(resolution)
        s = _skeleton(self.ratios, self.symbols, k)
        p = len(s)
        words = set()
        for c in range(p):
            for fill in self.symbols:
                w = [fill if s[(c + i) % p] == HOLE else int(s[(c + i) % p])
                     for i in range(off, off + resolution)]
                words.add(tuple(w))
        return [Cylinder(w, off) for w in sorted(words)]

    def sample(self, u, count, seed):
        cyl = self.as_cylinder(u)
        k = self.rat.level_for_window(max(len(cyl.word), 1))
        genuine, _ = self._classes(cyl, k) if cyl.word else (np.arange(self.rat.period(k)), None)
        if genuine.size == 0:
            raise DomainError("cannot sample this cylinder")
        out = []
        for j in range(count):
            c = int(genuine[j % genuine.size])
            z = Adic(Prefixed(self.rat.digits_of(c, k), Hashed(seed * 7919 + j, 255)))
            out.append(self.point(z))
        return out

    def describe(self):
        return {"id": self.id, "ratios": list(self.ratios), "symbols": list(self.symbols),
                "sides": self.sides}


class ToeplitzFactor(FactorMap):
    def __init__(self, source: ToeplitzShift, target: Odometer):
        super().__init__(source, target, "toeplitz_odometer")

    def project(self, x):
        return x.rule.z.shifted(x.offset)

    def fiber(self, y, count, resolution):
        pts = [self.source.point(y, fill=s) for s in dict.fromkeys(self.source.symbols)]
        out = [pts[0]]
        for q in pts[1:]:
            if all(self.source.metric(q, r, resolution) > 0 for r in out):
                out.append(q)
        return out


def make_toeplitz_odometer_pair(periods=(2, 4, 8), symbols=(0, 1), sides: str = "one"):
    t = ToeplitzShift(periods, symbols, sides)
    o = Odometer(t.ratios)
    return t, o, ToeplitzFactor(t, o)
