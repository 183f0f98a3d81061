"""Sturmian subshift of slope alpha, viewed as a coding of the rotation.

A cylinder ``[w]`` at offset ``o`` corresponds to an arc ``I_w`` of
intercepts, cut out by the points ``-j alpha`` for ``j = o .. o+|w|``.
Shifting by n moves the arc by ``n alpha``.  Two codings first differ at
index j exactly when a cut ``-j alpha`` or ``-(j+1) alpha`` separates their
intercepts, so ``diam(T^n [w]) = 2**-k`` where k is the smallest such index
over cuts strictly inside ``I_w + n alpha``.
"""

from __future__ import annotations

import numpy as np

from .. import fixedpoint as fx
from ..core import (Angle, Cylinder, DiamProfile, DomainError, FactorMap, Sturmian, Word,
                    dyadic_diam)
from .rotation import Rotation
from .shift import Subshift

CUT_DEPTH = 64


def _cuts(alpha: int, lo: int, hi: int) -> list[int]:
    return sorted({(-j * alpha) & fx.MASK for j in range(lo, hi + 1)})


class SturmianShift(Subshift):
    minimal_expected = True
    max_resolution = 4000

    def __init__(self, alpha="golden", intercept=0, sides: str = "two"):
        super().__init__(sides, 2)
        self.alpha_name = alpha
        self.alpha = fx.parse_alpha(alpha)
        self.intercept = fx.round_fraction(intercept)
        self.id = f"sturmian_{sides}"

    def point(self, theta=None, upper: bool = False, offset: int = 0) -> Word:
        t = self.intercept if theta is None else theta
        if not isinstance(t, int):
            t = fx.round_fraction(t)
        return Word(Sturmian(self.alpha, t & fx.MASK, upper), offset)

    def check_point(self, x):
        super().check_point(x)
        if not isinstance(x.rule, Sturmian) or x.rule.alpha != self.alpha:
            raise DomainError("not a coding of this rotation")

    # -- language ------------------------------------------------------------
    def arcs(self, length: int, offset: int = 0) -> list[tuple[int, int, tuple[int, ...]]]:
        """(start, length, word) for each factor occupying ``offset..offset+length-1``."""
        cuts = _cuts(self.alpha, offset, offset + length)
        out = []
        for a, b in zip(cuts, cuts[1:] + [cuts[0] + fx.ONE]):
            mid = (a + (b - a) // 2) & fx.MASK
            w = tuple(Sturmian(self.alpha, mid).block(offset, offset + length).tolist())
            out.append((a, b - a, w))
        return out

    def language(self, length: int) -> list[tuple[int, ...]]:
        return sorted({w for _, _, w in self.arcs(length)})

    def arc(self, u) -> tuple[int, int]:
        cyl = self.as_cylinder(u)
        if not cyl.word:
            return 0, fx.ONE
        matches = [(a, ln) for a, ln, w in self.arcs(len(cyl.word), cyl.offset) if w == cyl.word]
        if not matches:
            raise DomainError(f"word {cyl.word} is not in the language")
        return matches[0]

    def basis(self, resolution):
        off = self.window_offset(resolution)
        return [Cylinder(w, off) for w in self.language(resolution)]

    # -- dynamics of sets --------------------------------------------------------
    def _weights(self, depth: int):
        """Cut index m and the first coding index it can separate."""
        if self.two_sided:
            ms = range(-depth, depth + 2)
            f = lambda m: min(abs(m), abs(m - 1))
        else:
            ms = range(0, depth + 1)
            f = lambda m: max(m - 1, 0)
        return sorted(((f(m), m) for m in ms))

    def diam_profile(self, u, horizon):
        start, length = self.arc(u)
        if length >= fx.ONE:
            d = np.ones(horizon + 1)
            return DiamProfile(d, d.copy())
        order = self._weights(CUT_DEPTH)
        m_lo = min(m for _, m in order)
        m_hi = max(m for _, m in order)
        count = horizon + 1 + m_hi - m_lo
        # value of cut -(m+n) alpha relative to the arc start, for t = m + n
        hi, lo = fx.orbit(-start, -self.alpha, m_lo, count)
        inside = fx.in_open_arc(hi, lo, 0, length)
        k = np.full(horizon + 1, -1)
        for f, m in order:
            sel = inside[m - m_lo: m - m_lo + horizon + 1] & (k < 0)
            k[sel] = f
        found = k >= 0
        dlo = np.where(found, dyadic_diam(np.maximum(k, 0)), 0.0)
        dhi = np.where(found, dlo, 2.0 ** -CUT_DEPTH)
        return DiamProfile(dlo, dhi)

    def sample(self, u, count, seed):
        start, length = self.arc(u)
        rng = np.random.default_rng(seed)
        fr = np.sort(rng.random(count)) * 0.98 + 0.01
        return [Word(Sturmian(self.alpha, (start + int(f * length)) & fx.MASK)) for f in fr]

    def describe(self):
        return {"id": self.id, "alpha": self.alpha_name, "sides": self.sides,
                "intercept": str(self.intercept)}


class CodingMap(FactorMap):
    """Sturmian point -> its intercept angle on the rotation."""

    def __init__(self, source: SturmianShift, target: Rotation):
        if source.alpha != target.alpha:
            raise ValueError("slopes differ")
        super().__init__(source, target, "sturmian_coding")

    def project(self, x):
        return Angle(x.rule.theta + x.offset * self.source.alpha)

    def fiber(self, y, count, resolution):
        """Lower and upper codings of ``y``; they coincide (to the window)
        unless the orbit of ``y`` hits a cut."""
        a = Word(Sturmian(self.source.alpha, y.value, False))
        b = Word(Sturmian(self.source.alpha, y.value, True))
        return [a] if self.source.metric(a, b, max(resolution, 8)) == 0 else [a, b]


def make_sturmian(alpha="golden", intercept=0, sides: str = "two"):
    s = SturmianShift(alpha, intercept, sides)
    r = Rotation(alpha)
    return s, CodingMap(s, r)
