"""128-bit fixed-point angles on the circle R/Z.

An angle is an integer ``a`` in ``[0, 2**128)`` standing for ``a / 2**128``.
Rotation by a fixed-point ``alpha`` is exact modular addition, so ``n`` steps
drift from the true irrational orbit by at most ``n`` units in the last place
(the only rounding happens once, when ``alpha`` itself is rounded).

Vectorised helpers operate on (hi, lo) pairs of ``uint64`` arrays so that
orbit scans over 10**5..10**6 points stay in numpy.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import cycle, islice
from typing import Iterable, Sequence

import numpy as np

BITS = 128
ONE = 1 << BITS
MASK = ONE - 1
HALF = ONE >> 1
_M64 = (1 << 64) - 1

NAMED_ALPHAS: dict[str, tuple[tuple[int, ...], tuple[int, ...]]] = {
    # name -> (continued-fraction prefix, periodic tail)
    "golden": ((0,), (1,)),
    "silver": ((0,), (2,)),
    "sqrt2": ((0,), (2,)),
    "sqrt3": ((0,), (1, 2)),
    "bronze": ((0,), (3,)),
}


class RationalAlphaError(ValueError):
    """Raised when a rotation number would be rational (non-minimal rotation)."""


def alpha_from_cf(prefix: Sequence[int], period: Sequence[int]) -> int:
    """Round ``[prefix; period, period, ...]`` to the nearest 128-bit angle.

    Convergents are taken until the denominator exceeds ``2**140`` so the
    truncation error (< q**-2) is far below half an ulp.
    """
    if not period:
        raise RationalAlphaError("finite continued fraction is rational")
    if any(a <= 0 for a in period) or any(a <= 0 for a in prefix[1:]):
        raise ValueError("partial quotients after the first must be positive")
    p_prev, p = 1, prefix[0]
    q_prev, q = 0, 1
    coeffs = islice(cycle(period), None)
    rest = list(prefix[1:])
    while q < (1 << 140):
        a = rest.pop(0) if rest else next(coeffs)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    frac = Fraction(p, q)
    frac -= frac.numerator // frac.denominator
    return round_fraction(frac)


def round_fraction(value: Fraction | float | int) -> int:
    """Nearest fixed-point angle to ``value mod 1`` (ties to even)."""
    f = Fraction(value)
    scaled = f * ONE
    return round(scaled) & MASK


def parse_alpha(value) -> int:
    """Parse a rotation number given as a name, ``{"cf": [...], "period": [...]}``
    or a ``(prefix, period)`` pair.  Rational values are rejected."""
    if isinstance(value, str):
        try:
            prefix, period = NAMED_ALPHAS[value]
        except KeyError:
            raise ValueError(f"unknown alpha name {value!r}") from None
        return alpha_from_cf(prefix, period)
    if isinstance(value, dict):
        unknown = set(value) - {"cf", "period"}
        if unknown:
            raise ValueError(f"unknown alpha fields {sorted(unknown)}")
        return alpha_from_cf(tuple(value.get("cf", (0,))), tuple(value.get("period", ())))
    if isinstance(value, (tuple, list)) and len(value) == 2:
        return alpha_from_cf(tuple(value[0]), tuple(value[1]))
    if isinstance(value, (Fraction, int)):
        raise RationalAlphaError(f"rational alpha {value!r}")
    raise ValueError(f"cannot interpret alpha value {value!r}")


def to_float(a: int) -> float:
    return float(Fraction(a, ONE))


def circ_dist(a: int, b: int) -> int:
    d = (a - b) & MASK
    return min(d, ONE - d)


# -- vectorised 128-bit arithmetic ---------------------------------------


def split(values: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    vals = list(values)
    hi = np.fromiter((v >> 64 for v in vals), dtype=np.uint64, count=len(vals))
    lo = np.fromiter((v & _M64 for v in vals), dtype=np.uint64, count=len(vals))
    return hi, lo


@lru_cache(maxsize=32)
def _multiples(step: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    acc, out = 0, []
    for _ in range(count):
        out.append(acc)
        acc = (acc + step) & MASK
    hi, lo = split(out)
    hi.setflags(write=False)
    lo.setflags(write=False)
    return hi, lo


def orbit(start: int, step: int, first: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Angles ``start + (first + j) * step`` for ``j = 0..count-1``."""
    hi, lo = _multiples(step, count)
    return add_const(hi, lo, (start + first * step) & MASK)


def add_const(hi: np.ndarray, lo: np.ndarray, c: int) -> tuple[np.ndarray, np.ndarray]:
    c &= MASK
    ch, cl = np.uint64(c >> 64), np.uint64(c & _M64)
    new_lo = lo + cl
    carry = (new_lo < lo).astype(np.uint64)
    return hi + ch + carry, new_lo


def _less(hi, lo, c: int) -> np.ndarray:
    ch, cl = np.uint64(c >> 64), np.uint64(c & _M64)
    return (hi < ch) | ((hi == ch) & (lo < cl))


def in_arc(hi: np.ndarray, lo: np.ndarray, start: int, length: int) -> np.ndarray:
    """Mask of angles in the half-open arc ``[start, start + length)``."""
    if length >= ONE:
        return np.ones(hi.shape, dtype=bool)
    if length <= 0:
        return np.zeros(hi.shape, dtype=bool)
    dh, dl = add_const(hi, lo, -start)
    return _less(dh, dl, length)


def in_open_arc(hi: np.ndarray, lo: np.ndarray, start: int, length: int) -> np.ndarray:
    """Mask of angles in the open arc ``(start, start + length)``."""
    return in_arc(hi, lo, start + 1, length - 1)


def to_ints(hi: np.ndarray, lo: np.ndarray) -> list[int]:
    return [(int(h) << 64) | int(l) for h, l in zip(hi, lo)]
