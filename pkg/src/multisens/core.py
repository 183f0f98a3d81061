"""Points, open sets and the system interface shared by every other module.

Points are immutable values.  Symbolic points never store an infinite array:
a :class:`Word` is a deterministic index -> symbol rule plus an offset, so
shifting is an offset bump and any coordinate can be queried on demand.
"""

from __future__ import annotations

import abc
import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Sequence

import numpy as np

from . import fixedpoint as fx


class DomainError(ValueError):
    """A point or set does not belong to the system it was handed to."""


class Membership(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    UNCERTAIN = "uncertain"


# ---------------------------------------------------------------------------
# symbol rules


def _splitmix(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


class SymbolRule(abc.ABC):
    """Deterministic map from integer index to symbol."""

    def symbol(self, i: int) -> int:
        return int(self.block(i, i + 1)[0])

    @abc.abstractmethod
    def block(self, start: int, stop: int) -> np.ndarray:
        """Symbols at indices ``start..stop-1`` as a uint8 array."""

    def describe(self) -> dict:
        return {"rule": type(self).__name__}


@dataclass(frozen=True)
class EventuallyPeriodic(SymbolRule):
    """``prefix`` then ``period`` repeated; indices < 0 repeat ``left``."""

    prefix: tuple[int, ...] = ()
    period: tuple[int, ...] = (0,)
    left: tuple[int, ...] = (0,)

    def __post_init__(self):
        if not self.period or not self.left:
            raise ValueError("period and left must be non-empty")

    def block(self, start, stop):
        idx = np.arange(start, stop, dtype=np.int64)
        out = np.empty(idx.shape, dtype=np.uint8)
        neg = idx < 0
        out[neg] = np.asarray(self.left, dtype=np.uint8)[idx[neg] % len(self.left)]
        pre = (idx >= 0) & (idx < len(self.prefix))
        if pre.any():
            out[pre] = np.asarray(self.prefix, dtype=np.uint8)[idx[pre]]
        tail = idx >= len(self.prefix)
        out[tail] = np.asarray(self.period, dtype=np.uint8)[(idx[tail] - len(self.prefix)) % len(self.period)]
        return out

    def describe(self):
        return {"rule": "eventually_periodic", "prefix": list(self.prefix),
                "period": list(self.period), "left": list(self.left)}


def periodic(word: Sequence[int]) -> EventuallyPeriodic:
    word = tuple(word)
    return EventuallyPeriodic((), word, word)


@dataclass(frozen=True)
class Hashed(SymbolRule):
    """Pseudo-random symbols from SplitMix64 of (seed, index)."""

    seed: int
    alphabet: int = 2

    def block(self, start, stop):
        idx = np.arange(start, stop, dtype=np.int64).astype(np.uint64)
        salt = np.uint64((self.seed * 0x2545F4914F6CDD1D) & ((1 << 64) - 1))
        return (_splitmix(idx ^ salt) % np.uint64(self.alphabet)).astype(np.uint8)

    def describe(self):
        return {"rule": "hashed", "seed": self.seed, "alphabet": self.alphabet}


@lru_cache(maxsize=64)
def _champernowne_prefix(length: int, alphabet: int) -> np.ndarray:
    out: list[int] = []
    size = 1
    while len(out) < length:
        for k in range(alphabet ** size):
            digits = []
            for _ in range(size):
                k, r = divmod(k, alphabet)
                digits.append(r)
            out.extend(reversed(digits))
            if len(out) >= length:
                break
        size += 1
    arr = np.asarray(out[:length], dtype=np.uint8)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Champernowne(SymbolRule):
    """Concatenation of all words of length 1, 2, ...: a transitive point.

    Negative indices (two-sided use) read from ``left``."""

    alphabet: int = 2
    left: SymbolRule = EventuallyPeriodic()

    def block(self, start, stop):
        out = np.empty(stop - start, dtype=np.uint8)
        if start < 0:
            cut = min(stop, 0)
            out[: cut - start] = self.left.block(start, cut)
        if stop > 0:
            s = max(start, 0)
            n = 1 << max(10, (stop).bit_length())
            out[s - start:] = _champernowne_prefix(n, self.alphabet)[s:stop]
        return out

    def describe(self):
        return {"rule": "champernowne", "alphabet": self.alphabet, "left": self.left.describe()}


@dataclass(frozen=True)
class Patched(SymbolRule):
    """``base`` with finite blocks overwritten: word surgery."""

    base: SymbolRule
    patches: tuple[tuple[int, tuple[int, ...]], ...] = ()

    def block(self, start, stop):
        out = self.base.block(start, stop).copy()
        for at, word in self.patches:
            lo, hi = max(at, start), min(at + len(word), stop)
            if lo < hi:
                out[lo - start: hi - start] = word[lo - at: hi - at]
        return out

    def describe(self):
        return {"rule": "patched", "base": self.base.describe(),
                "patches": [[at, list(w)] for at, w in self.patches]}


@dataclass(frozen=True)
class Prefixed(SymbolRule):
    """``prefix`` at indices ``0..p-1``; every other index i reads
    ``base`` at ``base_offset + i - p``.  Prepending a symbol to a word is
    ``Prefixed((a,), word.rule, word.offset)``."""

    prefix: tuple[int, ...]
    base: SymbolRule
    base_offset: int = 0

    def block(self, start, stop):
        p = len(self.prefix)
        out = self.base.block(self.base_offset + start - p, self.base_offset + stop - p).copy()
        lo, hi = max(start, 0), min(stop, p)
        if lo < hi:
            out[lo - start: hi - start] = self.prefix[lo:hi]
        return out

    def describe(self):
        return {"rule": "prefixed", "prefix": list(self.prefix), "base": self.base.describe(),
                "base_offset": self.base_offset}


@dataclass(frozen=True)
class Sturmian(SymbolRule):
    """Mechanical word of slope ``alpha`` and intercept ``theta`` (fixed point).

    Lower coding: symbol i is 1 iff frac(theta + i alpha) >= 1 - alpha, i.e.
    floor((i+1)a + t) - floor(i a + t).  Upper coding uses ceilings.
    """

    alpha: int
    theta: int = 0
    upper: bool = False

    def angles(self, start, stop):
        return fx.orbit(self.theta, self.alpha, start, stop - start)

    def block(self, start, stop):
        hi, lo = self.angles(start, stop)
        cut = fx.ONE - self.alpha
        if self.upper:
            return fx.in_arc(hi, lo, cut + 1, self.alpha).astype(np.uint8)
        return fx.in_arc(hi, lo, cut, self.alpha).astype(np.uint8)

    def describe(self):
        return {"rule": "sturmian", "alpha": str(self.alpha), "theta": str(self.theta),
                "upper": self.upper}


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class Angle:
    """Point of R/Z as a 128-bit fixed-point value; ``err`` bounds drift in ulps."""

    value: int
    err: int = 0

    def __post_init__(self):
        object.__setattr__(self, "value", self.value & fx.MASK)

    @classmethod
    def of(cls, x) -> "Angle":
        return cls(fx.round_fraction(x))

    def __float__(self):
        return fx.to_float(self.value)


@dataclass(frozen=True)
class Word:
    """Symbolic point: coordinate i is ``rule.symbol(offset + i)``."""

    rule: SymbolRule
    offset: int = 0

    def symbol(self, i: int) -> int:
        return self.rule.symbol(self.offset + i)

    def block(self, start: int, stop: int) -> np.ndarray:
        return self.rule.block(self.offset + start, self.offset + stop)

    def shifted(self, n: int) -> "Word":
        return Word(self.rule, self.offset + n)


@dataclass(frozen=True)
class Pair:
    first: Any
    second: Any


@dataclass(frozen=True)
class Nat:
    """Point of the one-point compactification of N; ``None`` is infinity."""

    value: int | None

    def __post_init__(self):
        if self.value is not None and self.value < 1:
            raise ValueError("natural numbers start at 1")

    @property
    def inverse(self) -> float:
        return 0.0 if self.value is None else 1.0 / self.value


@dataclass(frozen=True)
class Collapsed:
    """The single point a quotient makes out of its collapsed set."""

    label: str = "e"


@dataclass(frozen=True)
class Tower:
    """Finite prefix (x_1, ..., x_K) of a point of an inverse limit."""

    levels: tuple

    @property
    def depth(self) -> int:
        return len(self.levels)


def word(pattern: str) -> Word:
    """Build an eventually periodic word from ``"10(0)"``-style patterns.

    ``"10(0)"`` is 1 0 0 0 ..., ``"(01)"`` is 0 1 0 1 ...  Negative indices
    continue the period, so ``"(01)"`` is also the two-sided periodic point.
    """
    if "(" not in pattern:
        raise ValueError("pattern needs a periodic part in parentheses")
    head, tail = pattern.split("(", 1)
    period = tuple(int(c) for c in tail.rstrip(")"))
    prefix = tuple(int(c) for c in head)
    return Word(EventuallyPeriodic(prefix, period, period))


# ---------------------------------------------------------------------------
# open sets


@dataclass(frozen=True)
class Cylinder:
    """Points with ``x[offset + i] == word[i]`` for every i."""

    word: tuple[int, ...]
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(s) for s in self.word))

    @property
    def window(self) -> tuple[int, int]:
        return self.offset, self.offset + len(self.word) - 1


@dataclass(frozen=True)
class Ball:
    """Open metric ball ``{y : d(center, y) < radius}``."""

    center: Any
    radius: float


@dataclass(frozen=True)
class Product:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class QuotientImage:
    inner: Any


OpenSet = Cylinder | Ball | Product | QuotientImage


def describe_set(u) -> dict:
    if isinstance(u, Cylinder):
        return {"kind": "cylinder", "word": list(u.word), "offset": u.offset}
    if isinstance(u, Ball):
        return {"kind": "ball", "center": describe_point(u.center), "radius": u.radius}
    if isinstance(u, Product):
        return {"kind": "product", "parts": [describe_set(p) for p in u.parts]}
    if isinstance(u, QuotientImage):
        return {"kind": "quotient_image", "inner": describe_set(u.inner)}
    raise DomainError(f"not an open-set descriptor: {u!r}")


def describe_point(x) -> dict:
    if isinstance(x, Angle):
        return {"tag": "circle-angle", "value": str(x.value), "err": x.err}
    if isinstance(x, Word):
        return {"tag": "word", "rule": x.rule.describe(), "offset": x.offset}
    if isinstance(x, Pair):
        return {"tag": "pair", "first": describe_point(x.first), "second": describe_point(x.second)}
    if isinstance(x, Nat):
        return {"tag": "nat", "value": x.value}
    if isinstance(x, Collapsed):
        return {"tag": "quotient-class", "label": x.label}
    if isinstance(x, Tower):
        return {"tag": "inverse-limit", "levels": [describe_point(v) for v in x.levels]}
    if hasattr(x, "describe"):
        return x.describe()
    raise DomainError(f"cannot describe point {x!r}")


# ---------------------------------------------------------------------------
# systems


@dataclass
class DiamProfile:
    """Bounds ``lo[n] <= diam(T^n U) <= hi[n]`` for ``n = 0..horizon``.

    ``witnesses`` (optional) maps n to a pair of points of U realising
    ``lo[n]``, for systems whose lower bounds come from sampling.
    """

    lo: np.ndarray
    hi: np.ndarray
    witnesses: dict[int, tuple] | None = None

    @property
    def exact(self) -> bool:
        return bool(np.array_equal(self.lo, self.hi))


class DynSystem(abc.ABC):
    """A compact metric space with a continuous surjection.

    Subclasses supply the map, the metric, a basis generator, membership and,
    where they can, exact or bounded diameter profiles of iterated sets.
    """

    id: str = "system"
    invertible: bool = False
    minimal_expected: bool = False
    exact_mode: bool = False
    diameter: float = 1.0
    max_resolution: int = 30

    # -- map -----------------------------------------------------------------
    @abc.abstractmethod
    def step(self, x): ...

    def step_inverse(self, x):
        raise DomainError(f"{self.id} is not invertible")

    def iterate(self, x, n: int):
        if n < 0:
            if not self.invertible:
                raise DomainError(f"negative iterate on non-invertible {self.id}")
            for _ in range(-n):
                x = self.step_inverse(x)
            return x
        for _ in range(n):
            x = self.step(x)
        return x

    # -- geometry --------------------------------------------------------------
    @abc.abstractmethod
    def metric(self, x, y, precision: int = 64) -> float: ...

    @abc.abstractmethod
    def basis(self, resolution: int) -> list: ...

    @abc.abstractmethod
    def contains(self, u, x) -> Membership: ...

    def check_point(self, x) -> None:
        """Raise :class:`DomainError` if ``x`` is not a point of this system."""

    def refinement_candidates(self, resolution: int, limit: int) -> list:
        return spread(self.basis(resolution), limit)

    def sample(self, u, count: int, seed: int) -> list:
        raise DomainError(f"{self.id} cannot sample points of {u!r}")

    # -- dynamics of sets -----------------------------------------------------
    def diam_profile(self, u, horizon: int) -> DiamProfile:
        """Default: sampled lower bounds, trivial upper bound."""
        return sampled_profile(self, u, horizon)

    def orbit_membership(self, x, u, horizon: int) -> tuple[np.ndarray, np.ndarray]:
        """Masks (inside, uncertain) of ``T^n x in u`` for ``n = 0..horizon``."""
        inside = np.zeros(horizon + 1, dtype=bool)
        unsure = np.zeros(horizon + 1, dtype=bool)
        y = x
        for n in range(horizon + 1):
            m = self.contains(u, y)
            inside[n] = m is Membership.INSIDE
            unsure[n] = m is Membership.UNCERTAIN
            if n < horizon:
                y = self.step(y)
        return inside, unsure

    def pullback(self, u, i: int, k: int, delta: float, rng) -> Any:
        """An open set inside ``T^-i u`` whose first ``k`` images have diam < delta."""
        raise DomainError(f"{self.id} does not support pullbacks")

    def describe(self) -> dict:
        return {"id": self.id}

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"


def spread(items: Sequence, limit: int) -> list:
    """Deterministic evenly spaced sub-list of at most ``limit`` items."""
    items = list(items)
    if limit <= 0 or len(items) <= limit:
        return items
    step = len(items) / limit
    return [items[int(j * step)] for j in range(limit)]


def sampled_profile(system: DynSystem, u, horizon: int, count: int = 8, seed: int = 0) -> DiamProfile:
    """Lower bounds on ``diam(T^n u)`` from a deterministic sample of ``u``.

    Every n with a positive bound records the sample pair realising it.
    """
    pts = system.sample(u, count, seed)
    lo = np.zeros(horizon + 1)
    wit: dict[int, tuple] = {}
    orbits = [p for p in pts]
    for n in range(horizon + 1):
        best, arg = 0.0, None
        for a in range(len(orbits)):
            for b in range(a + 1, len(orbits)):
                d = system.metric(orbits[a], orbits[b])
                if d > best:
                    best, arg = d, (a, b)
        lo[n] = best
        if arg is not None:
            wit[n] = (pts[arg[0]], pts[arg[1]])
        if n < horizon:
            orbits = [system.step(p) for p in orbits]
    hi = np.full(horizon + 1, system.diameter)
    return DiamProfile(lo, hi, wit)


# ---------------------------------------------------------------------------
# module-level operations


def distance(system: DynSystem, x, y, precision: int = 64) -> float:
    system.check_point(x)
    system.check_point(y)
    return system.metric(x, y, precision)


def iterate(system: DynSystem, x, n: int):
    system.check_point(x)
    return system.iterate(x, n)


def membership(system: DynSystem, u, x) -> Membership:
    system.check_point(x)
    return system.contains(u, x)


def basis(system: DynSystem, resolution: int) -> list:
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if resolution > system.max_resolution:
        raise ValueError(f"resolution {resolution} beyond representable precision of {system.id}")
    return system.basis(resolution)


def dyadic_diam(k: np.ndarray | int):
    """``2**-k`` with ``k`` clipped to ``0..1070`` (diameters never exceed 1)."""
    return np.ldexp(1.0, -np.clip(np.asarray(k), 0, 1070))


class FactorMap:
    """Projection ``pi: source -> target`` with ``pi . T = S . pi``.

    ``fiber`` returns points of ``pi^-1(y)`` (constructed, not searched);
    subclasses without a constructive fiber leave it unimplemented.
    """

    def __init__(self, source: DynSystem, target: DynSystem, name: str = "factor"):
        self.source = source
        self.target = target
        self.name = name

    def project(self, x):
        raise NotImplementedError

    def fiber(self, y, count: int, resolution: int) -> list:
        raise DomainError(f"{self.name} has no fiber sampler")

    def describe(self) -> dict:
        return {"map": self.name, "source": self.source.id, "target": self.target.id}


class IdentityMap(FactorMap):
    def __init__(self, system: DynSystem):
        super().__init__(system, system, "identity")

    def project(self, x):
        return x

    def fiber(self, y, count, resolution):
        return [y]
