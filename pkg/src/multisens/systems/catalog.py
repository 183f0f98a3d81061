"""Named constructors with predicted properties.

Each prediction carries a short mathematical justification so reports can
show why a verdict is expected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from ..core import DynSystem
from .combinators import NaturalExtension, ProductSystem
from .referee import make_referee_example
from .rotation import Rotation
from .shift import FullShift
from .sturmian import make_sturmian
from .toeplitz import make_toeplitz_odometer_pair


def make_rotation(alpha="golden") -> Rotation:
    return Rotation(alpha)


def make_full_shift(sides: str = "one", alphabet: int = 2) -> FullShift:
    return FullShift(sides, alphabet)


@dataclass(frozen=True)
class Prediction:
    value: Any
    reason: str

    def to_json(self):
        return {"value": self.value, "reason": self.reason}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    build: Callable[..., DynSystem]
    params: dict = field(default_factory=dict)
    predictions: dict = field(default_factory=dict)
    summary: str = ""

    def make(self, **overrides) -> DynSystem:
        params = {**self.params, **overrides}
        return self.build(**params)

    def to_json(self):
        return {"name": self.name, "params": self.params, "summary": self.summary,
                "predictions": {k: p.to_json() for k, p in self.predictions.items()}}


def _sturmian(alpha="golden", intercept=0, sides="two"):
    return make_sturmian(alpha, intercept, sides)[0]


def _toeplitz(periods=(2, 4, 8), symbols=(0, 1), sides="one"):
    return make_toeplitz_odometer_pair(tuple(periods), tuple(symbols), sides)[0]


def _odometer(periods=(2, 4, 8)):
    return make_toeplitz_odometer_pair(tuple(periods))[1]


def _shift_square(sides="one"):
    return ProductSystem(FullShift(sides), FullShift(sides))


def _natext_shift(depth=32):
    return NaturalExtension(FullShift("one"), depth)


P = Prediction
ISOMETRY = "an isometry moves every set without changing its diameter"
EXPANSIVE = "an infinite minimal subshift is expansive, so every cylinder eventually spreads"
AA = "an almost one-to-one extension of its maximal equicontinuous factor"

CATALOG: dict[str, CatalogEntry] = {e.name: e for e in [
    CatalogEntry("rotation", make_rotation, {"alpha": "golden"}, {
        "invertible": P(True, "x -> x - alpha inverts the map"),
        "minimal": P(True, "every orbit of an irrational rotation is dense"),
        "equicontinuous": P(True, ISOMETRY),
        "almost_automorphic": P(True, "equicontinuous minimal systems are almost automorphic"),
        "sensitive": P("no", ISOMETRY),
        "thickly_sensitive": P("no", ISOMETRY),
        "multi_sensitive": P("no", ISOMETRY),
    }, "circle rotation by an irrational angle"),
    CatalogEntry("full_shift", make_full_shift, {"sides": "one"}, {
        "invertible": P(False, "each point has two preimages"),
        "minimal": P(False, "0^inf is a fixed point"),
        "equicontinuous": P(False, "cylinders reach diameter 1 after their length"),
        "sensitive": P("yes", "T^n [w] is the whole space for n >= |w|"),
        "thickly_sensitive": P("yes", "S([w], 1/2) contains every n > |w|"),
        "multi_sensitive": P("yes", "finitely many cylinders all stretch after the longest length"),
    }, "full shift on two symbols"),
    CatalogEntry("full_shift_two", make_full_shift, {"sides": "two"}, {
        "invertible": P(True, "the two-sided shift is a homeomorphism"),
        "minimal": P(False, "0^inf is a fixed point"),
        "sensitive": P("yes", "cylinders stretch once their window leaves the origin"),
        "thickly_sensitive": P("yes", "S([w], 1/2) is cofinite"),
        "multi_sensitive": P("yes", "finite intersections of cofinite sets are cofinite"),
    }, "two-sided full shift on two symbols"),
    CatalogEntry("sturmian", _sturmian, {"alpha": "golden", "intercept": 0, "sides": "two"}, {
        "invertible": P(True, "two-sided subshift"),
        "minimal": P(True, "codings of a minimal rotation form a minimal subshift"),
        "almost_automorphic": P(True, AA),
        "sensitive": P("yes", EXPANSIVE),
        "thickly_sensitive": P("no", "minimal and " + AA),
        "multi_sensitive": P("no", "multi-sensitivity implies thick sensitivity"),
    }, "Sturmian subshift coding the golden rotation"),
    CatalogEntry("toeplitz", _toeplitz, {"periods": [2, 4, 8], "symbols": [0, 1], "sides": "one"}, {
        "invertible": P(False, "one-sided subshift"),
        "minimal": P(True, "regular Toeplitz subshifts are minimal"),
        "almost_automorphic": P(True, AA),
        "sensitive": P("yes", EXPANSIVE),
        "thickly_sensitive": P("no", "minimal and " + AA),
        "multi_sensitive": P("no", "multi-sensitivity implies thick sensitivity"),
    }, "regular Toeplitz subshift over the dyadic odometer"),
    CatalogEntry("odometer", _odometer, {"periods": [2, 4, 8]}, {
        "invertible": P(True, "adding 1 is invertible in the inverse limit group"),
        "minimal": P(True, "the odometer is a minimal group rotation"),
        "equicontinuous": P(True, ISOMETRY),
        "sensitive": P("no", ISOMETRY),
        "thickly_sensitive": P("no", ISOMETRY),
        "multi_sensitive": P("no", ISOMETRY),
    }, "dyadic odometer"),
    CatalogEntry("referee_example", make_referee_example, {}, {
        "invertible": P(True, "quotient of a homeomorphism by an invariant closed set"),
        "minimal": P(False, "e is a fixed point and each level is invariant"),
        "sensitive": P("no", "for every delta some invariant level has diameter below delta"),
        "thickly_sensitive": P("no", "S(Y1 x {p}, delta) is empty once 2/p <= delta"),
        "multi_sensitive": P("no", "multi-sensitivity implies thick sensitivity"),
        "syndetic_eq_points": P("none", "near any point some level stretches for all large n"),
    }, "full shift times compactified N, with the axes collapsed to a point"),
    CatalogEntry("shift_square", _shift_square, {"sides": "one"}, {
        "invertible": P(False, "product of one-sided shifts"),
        "sensitive": P("yes", "each factor is sensitive"),
        "thickly_sensitive": P("yes", "products of cofinite time sets are cofinite"),
        "multi_sensitive": P("yes", "products of cofinite time sets are cofinite"),
    }, "product of two one-sided full shifts"),
    CatalogEntry("natural_extension_shift", _natext_shift, {"depth": 32}, {
        "invertible": P(True, "inverse limits are invertible"),
        "minimal": P(False, "the lifted fixed point is fixed"),
    }, "inverse limit of the one-sided full shift"),
]}


def entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown system {name!r}; known: {sorted(CATALOG)}") from None


def build(name: str, **params) -> DynSystem:
    return entry(name).make(**params)
