"""Concrete systems, combinators and the catalog."""

from .catalog import CATALOG, CatalogEntry, build, entry, make_full_shift, make_rotation
from .combinators import (ClosedSet, CollapseQuotient, NatCompactification, NaturalExtension,
                          PointSet, ProductSystem, Projection, make_collapse_quotient,
                          make_natural_extension, make_product)
from .referee import RefereeExample, level_set, make_referee_example
from .rotation import Rotation
from .shift import FullShift, Subshift, transitive_word
from .sturmian import CodingMap, SturmianShift, make_sturmian
from .toeplitz import Odometer, ToeplitzFactor, ToeplitzShift, make_toeplitz_odometer_pair

__all__ = [
    "CATALOG", "CatalogEntry", "ClosedSet", "CodingMap", "CollapseQuotient", "FullShift",
    "NatCompactification", "NaturalExtension", "Odometer", "PointSet", "ProductSystem",
    "Projection", "RefereeExample", "Rotation", "SturmianShift", "Subshift", "ToeplitzFactor",
    "ToeplitzShift", "build", "entry", "level_set", "make_collapse_quotient", "make_full_shift",
    "make_natural_extension", "make_product", "make_referee_example", "make_rotation",
    "make_sturmian", "make_toeplitz_odometer_pair", "transitive_word",
]
