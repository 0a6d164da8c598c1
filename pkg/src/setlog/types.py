"""Type expressions for the optional checker.

Grammar of types: a basic type (any declared atom), int, set(t),
rel(t1,t2), [t1,t2] (pair types), enum([c1,...,cn]) and names bound by
def_type.  rel(a,b) and set([a,b]) denote the same thing and compare
equal after normalization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class BasicType:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class IntType:
    def __str__(self):
        return "int"


@dataclass(frozen=True)
class SetType:
    elem: "TypeExpr"

    def __str__(self):
        return f"set({self.elem})"


@dataclass(frozen=True)
class PairType:
    first: "TypeExpr"
    second: "TypeExpr"

    def __str__(self):
        return f"[{self.first},{self.second}]"


@dataclass(frozen=True)
class EnumType:
    values: tuple  # atom names

    def __str__(self):
        return f"enum([{','.join(self.values)}])"


@dataclass(frozen=True)
class TypeName:
    """A reference to a def_type synonym, resolved by the checker."""

    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TypeVar:
    """Checker-internal placeholder used by constraint signatures."""

    name: str

    def __str__(self):
        return self.name


TypeExpr = Union[BasicType, IntType, SetType, PairType, EnumType, TypeName, TypeVar]

INT = IntType()


def rel_type(a, b):
    """rel(a,b) normalizes to set([a,b])."""
    return SetType(PairType(a, b))
