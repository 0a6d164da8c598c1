"""Term universe and substitutions.

Terms cover variables, atoms (lowercase constants), arbitrary-precision
integers, tagged constants for typed goals, bracket lists (ordered pairs
are the two-element case), extensional sets with an optional open tail,
integer intervals, cartesian products and arithmetic expressions.

Set terms are kept flattened: the tail of a SetCons is never itself a
SetCons, so ``{a/{b/X}}`` is stored as ``{a,b/X}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True)
class Var:
    """A logic variable, identified by name."""

    name: str

    def __repr__(self):
        return f"Var({self.name})"


@dataclass(frozen=True)
class Const:
    """An atom: lowercase identifier or quoted text, stored unquoted."""

    name: str

    def __repr__(self):
        return f"Const({self.name})"


@dataclass(frozen=True)
class Int:
    """Integer constant (arbitrary precision)."""

    value: int

    def __repr__(self):
        return f"Int({self.value})"


@dataclass(frozen=True)
class TypedConst:
    """A constant tagged with a basic type, written ``tag:value``."""

    tag: str
    value: Union[str, int]


@dataclass(frozen=True)
class ListTerm:
    """Bracket list ``[t1,...,tn]``; two elements encode an ordered pair."""

    items: tuple

    def __repr__(self):
        return f"ListTerm({list(self.items)})"


@dataclass(frozen=True)
class EmptySet:
    """The empty set ``{}``."""

    def __repr__(self):
        return "EmptySet"


EMPTY = EmptySet()


@dataclass(frozen=True)
class SetCons:
    """Extensional set ``{e1,...,en/tail}``; elems is nonempty.

    The tail is one of EmptySet, Var, Interval or CartProd; use
    :func:`set_cons` to build instances so flattening is maintained.
    """

    elems: tuple
    tail: "Term"

    def __repr__(self):
        return f"SetCons({list(self.elems)}, {self.tail!r})"


@dataclass(frozen=True)
class Interval:
    """Integer interval ``int(lo,hi)``; empty when lo > hi."""

    lo: "Term"
    hi: "Term"


@dataclass(frozen=True)
class CartProd:
    """Cartesian product ``cp(a,b)``: all pairs [x,y] with x in a, y in b."""

    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class ArithExpr:
    """Arithmetic expression node; op is one of + - * div mod."""

    op: str
    args: tuple


Term = Union[
    Var, Const, Int, TypedConst, ListTerm, EmptySet, SetCons,
    Interval, CartProd, ArithExpr,
]

SET_TERMS = (EmptySet, SetCons, Interval, CartProd)


def pair(a, b):
    """Ordered pair [a,b]."""
    return ListTerm((a, b))


def set_cons(elems, tail=EMPTY):
    """Build a set term, flattening a SetCons tail and dropping empties."""
    elems = tuple(elems)
    while isinstance(tail, SetCons):
        elems = elems + tail.elems
        tail = tail.tail
    if not elems:
        return tail
    return SetCons(elems, tail)


def set_from(values):
    """Closed extensional set holding the given terms."""
    return set_cons(tuple(values), EMPTY)


class VarGen:
    """Fresh-variable source; names are _N1, _N2, ... per session."""

    def __init__(self):
        self.counter = 0

    def fresh(self, hint: str = "") -> Var:
        self.counter += 1
        return Var(f"_N{self.counter}")


def is_fresh_name(name: str) -> bool:
    return name.startswith("_")


def subterms(t: Term) -> Iterator[Term]:
    """Yield t and every subterm, depth first."""
    yield t
    if isinstance(t, ListTerm):
        for x in t.items:
            yield from subterms(x)
    elif isinstance(t, SetCons):
        for x in t.elems:
            yield from subterms(x)
        yield from subterms(t.tail)
    elif isinstance(t, Interval):
        yield from subterms(t.lo)
        yield from subterms(t.hi)
    elif isinstance(t, CartProd):
        yield from subterms(t.left)
        yield from subterms(t.right)
    elif isinstance(t, ArithExpr):
        for x in t.args:
            yield from subterms(x)


def term_vars(t: Term) -> list:
    """Variables of t in first-occurrence order."""
    seen = []
    for s in subterms(t):
        if isinstance(s, Var) and s not in seen:
            seen.append(s)
    return seen


_VARS_CACHE: dict = {}


def cached_vars(t) -> frozenset:
    """Variable set of a term, memoized by object identity.

    Substitution and store-wake scans ask for the variables of the same
    shared immutable nodes over and over; recomputing them dominated
    solving time on proof-sized goals.  Entries hold a strong reference
    to the term so its id cannot be reused.
    """
    key = id(t)
    hit = _VARS_CACHE.get(key)
    if hit is not None and hit[0] is t:
        return hit[1]
    if len(_VARS_CACHE) > 1_000_000:
        _VARS_CACHE.clear()
    vs = frozenset(term_vars(t))
    _VARS_CACHE[key] = (t, vs)
    return vs


def is_ground(t: Term) -> bool:
    return not any(isinstance(s, Var) for s in subterms(t))


class Subst:
    """An idempotent substitution: a frozen map from variables to terms.

    bind() composes, so every right-hand side stays fully applied.
    """

    __slots__ = ("mapping",)

    def __init__(self, mapping=None):
        self.mapping = dict(mapping) if mapping else {}

    def __contains__(self, v):
        return v in self.mapping

    def __len__(self):
        return len(self.mapping)

    def lookup(self, v):
        return self.mapping.get(v)

    def apply(self, t: Term) -> Term:
        if isinstance(t, Var):
            bound = self.mapping.get(t)
            return t if bound is None else bound
        if isinstance(t, (ListTerm, SetCons, Interval, CartProd, ArithExpr)):
            # untouched subtrees come back identical, which keeps them
            # shared and the vars cache warm
            if all(v not in self.mapping for v in cached_vars(t)):
                return t
        if isinstance(t, ListTerm):
            return ListTerm(tuple(self.apply(x) for x in t.items))
        if isinstance(t, SetCons):
            return set_cons(
                tuple(self.apply(x) for x in t.elems), self.apply(t.tail))
        if isinstance(t, Interval):
            return Interval(self.apply(t.lo), self.apply(t.hi))
        if isinstance(t, CartProd):
            return CartProd(self.apply(t.left), self.apply(t.right))
        if isinstance(t, ArithExpr):
            return ArithExpr(t.op, tuple(self.apply(x) for x in t.args))
        return t

    def bind(self, v: Var, t: Term) -> "Subst":
        """Return self extended with v -> t (t already applied)."""
        one = Subst({v: t})
        new = {}
        for u, old in self.mapping.items():
            if isinstance(old, Var):
                new[u] = t if old == v else old
            elif v in cached_vars(old):
                new[u] = one.apply(old)
            else:
                new[u] = old
        new[v] = t
        result = Subst()
        result.mapping = new
        return result

    def __repr__(self):
        inner = ", ".join(
            f"{v.name}={print_term(t)}" for v, t in self.mapping.items())
        return f"Subst({inner})"


# --- printing ---------------------------------------------------------------

_ARITH_PREC = {"+": 1, "-": 1, "*": 2, "div": 2, "mod": 2}


def _print_arith(t, prec):
    if isinstance(t, ArithExpr):
        p = _ARITH_PREC[t.op]
        op = t.op if t.op in ("+", "-", "*") else f" {t.op} "
        left = _print_arith(t.args[0], p)
        # same-precedence right operands keep parens so a-(b-c) reads back
        right = _print_arith(t.args[1], p + 1)
        s = f"{left}{op}{right}"
        return f"({s})" if p < prec else s
    if isinstance(t, Int) and t.value < 0 and prec > 1:
        return f"({t.value})"
    return print_term(t)


def _ground_key(s: str):
    return s


def print_term(t: Term, typed: bool = False, canonical: bool = False) -> str:
    """Render a term in concrete syntax.

    Atoms always print unquoted (matching interactive output), so the
    printed form only re-parses when atoms are lowercase-led.  With
    canonical=True, ground set elements are deduplicated and sorted,
    giving equal strings for equal ground sets.
    """
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, TypedConst):
        return f"{t.tag}:{t.value}"
    if isinstance(t, ListTerm):
        inner = ",".join(print_term(x, typed, canonical) for x in t.items)
        return f"[{inner}]"
    if isinstance(t, EmptySet):
        return "{}"
    if isinstance(t, SetCons):
        parts = [print_term(x, typed, canonical) for x in t.elems]
        if canonical and all(is_ground(x) for x in t.elems):
            parts = sorted(set(parts), key=_ground_key)
        inner = ",".join(parts)
        if isinstance(t.tail, EmptySet):
            return "{" + inner + "}"
        return "{" + inner + "/" + print_term(t.tail, typed, canonical) + "}"
    if isinstance(t, Interval):
        return f"int({print_term(t.lo)},{print_term(t.hi)})"
    if isinstance(t, CartProd):
        a = print_term(t.left, typed, canonical)
        b = print_term(t.right, typed, canonical)
        return f"cp({a},{b})"
    if isinstance(t, ArithExpr):
        return _print_arith(t, 0)
    raise TypeError(f"not a term: {t!r}")
