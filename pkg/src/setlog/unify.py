"""Unification over sets, intervals, cartesian products and trees.

Set-set unification follows the four-alternative scheme: if two
extensional sets share their first elements the remainders unify, and
because duplicates are permitted the shared element may also reappear
on either remainder, or both sets may agree via a fresh common rest.
The alternatives are produced in a fixed order so solution streams are
deterministic.

A variable may legally unify with a set term that mentions it in tail
position ({a|X} absorbs into X = {a|N}); any other occurrence fails.
"""

from __future__ import annotations

from typing import Iterator

from .errors import SetlogError
from .goals import Atom
from .state import SolveContext, State
from .terms import (
    ArithExpr,
    CartProd,
    Const,
    EMPTY,
    EmptySet,
    Int,
    Interval,
    ListTerm,
    SetCons,
    TypedConst,
    Var,
    is_fresh_name,
    set_cons,
    set_from,
    subterms,
)

INTERVAL_CAP = 10000


def expand_interval(t: Interval):
    """Ground interval to an explicit set, or None if bounds are open."""
    if not (isinstance(t.lo, Int) and isinstance(t.hi, Int)):
        return None
    lo, hi = t.lo.value, t.hi.value
    if lo > hi:
        return EMPTY
    if hi - lo + 1 > INTERVAL_CAP:
        raise SetlogError("interval int(%d,%d) is too large to expand" % (lo, hi))
    return set_from(Int(i) for i in range(lo, hi + 1))


def _closed_elements(t):
    """Elements of a closed extensional set, or None if open-ended."""
    if isinstance(t, EmptySet):
        return []
    if isinstance(t, SetCons) and isinstance(t.tail, EmptySet):
        return list(t.elems)
    return None


def expand_cartprod(t: CartProd):
    """Ground cartesian product to an explicit set of pairs, or None."""
    left = t.left
    right = t.right
    if isinstance(left, Interval):
        left = expand_interval(left)
        if left is None:
            return None
    if isinstance(right, Interval):
        right = expand_interval(right)
        if right is None:
            return None
    if left is None or right is None:
        return None
    ls = _closed_elements(left) if not isinstance(left, CartProd) else None
    rs = _closed_elements(right) if not isinstance(right, CartProd) else None
    if ls is None or rs is None:
        return None
    if len(ls) * len(rs) > INTERVAL_CAP:
        raise SetlogError("cartesian product is too large to expand")
    pairs = [ListTerm((a, b)) for a in ls for b in rs]
    return set_from(pairs)


def unify(t1, t2, state: State, ctx: SolveContext) -> Iterator[State]:
    a = state.resolve(t1)
    b = state.resolve(t2)
    yield from _unify(a, b, state, ctx)


def _unify(a, b, state, ctx) -> Iterator[State]:
    ctx.tick()
    if a == b:
        yield state
        return
    if isinstance(a, Var) or isinstance(b, Var):
        yield from _unify_var(a, b, state, ctx)
        return
    if isinstance(a, (SetCons, EmptySet, Interval, CartProd)) or isinstance(
        b, (SetCons, EmptySet, Interval, CartProd)
    ):
        yield from _unify_setlike(a, b, state, ctx)
        return
    if isinstance(a, ListTerm) and isinstance(b, ListTerm):
        if len(a.items) == len(b.items):
            yield from _unify_seq(list(zip(a.items, b.items)), state, ctx)
        return
    if isinstance(a, ArithExpr) and isinstance(b, ArithExpr):
        # Arithmetic terms are uninterpreted under equality: X+1 only
        # matches X+1, never 1+X and never an evaluated sum.
        if a.op == b.op and len(a.args) == len(b.args):
            yield from _unify_seq(list(zip(a.args, b.args)), state, ctx)
        return
    # Distinct constants, distinct atom/int kinds, arith vs literal: fail.
    return


def _unify_seq(pairs, state, ctx) -> Iterator[State]:
    if not pairs:
        yield state
        return
    x, y = pairs[0]
    for st in unify(x, y, state, ctx):
        yield from _unify_seq(pairs[1:], st, ctx)


def _prefer_right(a: Var, b: Var) -> bool:
    """Should the a := b direction be used for a var-var binding?

    System-generated variables are bound away so user variables survive
    into answers; two user variables bind left to right.
    """
    if is_fresh_name(a.name) and not is_fresh_name(b.name):
        return True
    if is_fresh_name(b.name) and not is_fresh_name(a.name):
        return False
    return True


def _unify_var(a, b, state, ctx) -> Iterator[State]:
    if isinstance(a, Var) and isinstance(b, Var):
        if _prefer_right(a, b):
            yield state.bind(a, b)
        else:
            yield state.bind(b, a)
        return
    if isinstance(b, Var):
        a, b = b, a
    # a is the variable, b the non-variable term.
    if isinstance(b, SetCons) and b.tail == a:
        if any(a in subterms(e) for e in b.elems):
            return
        absorbed = set_cons(b.elems, ctx.fresh())
        yield state.bind(a, absorbed)
        return
    if a in subterms(b):
        return
    yield state.bind(a, b)


def _unify_setlike(a, b, state, ctx) -> Iterator[State]:
    if isinstance(a, EmptySet):
        a, b = b, a

    if isinstance(b, EmptySet):
        if isinstance(a, EmptySet):
            yield state
        elif isinstance(a, Interval):
            yield from _empty_interval(a, state, ctx)
        elif isinstance(a, CartProd):
            yield from _empty_cartprod(a, state, ctx)
        # SetCons never equals the empty set: it contains its head.
        return

    if isinstance(a, SetCons) and isinstance(b, SetCons):
        yield from _unify_set_set(a, b, state, ctx)
        return

    if isinstance(a, SetCons) and isinstance(b, Interval):
        yield from _unify_set_interval(a, b, state, ctx)
        return
    if isinstance(a, Interval) and isinstance(b, SetCons):
        yield from _unify_set_interval(b, a, state, ctx)
        return

    if isinstance(a, SetCons) and isinstance(b, CartProd):
        yield from _unify_set_cartprod(a, b, state, ctx)
        return
    if isinstance(a, CartProd) and isinstance(b, SetCons):
        yield from _unify_set_cartprod(b, a, state, ctx)
        return

    if isinstance(a, Interval) and isinstance(b, Interval):
        yield from _unify_seq([(a.lo, b.lo), (a.hi, b.hi)], state, ctx)
        for st in _empty_interval(a, state, ctx):
            yield from _empty_interval(b, st, ctx)
        return

    if isinstance(a, Interval) and isinstance(b, CartProd):
        a, b = b, a
    if isinstance(a, CartProd) and isinstance(b, Interval):
        # An interval holds integers, a product holds pairs; they can
        # only coincide when both are empty.
        for st in _empty_cartprod(a, state, ctx):
            yield from _empty_interval(b, st, ctx)
        return

    if isinstance(a, CartProd) and isinstance(b, CartProd):
        yield from _unify_seq(
            [(a.left, b.left), (a.right, b.right)], state, ctx
        )
        return

    # Set term against a non-set tree term: no unifier.
    if isinstance(b, (Const, Int, TypedConst, ListTerm, ArithExpr)):
        return
    if isinstance(a, (Const, Int, TypedConst, ListTerm, ArithExpr)):
        return
    return


def _empty_interval(t: Interval, state, ctx) -> Iterator[State]:
    lo, hi = state.resolve(t.lo), state.resolve(t.hi)
    if isinstance(lo, Int) and isinstance(hi, Int):
        if lo.value > hi.value:
            yield state
        return
    yield state.push_pending(Atom(">", (lo, hi)))


def _empty_cartprod(t: CartProd, state, ctx) -> Iterator[State]:
    yield from unify(t.left, EMPTY, state, ctx)
    yield from unify(t.right, EMPTY, state, ctx)


def _unify_set_set(a: SetCons, b: SetCons, state, ctx) -> Iterator[State]:
    s = a.elems[0]
    rest_a = set_cons(a.elems[1:], a.tail)
    t = b.elems[0]
    rest_b = set_cons(b.elems[1:], b.tail)

    # (a) heads equal, remainders equal
    for st in unify(s, t, state, ctx):
        yield from unify(rest_a, rest_b, st, ctx)
    # (b) heads equal, the head recurs on the left
    for st in unify(s, t, state, ctx):
        yield from unify(a, rest_b, st, ctx)
    # (c) heads equal, the head recurs on the right
    for st in unify(s, t, state, ctx):
        yield from unify(rest_a, b, st, ctx)
    # (d) both remainders share a fresh rest
    n = ctx.fresh()
    for st in unify(rest_a, set_cons((t,), n), state, ctx):
        yield from unify(set_cons((s,), n), rest_b, st, ctx)


def _unify_set_interval(a: SetCons, b: Interval, state, ctx) -> Iterator[State]:
    expanded = expand_interval(
        Interval(state.resolve(b.lo), state.resolve(b.hi))
    )
    if expanded is not None:
        yield from _unify(a, expanded, state, ctx)
        return
    closed = _closed_elements(a)
    if closed is not None and all(isinstance(e, Int) for e in closed):
        values = sorted({e.value for e in closed})
        if not values:
            return
        if values != list(range(values[0], values[-1] + 1)):
            return
        yield from _unify_seq(
            [(b.lo, Int(values[0])), (b.hi, Int(values[-1]))], state, ctx
        )
        return
    yield state.add_store(Atom("=", (a, b)))


def _unify_set_cartprod(a: SetCons, b: CartProd, state, ctx) -> Iterator[State]:
    expanded = expand_cartprod(
        CartProd(state.resolve(b.left), state.resolve(b.right))
    )
    if expanded is not None:
        yield from _unify(a, expanded, state, ctx)
        return
    yield state.add_store(Atom("=", (a, b)))
