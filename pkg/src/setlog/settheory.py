"""Rewrite procedures for set and relational constraints.

Every constraint is either rewritten into simpler goals (pushed onto
the state's pending queue, with alternatives as separate yielded
states) or parked in the store as irreducible.  Irreducible atoms wake
up again when one of their variables is bound, so the store only ever
holds constraints that genuinely cannot make progress.

Rewriting is value-complete: for each yielded state, every assignment
satisfying its store satisfies the original constraint, and every
solution of the original constraint appears in some yielded state.
"""

from __future__ import annotations

from typing import Iterator

from .goals import Atom
from .state import State
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
    is_ground,
    pair,
    set_cons,
)
from .unify import expand_cartprod, expand_interval, unify
from . import intsolver

SET_LIKE = (SetCons, EmptySet, Interval, CartProd)


def _res(atom: Atom, state: State):
    return tuple(state.resolve(a) for a in atom.args)


def _norm(t, state):
    """Expand ground intervals and products to extensional sets."""
    if isinstance(t, Interval):
        e = expand_interval(Interval(state.resolve(t.lo), state.resolve(t.hi)))
        return t if e is None else e
    if isinstance(t, CartProd):
        e = expand_cartprod(
            CartProd(state.resolve(t.left), state.resolve(t.right)))
        return t if e is None else e
    return t


def _split(s: SetCons):
    return s.elems[0], set_cons(s.elems[1:], s.tail)


def eq(a, b) -> Atom:
    return Atom("=", (a, b))


FUNCTIONAL_RESULT = {
    "un": 3, "inters": 3, "diff": 3, "size": 2, "dom": 2, "ran": 2,
    "inv": 2, "comp": 3, "dres": 3, "dares": 3, "rres": 3, "rares": 3,
    "oplus": 3, "ring": 3, "img": 3, "apply": 3, "applyTo": 3,
}


def _store(atom: Atom, state: State, ctx) -> Iterator[State]:
    """Park an irreducible atom, merging functional duplicates.

    Two stored copies of a result-functional constraint with identical
    source arguments force their result arguments equal; this is what
    lets contradictions like dom(B,K) vs dom(B,K2), K neq K2 surface.
    """
    name = atom.name
    args = _res(atom, state)
    atom = Atom(name, args)
    if name in FUNCTIONAL_RESULT:
        sources, result = args[:-1], args[-1]
        for entry in state.store:
            if (isinstance(entry, Atom) and entry.name == name
                    and entry.args[:-1] == sources
                    and entry.args[-1] != result):
                yield state.push_pending(eq(result, entry.args[-1]))
                return
    yield state.add_store(atom)


# --- equality and disequality ----------------------------------------

def solve_eq(atom, state, ctx):
    a, b = _res(atom, state)
    yield from unify(a, b, state, ctx)


def _kind(t):
    if isinstance(t, Var):
        return "var"
    if isinstance(t, SET_LIKE):
        return "set"
    if isinstance(t, ListTerm):
        return "list"
    if isinstance(t, ArithExpr):
        return "arith"
    if isinstance(t, Int):
        return "int"
    if isinstance(t, TypedConst):
        return "tc"
    return "atom"


def _canon_ground(t):
    """Canonical value of a ground term, duplicates and order erased."""
    if isinstance(t, Const):
        return ("a", t.name)
    if isinstance(t, Int):
        return ("i", t.value)
    if isinstance(t, TypedConst):
        return ("tc", t.tag, t.value)
    if isinstance(t, ListTerm):
        return ("l", tuple(_canon_ground(x) for x in t.items))
    if isinstance(t, ArithExpr):
        return ("e", t.op, tuple(_canon_ground(x) for x in t.args))
    if isinstance(t, EmptySet):
        return ("s", frozenset())
    if isinstance(t, SetCons):
        base = _canon_ground(t.tail)
        elems = frozenset(_canon_ground(x) for x in t.elems)
        return ("s", elems | base[1])
    if isinstance(t, Interval):
        e = expand_interval(t)
        return _canon_ground(e)
    if isinstance(t, CartProd):
        e = expand_cartprod(t)
        return _canon_ground(e)
    raise ValueError("not ground: %r" % (t,))


def solve_neq(atom, state, ctx):
    a, b = _res(atom, state)
    if a == b:
        return
    ga, gb = is_ground(a), is_ground(b)
    if ga and gb:
        if _canon_ground(a) != _canon_ground(b):
            yield state
        return

    def int_sorted(t):
        if isinstance(t, Int):
            return True
        return isinstance(t, Var) and intsolver.is_int_var(state, t)

    if int_sorted(a) and int_sorted(b):
        yield from intsolver.solve_arith(Atom("neq", (a, b)), state, ctx)
        return
    if isinstance(a, Var) or isinstance(b, Var):
        yield from _store(atom, state, ctx)
        return
    ka, kb = _kind(a), _kind(b)
    if ka == "set" and kb == "set":
        # Two set terms differ exactly when one has an element the
        # other lacks.
        z = ctx.fresh()
        yield state.push_pending(Atom("in", (z, a)), Atom("nin", (z, b)))
        yield state.push_pending(Atom("in", (z, b)), Atom("nin", (z, a)))
        return
    if ka == "list" and kb == "list":
        if len(a.items) != len(b.items):
            yield state
            return
        for x, y in zip(a.items, b.items):
            yield state.push_pending(Atom("neq", (x, y)))
        return
    if ka == "arith" and kb == "arith":
        if a.op != b.op or len(a.args) != len(b.args):
            yield state
            return
        for x, y in zip(a.args, b.args):
            yield state.push_pending(Atom("neq", (x, y)))
        return
    if ka != kb:
        yield state
        return
    # Same kind, not ground, not composite: distinct constants already
    # failed the a == b test above, so this is unreachable for atoms.
    yield state


# --- membership ------------------------------------------------------

def solve_in(atom, state, ctx):
    x, s = _res(atom, state)
    if isinstance(s, Var):
        n = ctx.fresh()
        yield from unify(s, set_cons((x,), n), state, ctx)
        return
    if isinstance(s, EmptySet):
        return
    if isinstance(s, SetCons):
        t, rest = _split(s)
        for st in unify(x, t, state, ctx):
            yield st
        yield state.push_pending(Atom("in", (x, rest)))
        return
    if isinstance(s, Interval):
        if is_ground(x) and not isinstance(x, Int):
            return
        yield state.push_pending(
            Atom(">=", (x, s.lo)), Atom("=<", (x, s.hi)))
        return
    if isinstance(s, CartProd):
        if isinstance(x, Var):
            u, v = ctx.fresh(), ctx.fresh()
            for st in unify(x, pair(u, v), state, ctx):
                yield st.push_pending(
                    Atom("in", (u, s.left)), Atom("in", (v, s.right)))
            return
        if isinstance(x, ListTerm) and len(x.items) == 2:
            yield state.push_pending(
                Atom("in", (x.items[0], s.left)),
                Atom("in", (x.items[1], s.right)))
            return
        return
    # Membership in a non-set term has no solution.
    return


def solve_nin(atom, state, ctx):
    x, s = _res(atom, state)
    if isinstance(s, Var):
        yield from _store(Atom("nin", (x, s)), state, ctx)
        return
    if isinstance(s, EmptySet):
        yield state
        return
    if isinstance(s, SetCons):
        t, rest = _split(s)
        yield state.push_pending(Atom("neq", (x, t)), Atom("nin", (x, rest)))
        return
    if isinstance(s, Interval):
        if is_ground(x) and not isinstance(x, Int):
            yield state
            return
        if isinstance(x, Var) and not intsolver.is_int_var(state, x):
            yield from _store(Atom("nin", (x, s)), state, ctx)
            return
        yield state.push_pending(Atom("<", (x, s.lo)))
        yield state.push_pending(Atom(">", (x, s.hi)))
        return
    if isinstance(s, CartProd):
        if isinstance(x, ListTerm) and len(x.items) == 2:
            yield state.push_pending(Atom("nin", (x.items[0], s.left)))
            yield state.push_pending(Atom("nin", (x.items[1], s.right)))
            return
        if isinstance(x, Var):
            yield from _store(Atom("nin", (x, s)), state, ctx)
            return
        yield state
        return
    yield state


# --- set predicates --------------------------------------------------

def solve_set(atom, state, ctx):
    (x,) = _res(atom, state)
    if isinstance(x, Var):
        yield from _store(atom, state, ctx)
        return
    if isinstance(x, SET_LIKE):
        yield state


def solve_nset(atom, state, ctx):
    (x,) = _res(atom, state)
    if isinstance(x, Var):
        yield from _store(atom, state, ctx)
        return
    if isinstance(x, SET_LIKE):
        return
    yield state


def solve_npair(atom, state, ctx):
    (x,) = _res(atom, state)
    if isinstance(x, Var):
        yield from _store(atom, state, ctx)
        return
    if isinstance(x, ListTerm) and len(x.items) == 2:
        return
    yield state


# --- union, disjointness, inclusion ----------------------------------

def solve_un(atom, state, ctx):
    a, b, c = (_norm(t, state) for t in _res(atom, state))
    if isinstance(a, EmptySet):
        yield from unify(b, c, state, ctx)
        return
    if isinstance(b, EmptySet):
        yield from unify(a, c, state, ctx)
        return
    if isinstance(c, EmptySet):
        for st in unify(a, EMPTY, state, ctx):
            yield from unify(b, EMPTY, st, ctx)
        return
    if isinstance(a, SetCons):
        # {x|A1} ∪ B = C  becomes  C = {x|N} with N = A1 ∪ B.
        x, rest = _split(a)
        n = ctx.fresh()
        for st in unify(c, set_cons((x,), n), state, ctx):
            yield st.push_pending(Atom("un", (rest, b, n)))
        return
    if isinstance(b, SetCons):
        x, rest = _split(b)
        n = ctx.fresh()
        for st in unify(c, set_cons((x,), n), state, ctx):
            yield st.push_pending(Atom("un", (a, rest, n)))
        return
    if isinstance(c, SetCons):
        x, rest = _split(c)
        n1 = ctx.fresh()
        for st in unify(a, set_cons((x,), n1), state, ctx):
            yield st.push_pending(Atom("un", (n1, b, rest)))
        n2 = ctx.fresh()
        for st in unify(b, set_cons((x,), n2), state, ctx):
            yield st.push_pending(Atom("un", (a, n2, rest)))
        n3 = ctx.fresh()
        n4 = ctx.fresh()
        for st in unify(a, set_cons((x,), n3), state, ctx):
            for st2 in unify(b, set_cons((x,), n4), st, ctx):
                yield st2.push_pending(Atom("un", (n3, n4, rest)))
        return
    yield from _store(Atom("un", (a, b, c)), state, ctx)


def solve_disj(atom, state, ctx):
    a, b = (_norm(t, state) for t in _res(atom, state))
    if isinstance(a, EmptySet) or isinstance(b, EmptySet):
        yield state
        return
    if a == b:
        # A set disjoint from itself is empty.
        yield from unify(a, EMPTY, state, ctx)
        return
    if isinstance(a, SetCons):
        x, rest = _split(a)
        yield state.push_pending(Atom("nin", (x, b)), Atom("disj", (rest, b)))
        return
    if isinstance(b, SetCons):
        x, rest = _split(b)
        yield state.push_pending(Atom("nin", (x, a)), Atom("disj", (a, rest)))
        return
    yield from _store(Atom("disj", (a, b)), state, ctx)


def solve_subset(atom, state, ctx):
    a, b = (_norm(t, state) for t in _res(atom, state))
    if isinstance(a, EmptySet):
        yield state
        return
    if isinstance(b, EmptySet):
        yield from unify(a, EMPTY, state, ctx)
        return
    if isinstance(a, SetCons):
        x, rest = _split(a)
        yield state.push_pending(Atom("in", (x, b)), Atom("subset", (rest, b)))
        return
    if a == b:
        yield state
        return
    if isinstance(b, SetCons):
        yield state.push_pending(Atom("un", (a, b, b)))
        return
    yield from _store(Atom("subset", (a, b)), state, ctx)


def solve_ssubset(atom, state, ctx):
    a, b = _res(atom, state)
    yield state.push_pending(Atom("subset", (a, b)), Atom("neq", (a, b)))


def solve_inters(atom, state, ctx):
    a, b, c = (_norm(t, state) for t in _res(atom, state))
    if isinstance(a, EmptySet) or isinstance(b, EmptySet):
        yield from unify(c, EMPTY, state, ctx)
        return
    if a == b:
        yield from unify(c, a, state, ctx)
        return
    if all(isinstance(t, Var) for t in (a, b, c)):
        yield from _store(Atom("inters", (a, b, c)), state, ctx)
        return
    # A ∩ B = C  iff  A = C ∪ D1, B = C ∪ D2 with D1, D2 disjoint.
    d1, d2 = ctx.fresh(), ctx.fresh()
    yield state.push_pending(
        Atom("un", (c, d1, a)), Atom("un", (c, d2, b)),
        Atom("disj", (d1, d2)))


def solve_diff(atom, state, ctx):
    a, b, c = (_norm(t, state) for t in _res(atom, state))
    if isinstance(a, EmptySet):
        yield from unify(c, EMPTY, state, ctx)
        return
    if isinstance(b, EmptySet):
        yield from unify(c, a, state, ctx)
        return
    if a == b:
        yield from unify(c, EMPTY, state, ctx)
        return
    if all(isinstance(t, Var) for t in (a, b, c)):
        yield from _store(Atom("diff", (a, b, c)), state, ctx)
        return
    # A \ B = C  iff  A = C ∪ D, C ∩ B = ∅, D ⊆ B.
    d = ctx.fresh()
    yield state.push_pending(
        Atom("un", (c, d, a)), Atom("disj", (c, b)), Atom("subset", (d, b)))


# --- cardinality -----------------------------------------------------

def solve_size(atom, state, ctx):
    a, n = _res(atom, state)
    a = _norm(a, state)
    if not isinstance(n, (Var, Int)):
        # The second argument must be an integer or a variable; a
        # compound expression is rejected outright.
        return
    if isinstance(a, EmptySet):
        yield from unify(n, Int(0), state, ctx)
        return
    if isinstance(a, SetCons):
        x, rest = _split(a)
        yield state.push_pending(Atom("in", (x, rest)), Atom("size", (rest, n)))
        m = ctx.fresh()
        yield state.push_pending(
            Atom("nin", (x, rest)), Atom("size", (rest, m)),
            Atom("is", (n, ArithExpr("+", (m, Int(1))))))
        return
    if isinstance(a, Interval):
        yield state.push_pending(
            Atom("=<", (a.lo, a.hi)),
            Atom("is", (n, ArithExpr("+", (ArithExpr("-", (a.hi, a.lo)), Int(1))))))
        for st in unify(n, Int(0), state, ctx):
            yield st.push_pending(Atom(">", (a.lo, a.hi)))
        return
    if isinstance(a, Var):
        if isinstance(n, Int):
            if n.value < 0:
                return
            if n.value == 0:
                yield from unify(a, EMPTY, state, ctx)
                return
            fresh = [ctx.fresh() for _ in range(n.value)]
            neqs = [Atom("neq", (fresh[i], fresh[j]))
                    for i in range(len(fresh)) for j in range(i + 1, len(fresh))]
            for st in unify(a, set_cons(tuple(fresh), EMPTY), state, ctx):
                yield st.push_pending(*neqs)
            return
        for st in _store(Atom("size", (a, n)), state, ctx):
            yield st.push_pending(Atom(">=", (n, Int(0))))
        return
    yield from _store(Atom("size", (a, n)), state, ctx)


# --- binary relations ------------------------------------------------

def _pairify(p, state, ctx):
    """States in which p is the pair [x, y]; yields (state, x, y)."""
    p = state.resolve(p)
    if isinstance(p, ListTerm) and len(p.items) == 2:
        yield state, p.items[0], p.items[1]
        return
    if isinstance(p, Var):
        x, y = ctx.fresh(), ctx.fresh()
        for st in unify(p, pair(x, y), state, ctx):
            yield st, x, y
        return
    # A non-pair element ends the relational reading.
    return


def solve_rel(atom, state, ctx):
    (r,) = _res(atom, state)
    r = _norm(r, state)
    if isinstance(r, Var):
        yield from _store(atom, state, ctx)
        return
    if isinstance(r, EmptySet):
        yield state
        return
    if isinstance(r, CartProd):
        yield state
        return
    if isinstance(r, Interval):
        yield state.push_pending(Atom(">", (r.lo, r.hi)))
        return
    if isinstance(r, SetCons):
        p, rest = _split(r)
        for st, _x, _y in _pairify(p, state, ctx):
            yield st.push_pending(Atom("rel", (rest,)))
        return
    return


def solve_nrel(atom, state, ctx):
    (r,) = _res(atom, state)
    if not isinstance(r, (Var,) + SET_LIKE):
        yield state
        return
    z = ctx.fresh()
    yield state.push_pending(Atom("in", (z, r)), Atom("npair", (z,)))


def solve_comppf(atom, state, ctx):
    """x maps only to y in f: every pair of f keyed by x carries y.

    Recurses on the element spine of f and never instantiates the
    tail, so a stored comppf cannot re-trigger itself.
    """
    x, y, f = _res(atom, state)
    f = _norm(f, state)
    if isinstance(f, Var):
        yield from _store(Atom("comppf", (x, y, f)), state, ctx)
        return
    if isinstance(f, EmptySet):
        yield state
        return
    if isinstance(f, SetCons):
        p, rest = _split(f)
        for st, u, v in _pairify(p, state, ctx):
            for st2 in unify(u, x, st, ctx):
                for st3 in unify(v, y, st2, ctx):
                    yield st3.push_pending(Atom("comppf", (x, y, rest)))
            yield st.push_pending(
                Atom("neq", (u, x)), Atom("comppf", (x, y, rest)))
        return
    if isinstance(f, CartProd):
        yield state.push_pending(Atom("nin", (x, f.left)))
        yield state.push_pending(
            Atom("in", (x, f.left)),
            Atom("subset", (f.right, set_cons((y,), EMPTY))))
        return
    # Intervals and other non-relations hold no pairs at all.
    yield state


def solve_pfun(atom, state, ctx):
    (f,) = _res(atom, state)
    f = _norm(f, state)
    if isinstance(f, Var):
        yield from _store(atom, state, ctx)
        return
    if isinstance(f, EmptySet):
        yield state
        return
    if isinstance(f, CartProd):
        yield from unify(f.left, EMPTY, state, ctx)
        yield from unify(f.right, EMPTY, state, ctx)
        y = ctx.fresh()
        yield from unify(f.right, set_cons((y,), EMPTY), state, ctx)
        return
    if isinstance(f, Interval):
        yield state.push_pending(Atom(">", (f.lo, f.hi)))
        return
    if isinstance(f, SetCons):
        p, rest = _split(f)
        for st, x, y in _pairify(p, state, ctx):
            yield st.push_pending(
                Atom("comppf", (x, y, rest)),
                Atom("pfun", (rest,)))
        return
    return


def solve_npfun(atom, state, ctx):
    (f,) = _res(atom, state)
    if not isinstance(f, (Var,) + SET_LIKE):
        yield state
        return
    x, y1, y2, n = (ctx.fresh() for _ in range(4))
    shape = set_cons((pair(x, y1), pair(x, y2)), n)
    for st in unify(f, shape, state, ctx):
        yield st.push_pending(Atom("neq", (y1, y2)))


def solve_dom(atom, state, ctx):
    r, a = (_norm(t, state) for t in _res(atom, state))
    if isinstance(r, EmptySet):
        yield from unify(a, EMPTY, state, ctx)
        return
    if isinstance(a, EmptySet):
        yield from unify(r, EMPTY, state, ctx)
        return
    if isinstance(r, SetCons):
        p, rest = _split(r)
        for st, x, _y in _pairify(p, state, ctx):
            n = ctx.fresh()
            for st2 in unify(a, set_cons((x,), n), st, ctx):
                yield st2.push_pending(Atom("dom", (rest, n)))
        return
    if isinstance(r, CartProd):
        z = ctx.fresh()
        for st in unify(a, r.left, state, ctx):
            yield st.push_pending(Atom("in", (z, r.right)))
        for st in unify(a, EMPTY, state, ctx):
            yield from unify(r.right, EMPTY, st, ctx)
        return
    # A variable relation stays irreducible: every set is the domain
    # of some relation, and instantiating here loops when another
    # constraint keeps feeding pairs back (duplicate keys are legal).
    yield from _store(Atom("dom", (r, a)), state, ctx)


def solve_ran(atom, state, ctx):
    r, b = (_norm(t, state) for t in _res(atom, state))
    if isinstance(r, EmptySet):
        yield from unify(b, EMPTY, state, ctx)
        return
    if isinstance(b, EmptySet):
        yield from unify(r, EMPTY, state, ctx)
        return
    if isinstance(r, SetCons):
        p, rest = _split(r)
        for st, _x, y in _pairify(p, state, ctx):
            n = ctx.fresh()
            for st2 in unify(b, set_cons((y,), n), st, ctx):
                yield st2.push_pending(Atom("ran", (rest, n)))
        return
    if isinstance(r, CartProd):
        z = ctx.fresh()
        for st in unify(b, r.right, state, ctx):
            yield st.push_pending(Atom("in", (z, r.left)))
        for st in unify(b, EMPTY, state, ctx):
            yield from unify(r.left, EMPTY, st, ctx)
        return
    # Same as dom: a variable relation is irreducible here.
    yield from _store(Atom("ran", (r, b)), state, ctx)


def solve_inv(atom, state, ctx):
    r, s = (_norm(t, state) for t in _res(atom, state))
    if isinstance(r, EmptySet):
        yield from unify(s, EMPTY, state, ctx)
        return
    if isinstance(s, EmptySet):
        yield from unify(r, EMPTY, state, ctx)
        return
    if isinstance(r, CartProd):
        yield from unify(s, CartProd(r.right, r.left), state, ctx)
        return
    if isinstance(r, SetCons):
        p, rest = _split(r)
        for st, x, y in _pairify(p, state, ctx):
            n = ctx.fresh()
            for st2 in unify(s, set_cons((pair(y, x),), n), st, ctx):
                yield st2.push_pending(Atom("inv", (rest, n)))
        return
    if isinstance(s, (SetCons, CartProd)):
        # R and S swap roles: inv is an involution.
        yield state.push_pending(Atom("inv", (s, r)))
        return
    yield from _store(Atom("inv", (r, s)), state, ctx)


def solve_comp(atom, state, ctx):
    r, s, t = (_norm(x, state) for x in _res(atom, state))
    if isinstance(r, EmptySet) or isinstance(s, EmptySet):
        yield from unify(t, EMPTY, state, ctx)
        return
    if isinstance(r, Interval) or isinstance(s, Interval):
        # A non-empty interval holds integers, which never compose.
        yield from unify(t, EMPTY, state, ctx)
        return
    if isinstance(r, SetCons) and not _is_singleton(r):
        p, rest = _split(r)
        for st, x, y in _pairify(p, state, ctx):
            t1, t2 = ctx.fresh(), ctx.fresh()
            yield st.push_pending(
                Atom("comp", (set_cons((pair(x, y),), EMPTY), s, t1)),
                Atom("comp", (rest, s, t2)),
                Atom("un", (t1, t2, t)))
        return
    if isinstance(r, SetCons) and isinstance(s, SetCons):
        yield from _comp_single_cons(r, s, t, state, ctx)
        return
    if isinstance(r, SetCons):
        yield from _comp_single_left(r, s, t, state, ctx)
        return
    if isinstance(s, SetCons) and not _is_singleton(s):
        q, rest = _split(s)
        for st, u, v in _pairify(q, state, ctx):
            t1, t2 = ctx.fresh(), ctx.fresh()
            yield st.push_pending(
                Atom("comp", (r, set_cons((pair(u, v),), EMPTY), t1)),
                Atom("comp", (r, rest, t2)),
                Atom("un", (t1, t2, t)))
        return
    if isinstance(s, SetCons):
        yield from _comp_single_right(r, s, t, state, ctx)
        return
    # Both R and S are variables (or opaque products).
    if isinstance(t, SetCons):
        p, rest = _split(t)
        for st, a, c in _pairify(p, state, ctx):
            b = ctx.fresh()
            yield st.push_pending(
                Atom("in", (pair(a, b), r)),
                Atom("in", (pair(b, c), s)),
                Atom("comp", (r, s, t)))
        return
    yield from _store(Atom("comp", (r, s, t)), state, ctx)


def _is_singleton(s: SetCons) -> bool:
    return len(s.elems) == 1 and isinstance(s.tail, EmptySet)


def _comp_single_cons(r, s, t, state, ctx):
    """comp({[X,Y]}, {[U,V]|S1}, T): the head pair of S either chains
    with [X,Y] and contributes [X,V] to T, or it does not chain."""
    for st, x, y in _pairify(r.elems[0], state, ctx):
        single = set_cons((pair(x, y),), EMPTY)
        q, srest = _split(s)
        for st2, u, v in _pairify(q, st, ctx):
            for st3 in unify(y, u, st2, ctx):
                n = ctx.fresh()
                yield st3.push_pending(
                    Atom("comp", (single, srest, n)),
                    Atom("un", (set_cons((pair(x, v),), EMPTY), n, t)))
            yield st2.push_pending(
                Atom("neq", (y, u)),
                Atom("comp", (single, srest, t)))


def _comp_single_left(r, s, t, state, ctx):
    """comp({[A,B]}, S, T) with S a variable or opaque term."""
    for st, a, b in _pairify(r.elems[0], state, ctx):
        single = set_cons((pair(a, b),), EMPTY)
        if isinstance(t, SetCons):
            p, _rest = _split(t)
            c = ctx.fresh()
            for st2 in unify(p, pair(a, c), st, ctx):
                s1, n = ctx.fresh(), ctx.fresh()
                yield st2.push_pending(
                    eq(s, set_cons((pair(b, c),), s1)),
                    Atom("comp", (single, s1, n)),
                    Atom("un", (set_cons((pair(a, c),), EMPTY), n, t)))
            return
        yield from _store(Atom("comp", (single, s, t)), st, ctx)
        return


def _comp_single_right(r, s, t, state, ctx):
    """comp(R, {[U,V]}, T) with R a variable or opaque term."""
    for st, u, v in _pairify(s.elems[0], state, ctx):
        single = set_cons((pair(u, v),), EMPTY)
        if isinstance(t, SetCons):
            p, _rest = _split(t)
            a = ctx.fresh()
            for st2 in unify(p, pair(a, v), st, ctx):
                r1, n = ctx.fresh(), ctx.fresh()
                yield st2.push_pending(
                    eq(r, set_cons((pair(a, u),), r1)),
                    Atom("comp", (r1, single, n)),
                    Atom("un", (set_cons((pair(a, v),), EMPTY), n, t)))
            return
        yield from _store(Atom("comp", (r, single, t)), st, ctx)
        return


def solve_dres(atom, state, ctx):
    a, r, s = (_norm(t, state) for t in _res(atom, state))
    if isinstance(a, EmptySet) or isinstance(r, EmptySet):
        yield from unify(s, EMPTY, state, ctx)
        return
    if isinstance(r, SetCons):
        p, rest = _split(r)
        for st, x, y in _pairify(p, state, ctx):
            n = ctx.fresh()
            for st2 in unify(s, set_cons((pair(x, y),), n), st, ctx):
                yield st2.push_pending(
                    Atom("in", (x, a)), Atom("dres", (a, rest, n)))
            yield st.push_pending(
                Atom("nin", (x, a)), Atom("dres", (a, rest, s)))
        return
    if isinstance(r, Var) and isinstance(s, SetCons):
        p, _rest = _split(s)
        for st, x, y in _pairify(p, state, ctx):
            r1, n = ctx.fresh(), ctx.fresh()
            yield st.push_pending(
                Atom("in", (x, a)),
                eq(r, set_cons((pair(x, y),), r1)),
                Atom("dres", (a, r1, n)),
                Atom("un", (set_cons((pair(x, y),), EMPTY), n, s)))
        return
    yield from _store(Atom("dres", (a, r, s)), state, ctx)


def solve_dares(atom, state, ctx):
    a, r, s = (_norm(t, state) for t in _res(atom, state))
    if isinstance(r, EmptySet):
        yield from unify(s, EMPTY, state, ctx)
        return
    if isinstance(a, EmptySet):
        yield from unify(r, s, state, ctx)
        return
    if isinstance(r, SetCons):
        p, rest = _split(r)
        for st, x, y in _pairify(p, state, ctx):
            n = ctx.fresh()
            for st2 in unify(s, set_cons((pair(x, y),), n), st, ctx):
                yield st2.push_pending(
                    Atom("nin", (x, a)), Atom("dares", (a, rest, n)))
            yield st.push_pending(
                Atom("in", (x, a)), Atom("dares", (a, rest, s)))
        return
    if isinstance(r, Var) and isinstance(s, SetCons):
        p, _rest = _split(s)
        for st, x, y in _pairify(p, state, ctx):
            r1, n = ctx.fresh(), ctx.fresh()
            yield st.push_pending(
                Atom("nin", (x, a)),
                eq(r, set_cons((pair(x, y),), r1)),
                Atom("dares", (a, r1, n)),
                Atom("un", (set_cons((pair(x, y),), EMPTY), n, s)))
        return
    yield from _store(Atom("dares", (a, r, s)), state, ctx)


def solve_rres(atom, state, ctx):
    r, b, s = (_norm(t, state) for t in _res(atom, state))
    if isinstance(r, EmptySet) or isinstance(b, EmptySet):
        yield from unify(s, EMPTY, state, ctx)
        return
    if isinstance(r, SetCons):
        p, rest = _split(r)
        for st, x, y in _pairify(p, state, ctx):
            n = ctx.fresh()
            for st2 in unify(s, set_cons((pair(x, y),), n), st, ctx):
                yield st2.push_pending(
                    Atom("in", (y, b)), Atom("rres", (rest, b, n)))
            yield st.push_pending(
                Atom("nin", (y, b)), Atom("rres", (rest, b, s)))
        return
    if isinstance(r, Var) and isinstance(s, SetCons):
        p, _rest = _split(s)
        for st, x, y in _pairify(p, state, ctx):
            r1, n = ctx.fresh(), ctx.fresh()
            yield st.push_pending(
                Atom("in", (y, b)),
                eq(r, set_cons((pair(x, y),), r1)),
                Atom("rres", (r1, b, n)),
                Atom("un", (set_cons((pair(x, y),), EMPTY), n, s)))
        return
    yield from _store(Atom("rres", (r, b, s)), state, ctx)


def solve_rares(atom, state, ctx):
    r, b, s = (_norm(t, state) for t in _res(atom, state))
    if isinstance(r, EmptySet):
        yield from unify(s, EMPTY, state, ctx)
        return
    if isinstance(b, EmptySet):
        yield from unify(r, s, state, ctx)
        return
    if isinstance(r, SetCons):
        p, rest = _split(r)
        for st, x, y in _pairify(p, state, ctx):
            n = ctx.fresh()
            for st2 in unify(s, set_cons((pair(x, y),), n), st, ctx):
                yield st2.push_pending(
                    Atom("nin", (y, b)), Atom("rares", (rest, b, n)))
            yield st.push_pending(
                Atom("in", (y, b)), Atom("rares", (rest, b, s)))
        return
    if isinstance(r, Var) and isinstance(s, SetCons):
        p, _rest = _split(s)
        for st, x, y in _pairify(p, state, ctx):
            r1, n = ctx.fresh(), ctx.fresh()
            yield st.push_pending(
                Atom("nin", (y, b)),
                eq(r, set_cons((pair(x, y),), r1)),
                Atom("rares", (r1, b, n)),
                Atom("un", (set_cons((pair(x, y),), EMPTY), n, s)))
        return
    yield from _store(Atom("rares", (r, b, s)), state, ctx)


def solve_oplus(atom, state, ctx):
    r, s, t = _res(atom, state)
    if all(isinstance(x, Var) for x in (r, s, t)):
        yield from _store(atom, state, ctx)
        return
    # R ⊕ S = S ∪ (dom(S) anti-restricted from R).
    d, e = ctx.fresh(), ctx.fresh()
    yield state.push_pending(
        Atom("dom", (s, d)), Atom("dares", (d, r, e)), Atom("un", (s, e, t)))


def solve_ring(atom, state, ctx):
    r, a, b = _res(atom, state)
    if all(isinstance(x, Var) for x in (r, a, b)):
        yield from _store(atom, state, ctx)
        return
    # The image R[A] is the range of A ◁ R.
    d = ctx.fresh()
    yield state.push_pending(Atom("dres", (a, r, d)), Atom("ran", (d, b)))


def solve_apply(atom, state, ctx):
    f, x, y = _res(atom, state)
    g = ctx.fresh()
    p = pair(x, y)
    for st in unify(f, set_cons((p,), g), state, ctx):
        yield st.push_pending(
            Atom("nin", (p, g)),
            Atom("comp", (set_cons((pair(x, x),), EMPTY), g, EMPTY)))


def solve_napply(atom, state, ctx):
    f, x, y = _res(atom, state)
    if not isinstance(f, (Var,) + SET_LIKE):
        yield state
        return
    d = ctx.fresh()
    yield state.push_pending(Atom("dom", (f, d)), Atom("nin", (x, d)))
    y1, g = ctx.fresh(), ctx.fresh()
    for st in unify(f, set_cons((pair(x, y1),), g), state, ctx):
        yield st.push_pending(
            Atom("neq", (y1, y)),
            Atom("comp", (set_cons((pair(x, x),), EMPTY), g, EMPTY)))
    y2, y3, g2 = ctx.fresh(), ctx.fresh(), ctx.fresh()
    for st in unify(f, set_cons((pair(x, y2), pair(x, y3)), g2), state, ctx):
        yield st.push_pending(Atom("neq", (y2, y3)))


def _negation_by_witness(pos_name):
    """The negation of a result-functional constraint: compute the true
    result into a fresh variable and require it to differ."""
    def solve(atom, state, ctx):
        args = _res(atom, state)
        n = ctx.fresh()
        yield state.push_pending(
            Atom(pos_name, args[:-1] + (n,)), Atom("neq", (n, args[-1])))
    return solve


def solve_ndisj(atom, state, ctx):
    a, b = _res(atom, state)
    z = ctx.fresh()
    yield state.push_pending(Atom("in", (z, a)), Atom("in", (z, b)))


def solve_nsubset(atom, state, ctx):
    a, b = _res(atom, state)
    z = ctx.fresh()
    yield state.push_pending(Atom("in", (z, a)), Atom("nin", (z, b)))


REGISTRY = {
    "=": (2, solve_eq),
    "neq": (2, solve_neq),
    "in": (2, solve_in),
    "nin": (2, solve_nin),
    "set": (1, solve_set),
    "nset": (1, solve_nset),
    "npair": (1, solve_npair),
    "un": (3, solve_un),
    "nun": (3, _negation_by_witness("un")),
    "disj": (2, solve_disj),
    "ndisj": (2, solve_ndisj),
    "subset": (2, solve_subset),
    "nsubset": (2, solve_nsubset),
    "ssubset": (2, solve_ssubset),
    "inters": (3, solve_inters),
    "ninters": (3, _negation_by_witness("inters")),
    "diff": (3, solve_diff),
    "ndiff": (3, _negation_by_witness("diff")),
    "size": (2, solve_size),
    "rel": (1, solve_rel),
    "nrel": (1, solve_nrel),
    "pfun": (1, solve_pfun),
    "npfun": (1, solve_npfun),
    "comppf": (3, solve_comppf),
    "dom": (2, solve_dom),
    "ndom": (2, _negation_by_witness("dom")),
    "ran": (2, solve_ran),
    "nran": (2, _negation_by_witness("ran")),
    "inv": (2, solve_inv),
    "ninv": (2, _negation_by_witness("inv")),
    "comp": (3, solve_comp),
    "ncomp": (3, _negation_by_witness("comp")),
    "dres": (3, solve_dres),
    "ndres": (3, _negation_by_witness("dres")),
    "dares": (3, solve_dares),
    "ndares": (3, _negation_by_witness("dares")),
    "rres": (3, solve_rres),
    "nrres": (3, _negation_by_witness("rres")),
    "rares": (3, solve_rares),
    "nrares": (3, _negation_by_witness("rares")),
    "oplus": (3, solve_oplus),
    "noplus": (3, _negation_by_witness("oplus")),
    "ring": (3, solve_ring),
    "img": (3, solve_ring),
    "nring": (3, _negation_by_witness("ring")),
    "nimg": (3, _negation_by_witness("ring")),
    "apply": (3, solve_apply),
    "applyTo": (3, solve_apply),
    "napply": (3, solve_napply),
}

ARITH_ATOM_NAMES = {"is", "=<", "<", ">=", ">"}
