"""Brute-force reference semantics used only by the test suite.

Everything here evaluates goals by enumerating ground values over a
small finite universe, straight from the constraint denotations.  It
deliberately shares nothing with the solving machinery beyond the term
and goal datatypes, so kernel bugs cannot hide in shared helpers.

Ground values are canonical hashable tuples: ('atom', a), ('int', n),
('tc', tag, v), ('pair', v1, ..., vn), ('set', frozenset), and
('arith', op, l, r) for uninterpreted arithmetic syntax (equality over
sets and = / neq compare arithmetic terms syntactically; only is and
the order predicates interpret them).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .goals import (
    And, Atom, Foreach, Goal, Implies, Neg, Or, goal_vars,
)
from .terms import (
    ArithExpr, CartProd, Const, EmptySet, Int, Interval, ListTerm,
    SetCons, TypedConst, Var, set_from,
)


class OracleUnsupported(Exception):
    """The goal falls outside the brute-force fragment."""


class UniverseTooLarge(Exception):
    pass


# --- ground values ----------------------------------------------------------

def ground_value(t, env=None):
    """Canonical value of a term; env supplies variable values."""
    if isinstance(t, Var):
        if env is None or t.name not in env:
            raise OracleUnsupported(f"unbound variable {t.name}")
        return env[t.name]
    if isinstance(t, Const):
        return ("atom", t.name)
    if isinstance(t, Int):
        return ("int", t.value)
    if isinstance(t, TypedConst):
        return ("tc", t.tag, t.value)
    if isinstance(t, ListTerm):
        return ("pair",) + tuple(ground_value(x, env) for x in t.items)
    if isinstance(t, EmptySet):
        return ("set", frozenset())
    if isinstance(t, SetCons):
        tail = ground_value(t.tail, env)
        if tail[0] != "set":
            raise OracleUnsupported("set tail is not a set")
        elems = frozenset(ground_value(x, env) for x in t.elems)
        return ("set", elems | tail[1])
    if isinstance(t, Interval):
        lo = ground_value(t.lo, env)
        hi = ground_value(t.hi, env)
        if lo[0] != "int" or hi[0] != "int":
            raise OracleUnsupported("interval bounds must be integers")
        return ("set", frozenset(("int", k) for k in range(lo[1], hi[1] + 1)))
    if isinstance(t, CartProd):
        a = ground_value(t.left, env)
        b = ground_value(t.right, env)
        if a[0] != "set" or b[0] != "set":
            raise OracleUnsupported("cp of non-sets")
        return ("set", frozenset(("pair", x, y) for x in a[1] for y in b[1]))
    if isinstance(t, ArithExpr):
        return ("arith", t.op) + tuple(ground_value(x, env) for x in t.args)
    raise OracleUnsupported(f"cannot evaluate {t!r}")


def value_to_term(v):
    kind = v[0]
    if kind == "atom":
        return Const(v[1])
    if kind == "int":
        return Int(v[1])
    if kind == "tc":
        return TypedConst(v[1], v[2])
    if kind == "pair":
        return ListTerm(tuple(value_to_term(x) for x in v[1:]))
    if kind == "set":
        return set_from(sorted((value_to_term(x) for x in v[1]),
                               key=lambda t: repr(t)))
    raise OracleUnsupported(f"cannot rebuild {v!r}")


def _num(v):
    """Numeric value of an interpreted arithmetic term, or None."""
    if v[0] == "int":
        return v[1]
    if v[0] == "arith":
        left, right = _num(v[2]), _num(v[3])
        if left is None or right is None:
            return None
        op = v[1]
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "div":
            return None if right == 0 else left // right
        if op == "mod":
            return None if right == 0 else left % right
    return None


def _is_set(v):
    return v[0] == "set"


def _is_pair(v):
    return v[0] == "pair" and len(v) == 3


def _as_rel(v):
    if not _is_set(v) or not all(_is_pair(x) for x in v[1]):
        return None
    return v[1]


# --- constraint denotations -------------------------------------------------

def _dom(rel):
    return frozenset(p[1] for p in rel)


def _ran(rel):
    return frozenset(p[2] for p in rel)


def _comp(r, s):
    return frozenset(("pair", p[1], q[2])
                     for p in r for q in s if p[2] == q[1])


def _apply_holds(f, x, y):
    matching = [p for p in f if p[1] == x]
    return len(matching) == 1 and matching[0][2] == y


def eval_constraint(name, vals):
    """Truth of one ground registry constraint."""
    if name == "true":
        return True
    if name == "dec":
        return True
    if name == "=":
        return vals[0] == vals[1]
    if name == "neq":
        return vals[0] != vals[1]
    if name == "set":
        return _is_set(vals[0])
    if name == "in":
        return _is_set(vals[1]) and vals[0] in vals[1][1]
    if name == "nin":
        return _is_set(vals[1]) and vals[0] not in vals[1][1]
    if name in ("un", "nun"):
        srcs = _is_set(vals[0]) and _is_set(vals[1])
        ok = srcs and _is_set(vals[2]) and vals[2][1] == vals[0][1] | vals[1][1]
        return ok if name == "un" else (srcs and not ok)
    if name in ("inters", "ninters"):
        srcs = _is_set(vals[0]) and _is_set(vals[1])
        ok = srcs and _is_set(vals[2]) and vals[2][1] == vals[0][1] & vals[1][1]
        return ok if name == "inters" else (srcs and not ok)
    if name in ("diff", "ndiff"):
        srcs = _is_set(vals[0]) and _is_set(vals[1])
        ok = srcs and _is_set(vals[2]) and vals[2][1] == vals[0][1] - vals[1][1]
        return ok if name == "diff" else (srcs and not ok)
    if name in ("subset", "nsubset"):
        ok = all(map(_is_set, vals)) and vals[0][1] <= vals[1][1]
        return ok if name == "subset" else (all(map(_is_set, vals)) and not ok)
    if name == "ssubset":
        return all(map(_is_set, vals)) and vals[0][1] < vals[1][1]
    if name in ("disj", "ndisj"):
        ok = all(map(_is_set, vals)) and not (vals[0][1] & vals[1][1])
        return ok if name == "disj" else (all(map(_is_set, vals)) and not ok)
    if name == "size":
        n = _num(vals[1])
        return _is_set(vals[0]) and n is not None and len(vals[0][1]) == n
    if name in ("rel", "nrel"):
        ok = _as_rel(vals[0]) is not None
        return ok if name == "rel" else (_is_set(vals[0]) and not ok)
    if name in ("pfun", "npfun"):
        r = _as_rel(vals[0])
        if name == "pfun":
            return r is not None and len(_dom(r)) == len(r)
        # witness form: two pairs sharing a first component
        if not _is_set(vals[0]):
            return False
        ps = [x for x in vals[0][1] if _is_pair(x)]
        return any(p[1] == q[1] and p[2] != q[2] for p in ps for q in ps)
    if name in ("dom", "ndom"):
        r = _as_rel(vals[0])
        ok = r is not None and _is_set(vals[1]) and vals[1][1] == _dom(r)
        return ok if name == "dom" else (r is not None and not ok)
    if name in ("ran", "nran"):
        r = _as_rel(vals[0])
        ok = r is not None and _is_set(vals[1]) and vals[1][1] == _ran(r)
        return ok if name == "ran" else (r is not None and not ok)
    if name in ("inv", "ninv"):
        r = _as_rel(vals[0])
        s = _as_rel(vals[1])
        ok = (r is not None and s is not None
              and s == frozenset(("pair", p[2], p[1]) for p in r))
        return ok if name == "inv" else (r is not None and not ok)
    if name in ("comp", "ncomp"):
        r = _as_rel(vals[0])
        s = _as_rel(vals[1])
        srcs = r is not None and s is not None
        ok = srcs and _is_set(vals[2]) and vals[2][1] == _comp(r, s)
        return ok if name == "comp" else (srcs and not ok)
    if name in ("dres", "ndres", "dares", "ndares"):
        a, rv, sv = vals
        r = _as_rel(rv)
        srcs = r is not None and _is_set(a)
        if not srcs:
            return False
        if name in ("dres", "ndres"):
            expect = frozenset(p for p in r if p[1] in a[1])
        else:
            expect = frozenset(p for p in r if p[1] not in a[1])
        ok = _is_set(sv) and sv[1] == expect
        return ok if not name.startswith("n") else not ok
    if name in ("rres", "nrres", "rares", "nrares"):
        rv, a, sv = vals
        r = _as_rel(rv)
        srcs = r is not None and _is_set(a)
        if not srcs:
            return False
        if name in ("rres", "nrres"):
            expect = frozenset(p for p in r if p[2] in a[1])
        else:
            expect = frozenset(p for p in r if p[2] not in a[1])
        ok = _is_set(sv) and sv[1] == expect
        return ok if not name.startswith("n") else not ok
    if name in ("oplus", "noplus"):
        r = _as_rel(vals[0])
        s = _as_rel(vals[1])
        if r is None or s is None:
            return False
        doms = _dom(s)
        expect = frozenset(p for p in r if p[1] not in doms) | s
        ok = _is_set(vals[2]) and vals[2][1] == expect
        return ok if name == "oplus" else not ok
    if name in ("ring", "nring", "img", "nimg"):
        r = _as_rel(vals[0])
        if r is None or not _is_set(vals[1]):
            return False
        expect = frozenset(p[2] for p in r if p[1] in vals[1][1])
        ok = _is_set(vals[2]) and vals[2][1] == expect
        return ok if not name.startswith("n") else not ok
    if name in ("apply", "applyTo", "napply"):
        r = _as_rel(vals[0])
        if r is None:
            return False
        ok = _apply_holds(r, vals[1], vals[2])
        return ok if name != "napply" else not ok
    if name == "is":
        left, right = _num(vals[0]), _num(vals[1])
        return left is not None and left == right
    if name in ("=<", "<", ">=", ">"):
        left, right = _num(vals[0]), _num(vals[1])
        if left is None or right is None:
            return False
        return {"=<": left <= right, "<": left < right,
                ">=": left >= right, ">": left > right}[name]
    raise OracleUnsupported(f"no denotation for {name}")


NEGATION_OF = {
    "=": "neq", "in": "nin", "un": "nun", "inters": "ninters",
    "diff": "ndiff", "subset": "nsubset", "disj": "ndisj",
    "rel": "nrel", "pfun": "npfun", "dom": "ndom", "ran": "nran",
    "inv": "ninv", "comp": "ncomp", "dres": "ndres", "dares": "ndares",
    "rres": "nrres", "rares": "nrares", "oplus": "noplus",
    "ring": "nring", "apply": "napply",
}


# --- goal evaluation --------------------------------------------------------

def _match_pattern(pattern, value, env):
    """Extend env so pattern denotes value, or return None."""
    if isinstance(pattern, Var):
        new = dict(env)
        new[pattern.name] = value
        return new
    if isinstance(pattern, ListTerm):
        if value[0] != "pair" or len(value) - 1 != len(pattern.items):
            return None
        for item, sub in zip(pattern.items, value[1:]):
            env = _match_pattern(item, sub, env)
            if env is None:
                return None
        return env
    try:
        return env if ground_value(pattern, env) == value else None
    except OracleUnsupported:
        return None


def eval_goal(g: Goal, env) -> bool:
    """Classical truth of a ground-instantiated goal."""
    if isinstance(g, Atom):
        if g.name == "dec":
            return True
        vals = [ground_value(a, env) for a in g.args]
        return eval_constraint(g.name, vals)
    if isinstance(g, And):
        return eval_goal(g.left, env) and eval_goal(g.right, env)
    if isinstance(g, Or):
        return eval_goal(g.left, env) or eval_goal(g.right, env)
    if isinstance(g, Implies):
        return (not eval_goal(g.left, env)) or eval_goal(g.right, env)
    if isinstance(g, Neg):
        return not eval_goal(g.goal, env)
    if isinstance(g, Foreach):
        sv = ground_value(g.set_term, env)
        if not _is_set(sv):
            return False
        for elem in sv[1]:
            env2 = _match_pattern(g.pattern, elem, env)
            if env2 is None or not eval_goal(g.body, env2):
                return False
        return True
    raise OracleUnsupported(f"outside oracle fragment: {g!r}")


# --- universes --------------------------------------------------------------

@dataclass
class Universe:
    """Finite candidate space for variable assignments."""

    atoms: tuple = ("a", "b", "c")
    ints: tuple = ()
    max_set_size: int = 2
    depth: int = 1
    include_pairs: bool = False
    pair_atoms: tuple = ()
    pair_ints: tuple = ()
    guard_limit: int = 2_000_000
    _values: list = field(default=None, repr=False)

    def base_values(self):
        vals = [("atom", a) for a in self.atoms]
        vals += [("int", n) for n in self.ints]
        return vals

    def pair_values(self):
        firsts = [("atom", a) for a in (self.pair_atoms or self.atoms)]
        seconds = [("int", n) for n in self.pair_ints] or firsts
        return [("pair", f, s) for f in firsts for s in seconds]

    def set_values(self, pool):
        out = []
        for k in range(0, self.max_set_size + 1):
            for combo in itertools.combinations(pool, k):
                out.append(("set", frozenset(combo)))
        return out

    def values(self):
        if self._values is not None:
            return self._values
        pool = self.base_values()
        if self.include_pairs:
            pool = pool + self.pair_values()
        vals = list(pool)
        for _ in range(self.depth):
            vals = vals + [s for s in self.set_values(pool) if s not in vals]
            pool = vals
        self._values = vals
        return vals

    def relation_values(self, max_size=None):
        cap = self.max_set_size if max_size is None else max_size
        pairs = self.pair_values()
        out = []
        for k in range(0, cap + 1):
            for combo in itertools.combinations(pairs, k):
                out.append(("set", frozenset(combo)))
        return out


def enumerate_models(g: Goal, universe: Universe, candidates=None):
    """All satisfying assignments of the goal's variables."""
    vs = [v.name for v in goal_vars(g)]
    pool = candidates if candidates is not None else universe.values()
    total = len(pool) ** len(vs) if vs else 1
    if total > universe.guard_limit:
        raise UniverseTooLarge(f"{total} assignments")
    models = []
    for combo in itertools.product(pool, repeat=len(vs)):
        env = dict(zip(vs, combo))
        try:
            if eval_goal(g, env):
                models.append(env)
        except OracleUnsupported:
            continue
    return models


def satisfiable(g: Goal, universe: Universe, candidates=None) -> bool:
    vs = [v.name for v in goal_vars(g)]
    pool = candidates if candidates is not None else universe.values()
    for combo in itertools.product(pool, repeat=len(vs)):
        env = dict(zip(vs, combo))
        try:
            if eval_goal(g, env):
                return True
        except OracleUnsupported:
            continue
    return False


# --- clause inlining --------------------------------------------------------

def inline_calls(g: Goal, program, vargen, registry_names, depth=1):
    """Expand user clause calls one level; recursion is rejected."""
    from .goals import subst_goal
    from .terms import Subst

    def expand(node, remaining):
        if isinstance(node, Atom):
            if node.name in registry_names or node.name in ("true", "dec"):
                return node
            clauses = program.clauses_for(node.name, len(node.args))
            if not clauses:
                raise OracleUnsupported(f"unknown clause {node.name}")
            if remaining == 0:
                raise OracleUnsupported(f"recursive call {node.name}")
            branches = []
            for cl in clauses:
                ren = {}
                for v in _clause_vars(cl):
                    ren[v] = vargen.fresh()
                sub = Subst({Var(k): v for k, v in ren.items()})
                eqs = [Atom("=", (sub.apply(p), arg))
                       for p, arg in zip(cl.params, node.args)]
                body = expand(subst_goal(sub, cl.body), remaining - 1)
                branch = body
                for eq in reversed(eqs):
                    branch = And(eq, branch)
                branches.append(branch)
            out = branches[-1]
            for b in reversed(branches[:-1]):
                out = Or(b, out)
            return out
        if isinstance(node, And):
            return And(expand(node.left, remaining), expand(node.right, remaining))
        if isinstance(node, Or):
            return Or(expand(node.left, remaining), expand(node.right, remaining))
        if isinstance(node, Implies):
            return Implies(expand(node.left, remaining),
                           expand(node.right, remaining))
        if isinstance(node, Neg):
            return Neg(expand(node.goal, remaining))
        if isinstance(node, Foreach):
            return Foreach(node.pattern, node.set_term,
                           expand(node.body, remaining))
        raise OracleUnsupported(f"outside oracle fragment: {node!r}")

    return expand(g, depth)


def _clause_vars(cl):
    from .terms import term_vars
    names = []
    for p in cl.params:
        for v in term_vars(p):
            if v.name not in names:
                names.append(v.name)
    for v in goal_vars(cl.body):
        if v.name not in names:
            names.append(v.name)
    return names


# --- agreement checks -------------------------------------------------------

def solution_env(bindings):
    """Ground env from a kernel solution's bindings, or None."""
    env = {}
    for name, term in bindings:
        try:
            env[name] = ground_value(term, None)
        except OracleUnsupported:
            return None
    return env


def check_solution(goal, bindings, residue_goals, universe):
    """Soundness of one kernel solution against the oracle.

    Substitutes the solution bindings, then searches the universe for a
    witness assignment of the remaining variables that satisfies the
    residue; the witness must also satisfy the original goal.  Returns
    'ok', 'unsound', or 'no-witness' when the universe is too small to
    instantiate the residue.
    """
    binding_terms = {name: t for name, t in bindings}
    free = []
    for v in goal_vars(goal):
        if v.name not in binding_terms:
            free.append(v.name)
    residue = None
    for rg in residue_goals:
        residue = rg if residue is None else And(residue, rg)
    if residue is not None:
        for v in goal_vars(residue):
            if v.name not in binding_terms and v.name not in free:
                free.append(v.name)

    pool = universe.values()
    for combo in itertools.product(pool, repeat=len(free)):
        env = dict(zip(free, combo))
        try:
            for name, t in binding_terms.items():
                env[name] = ground_value(t, env)
        except OracleUnsupported:
            continue
        try:
            if residue is not None and not eval_goal(residue, env):
                continue
            return "ok" if eval_goal(goal, env) else "unsound"
        except OracleUnsupported:
            continue
    return "no-witness"
