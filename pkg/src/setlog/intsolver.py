"""Linear integer arithmetic over the constraint store.

Two checking modes share the same store of arithmetic atoms:

* ``clpq``: decides satisfiability exactly.  Equations are eliminated
  by integer Euclidean substitution (complete for equality systems),
  the remaining inequalities go through Fourier-Motzkin elimination,
  and fractional witnesses trigger branch and bound.
* ``clpfd``: propagates interval bounds only; answers are confirmed by
  labeling at emission time, which enumerates finite domains.

``is`` evaluates its right side as soon as it is ground; until then
the atom sits in the store as a linear constraint and is re-examined
whenever one of its variables is bound.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, gcd
from typing import Iterator, Optional

from .errors import SetlogError
from .goals import Atom, goal_vars
from .state import SolveContext, State
from .terms import ArithExpr, Int, Var, print_term

ORDER_OPS = {"=<", "<", ">=", ">"}
ARITH_STORE_NAMES = ORDER_OPS | {"is", "neq"}


class NotIntError(SetlogError):
    pass


class NonlinearError(SetlogError):
    pass


class DeferArith(Exception):
    """A div/mod over unbound operands: keep the atom, check nothing."""


def eval_ground(t) -> Optional[int]:
    """Integer value of a ground arithmetic term, None if variables remain.

    Raises NotIntError when a non-integer leaf (an atom, a set, a pair)
    appears where a number is required.
    """
    if isinstance(t, Int):
        return t.value
    if isinstance(t, Var):
        return None
    if isinstance(t, ArithExpr):
        vals = [eval_ground(a) for a in t.args]
        if any(v is None for v in vals):
            return None
        if t.op == "+":
            return vals[0] + vals[1] if len(vals) == 2 else vals[0]
        if t.op == "-":
            return vals[0] - vals[1] if len(vals) == 2 else -vals[0]
        if t.op == "*":
            return vals[0] * vals[1]
        if t.op in ("div", "mod"):
            if vals[1] == 0:
                raise SetlogError("division by zero")
            return vals[0] // vals[1] if t.op == "div" else vals[0] % vals[1]
        raise SetlogError("unknown arithmetic operator %r" % t.op)
    raise NotIntError("expected an integer expression, found %s" % print_term(t))


def linear_form(t):
    """(coeffs, const) with integer coefficients, or raise.

    Ground subterms collapse to constants first, so ``(7 div 2) + X``
    is linear.  div/mod over unbound operands raise DeferArith; genuine
    nonlinearity (a product of two variables) raises NonlinearError.
    """
    g = eval_ground(t)
    if g is not None:
        return {}, g
    if isinstance(t, Var):
        return {t: 1}, 0
    if isinstance(t, ArithExpr):
        if t.op == "+":
            if len(t.args) == 1:
                return linear_form(t.args[0])
            c1, k1 = linear_form(t.args[0])
            c2, k2 = linear_form(t.args[1])
            return _merge(c1, c2, 1), k1 + k2
        if t.op == "-":
            if len(t.args) == 1:
                c1, k1 = linear_form(t.args[0])
                return {v: -c for v, c in c1.items()}, -k1
            c1, k1 = linear_form(t.args[0])
            c2, k2 = linear_form(t.args[1])
            return _merge(c1, c2, -1), k1 - k2
        if t.op == "*":
            g0 = eval_ground(t.args[0])
            g1 = eval_ground(t.args[1])
            if g0 is not None:
                c, k = linear_form(t.args[1])
                return {v: g0 * x for v, x in c.items()}, g0 * k
            if g1 is not None:
                c, k = linear_form(t.args[0])
                return {v: g1 * x for v, x in c.items()}, g1 * k
            raise NonlinearError("nonlinear expression: %s" % print_term(t))
        if t.op in ("div", "mod"):
            raise DeferArith()
        raise SetlogError("unknown arithmetic operator %r" % t.op)
    raise NotIntError("expected an integer expression, found %s" % print_term(t))


def _merge(c1, c2, sign):
    out = dict(c1)
    for v, c in c2.items():
        out[v] = out.get(v, 0) + sign * c
        if out[v] == 0:
            del out[v]
    return out


def atom_to_row(atom: Atom):
    """Normalise an arithmetic atom to (coeffs, const, rel) with rel in
    {'=', '<=', '<', '!='} read as: sum + const rel 0."""
    name = atom.name
    lhs, rhs = atom.args
    cl, kl = linear_form(lhs)
    cr, kr = linear_form(rhs)
    if name in ("is", "neq"):
        rel = "=" if name == "is" else "!="
        return _merge(cl, cr, -1), kl - kr, rel
    if name == "=<":
        return _merge(cl, cr, -1), kl - kr, "<="
    if name == "<":
        return _merge(cl, cr, -1), kl - kr, "<"
    if name == ">=":
        return _merge(cr, cl, -1), kr - kl, "<="
    if name == ">":
        return _merge(cr, cl, -1), kr - kl, "<"
    raise SetlogError("not an arithmetic atom: %s" % name)


def arith_entries(state: State):
    return [e for e in state.store
            if isinstance(e, Atom) and e.name in ARITH_STORE_NAMES]


def collect_rows(state: State):
    """Linear rows for the current store.

    A stored neq participates only when both sides already live in the
    arithmetic fragment: literal integers or variables constrained by
    other arithmetic atoms.
    """
    rows = []
    int_vars = set()
    neqs = []
    for e in arith_entries(state):
        if e.name == "neq":
            neqs.append(e)
            continue
        try:
            rows.append(atom_to_row(e))
        except (DeferArith, NonlinearError, NotIntError):
            continue
    for coeffs, _k, _rel in rows:
        int_vars.update(coeffs)
    for e in neqs:
        try:
            coeffs, k, rel = atom_to_row(e)
        except (DeferArith, NonlinearError, NotIntError):
            continue
        if all(v in int_vars for v in coeffs):
            rows.append((coeffs, k, rel))
    return rows


def int_vars(state: State):
    """Variables constrained by stored is/order atoms, store order."""
    seen = []
    for e in arith_entries(state):
        if e.name == "neq":
            continue
        try:
            coeffs, _k, _rel = atom_to_row(e)
        except (DeferArith, NonlinearError, NotIntError):
            continue
        for v in goal_vars(e):
            if v in coeffs and v not in seen:
                seen.append(v)
    return seen


def is_int_var(state: State, v: Var) -> bool:
    return v in int_vars(state)


def store_is_satisfiable(state: State, ctx: SolveContext) -> bool:
    rows = collect_rows(state)
    if not rows:
        return True
    if ctx.mode == "clpfd":
        sat, _domains = fd_bounds(rows)
        return sat
    return clpq_sat(rows, ctx) is not None


def check_and_store(atom: Atom, state: State, ctx: SolveContext) -> Iterator[State]:
    """Add an arithmetic atom to the store if the system stays satisfiable."""
    new_state = state.add_store(atom)
    if not store_is_satisfiable(new_state, ctx):
        return
    if atom.name != "neq":
        # A new neq row cannot widen the arithmetic fragment, and
        # re-waking it here would cycle forever.
        new_state = _wake_int_neqs(atom, new_state)
    yield new_state


def _wake_int_neqs(atom: Atom, state: State) -> State:
    """Re-activate stored generic neq atoms whose variables just became
    arithmetic, so they can be re-routed into the integer fragment."""
    try:
        coeffs, _k, _rel = atom_to_row(atom)
    except (DeferArith, NonlinearError, NotIntError):
        return state
    woken, stay = [], []
    for e in state.store:
        if (isinstance(e, Atom) and e.name == "neq" and e is not atom
                and not set(goal_vars(e)).isdisjoint(coeffs)):
            woken.append(e)
        else:
            stay.append(e)
    if not woken:
        return state
    return State(state.subst, tuple(stay), state.pending + tuple(woken))


def solve_arith(atom: Atom, state: State, ctx: SolveContext) -> Iterator[State]:
    """Rewrite one is/order atom against the current state."""
    from .unify import unify

    name = atom.name
    lhs = state.resolve(atom.args[0])
    rhs = state.resolve(atom.args[1])
    atom = Atom(name, (lhs, rhs))

    if name == "is":
        rv = eval_ground(rhs)
        if rv is not None:
            lv = eval_ground(lhs)
            if lv is not None:
                if lv == rv:
                    yield state
                return
            if isinstance(lhs, Var):
                yield from unify(lhs, Int(rv), state, ctx)
                return
            raise SetlogError(
                "is: first argument must be a variable or an integer")
        if not (isinstance(lhs, (Var, Int)) or eval_ground(lhs) is not None):
            raise SetlogError(
                "is: first argument must be a variable or an integer")
        try:
            atom_to_row(atom)
        except DeferArith:
            yield state.add_store(atom)
            return
        yield from check_and_store(atom, state, ctx)
        return

    if name in ORDER_OPS:
        lv = eval_ground(lhs)
        rv = eval_ground(rhs)
        if lv is not None and rv is not None:
            ok = {"=<": lv <= rv, "<": lv < rv,
                  ">=": lv >= rv, ">": lv > rv}[name]
            if ok:
                yield state
            return
        try:
            atom_to_row(atom)
        except DeferArith:
            yield state.add_store(atom)
            return
        yield from check_and_store(atom, state, ctx)
        return

    if name == "neq":
        lv = eval_ground(lhs)
        rv = eval_ground(rhs)
        if lv is not None and rv is not None:
            if lv != rv:
                yield state
            return
        yield from check_and_store(atom, state, ctx)
        return

    raise SetlogError("not an arithmetic atom: %s" % name)


# --- exact decision procedure (clpq) ---------------------------------

def clpq_sat(rows, ctx=None, depth=0):
    """Integer witness for the row system, or None."""
    if ctx is not None:
        ctx.tick()
    if depth > 200:
        raise SetlogError("integer solver exceeded its branching limit")
    for i, (coeffs, k, rel) in enumerate(rows):
        if rel == "!=":
            rest = rows[:i] + rows[i + 1:]
            w = clpq_sat(rest + [(coeffs, k, "<")], ctx, depth + 1)
            if w is not None:
                return w
            neg = {v: -c for v, c in coeffs.items()}
            return clpq_sat(rest + [(neg, -k, "<")], ctx, depth + 1)
    eqs = [(dict(c), k) for c, k, rel in rows if rel == "="]
    ineqs = [(dict(c), Fraction(k), rel) for c, k, rel in rows if rel != "="]
    solved = _eliminate_equations(eqs, ineqs)
    if solved is None:
        return None
    ineqs, back = solved
    witness = _fm_with_bb(ineqs, ctx, depth)
    if witness is None:
        return None
    # Replay eliminated equations newest first.
    for v, expr, const in reversed(back):
        val = const + sum(c * witness.get(u, 0) for u, c in expr.items())
        witness[v] = val
    return {v: int(val) for v, val in witness.items()}


_fresh_elim = [0]


def _eliminate_equations(eqs, ineqs):
    """Integer elimination of equality rows by Euclidean substitution.

    Returns (remaining inequality rows, back-substitution list) or None
    when some equation has no integer solution.
    """
    back = []
    ineqs = [(dict(c), k, rel) for c, k, rel in ineqs]
    while eqs:
        coeffs, k = eqs.pop()
        coeffs = {v: c for v, c in coeffs.items() if c != 0}
        if not coeffs:
            if k != 0:
                return None
            continue
        g = 0
        for c in coeffs.values():
            g = gcd(g, abs(c))
        if k % g != 0:
            return None
        coeffs = {v: c // g for v, c in coeffs.items()}
        k //= g
        unit = next((v for v, c in coeffs.items() if abs(c) == 1), None)
        if unit is not None:
            c0 = coeffs[unit]
            # unit*c0 + rest + k = 0  =>  unit = -(rest + k)/c0
            expr = {v: -c // c0 for v, c in coeffs.items() if v != unit}
            const = -k // c0
            back.append((unit, expr, const))
            eqs = [_substitute(e, unit, expr, const) for e in eqs]
            ineqs = [
                _substitute_rel(r, unit, expr, const) for r in ineqs
            ]
            continue
        # No unit coefficient: shrink the smallest one by a change of
        # variable t = x_k + sum(q_i x_i) + q_c, which keeps the system
        # integer-equivalent and strictly decreases min |coeff|.
        xk = min(coeffs, key=lambda v: abs(coeffs[v]))
        ak = coeffs[xk]
        _fresh_elim[0] += 1
        t = Var("_ELIM%d" % _fresh_elim[0])
        qs = {v: c // ak for v, c in coeffs.items() if v != xk}
        rs = {v: c - qs[v] * ak for v, c in coeffs.items() if v != xk}
        qc, rc = k // ak, k - (k // ak) * ak
        # x_k = t - sum(q_i x_i) - q_c
        expr = {v: -q for v, q in qs.items() if q != 0}
        sub_expr = dict(expr)
        sub_expr[t] = 1
        back.append((xk, sub_expr, -qc))
        new_eq = {v: r for v, r in rs.items() if r != 0}
        new_eq[t] = ak
        eqs.append((new_eq, rc))
        ineqs = [_substitute_rel(r, xk, sub_expr, -qc) for r in ineqs]
        eqs = [_substitute(e, xk, sub_expr, -qc) for e in eqs]
    return ineqs, back


def _substitute(eq, v, expr, const):
    coeffs, k = eq
    if v not in coeffs:
        return eq
    c = coeffs[v]
    out = {u: x for u, x in coeffs.items() if u != v}
    for u, x in expr.items():
        out[u] = out.get(u, 0) + c * x
        if out[u] == 0:
            del out[u]
    return out, k + c * const


def _substitute_rel(row, v, expr, const):
    coeffs, k, rel = row
    (coeffs, k) = _substitute((coeffs, k), v, expr, const)
    return coeffs, k, rel


def _fm_with_bb(ineqs, ctx, depth):
    """Rational Fourier-Motzkin with an integer-preferring witness and
    branch and bound on fractional coordinates."""
    if ctx is not None:
        ctx.tick()
    if depth > 200:
        raise SetlogError("integer solver exceeded its branching limit")
    witness = _fm_witness(ineqs)
    if witness is None:
        return None
    frac = next((v for v, val in witness.items()
                 if val != int(val)), None)
    if frac is None:
        return witness
    val = witness[frac]
    low = ineqs + [({frac: 1}, Fraction(-floor(val)), "<=")]
    w = _fm_with_bb(low, ctx, depth + 1)
    if w is not None:
        return w
    high = ineqs + [({frac: -1}, Fraction(ceil(val)), "<=")]
    return _fm_with_bb(high, ctx, depth + 1)


def _fm_witness(ineqs):
    """A rational witness for rows {<=,<}, or None if infeasible."""
    rows = [({v: Fraction(c) for v, c in coeffs.items()}, Fraction(k), rel)
            for coeffs, k, rel in ineqs]
    order = []
    for coeffs, _k, _rel in rows:
        for v in coeffs:
            if v not in order:
                order.append(v)
    bounds_per_var = []
    for v in order:
        with_v = [r for r in rows if v in r[0]]
        without = [r for r in rows if v not in r[0]]
        lowers, uppers = [], []
        for coeffs, k, rel in with_v:
            a = coeffs[v]
            rest = {u: c for u, c in coeffs.items() if u != v}
            # a*v + rest + k rel 0
            bound = ({u: -c / a for u, c in rest.items()}, -k / a)
            if a > 0:
                uppers.append((bound, rel))
            else:
                lowers.append((bound, rel))
        for (lc, lk), lrel in lowers:
            for (uc, uk), urel in uppers:
                coeffs = dict(lc)
                for u, c in uc.items():
                    coeffs[u] = coeffs.get(u, 0) - c
                    if coeffs[u] == 0:
                        del coeffs[u]
                k = lk - uk
                rel = "<" if (lrel == "<" or urel == "<") else "<="
                without.append((coeffs, k, rel))
        bounds_per_var.append((v, lowers, uppers))
        rows = without
    for coeffs, k, rel in rows:
        if coeffs:
            continue
        if rel == "<=" and not (k <= 0):
            return None
        if rel == "<" and not (k < 0):
            return None
    witness = {}
    for v, lowers, uppers in reversed(bounds_per_var):
        lo = None
        lo_strict = False
        for (lc, lk), rel in lowers:
            val = lk + sum(c * witness.get(u, 0) for u, c in lc.items())
            if lo is None or val > lo or (val == lo and rel == "<"):
                lo, lo_strict = val, (rel == "<")
        hi = None
        hi_strict = False
        for (uc, uk), rel in uppers:
            val = uk + sum(c * witness.get(u, 0) for u, c in uc.items())
            if hi is None or val < hi or (val == hi and rel == "<"):
                hi, hi_strict = val, (rel == "<")
        witness[v] = _pick_value(lo, lo_strict, hi, hi_strict)
    return witness


def _pick_value(lo, lo_strict, hi, hi_strict):
    """A value in the interval, integer whenever one fits."""
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        c = Fraction(floor(hi))
        if hi_strict and c == hi:
            c -= 1
        return c
    if hi is None:
        c = Fraction(ceil(lo))
        if lo_strict and c == lo:
            c += 1
        return c
    c = Fraction(ceil(lo))
    if lo_strict and c == lo:
        c += 1
    if c < hi or (c == hi and not hi_strict):
        return c
    return (lo + hi) / 2


# --- finite-domain propagation (clpfd) -------------------------------

def fd_bounds(rows):
    """Interval propagation; returns (sat, domains).

    Domain bounds are (lo, hi) with None marking an open side.  Only
    definite inconsistencies are reported as unsat; labeling makes the
    final call on finite systems.
    """
    domains = {}
    expanded = []
    for coeffs, k, rel in rows:
        if rel == "!=":
            expanded.append((coeffs, k, rel))
            continue
        if rel == "=":
            expanded.append((coeffs, k, "<="))
            neg = {v: -c for v, c in coeffs.items()}
            expanded.append((neg, -k, "<="))
        elif rel == "<":
            expanded.append((coeffs, k + 1, "<="))
        else:
            expanded.append((coeffs, k, "<="))
        for v in coeffs:
            domains.setdefault(v, (None, None))
    for coeffs, _k, _rel in rows:
        for v in coeffs:
            domains.setdefault(v, (None, None))

    for _pass in range(200):
        changed = False
        for coeffs, k, rel in expanded:
            if rel == "!=":
                continue
            # sum + k <= 0
            for v, a in coeffs.items():
                acc = Fraction(k)
                open_side = False
                for u, c in coeffs.items():
                    if u is v:
                        continue
                    lo, hi = domains[u]
                    if c > 0:
                        if lo is None:
                            open_side = True
                            break
                        acc += c * lo
                    else:
                        if hi is None:
                            open_side = True
                            break
                        acc += c * hi
                if open_side:
                    continue
                lo, hi = domains[v]
                if a > 0:
                    new_hi = floor(Fraction(-acc, a))
                    if hi is None or new_hi < hi:
                        domains[v] = (lo, new_hi)
                        changed = True
                else:
                    new_lo = ceil(Fraction(acc, -a))
                    if lo is None or new_lo > lo:
                        domains[v] = (new_lo, hi)
                        changed = True
        for v, (lo, hi) in domains.items():
            if lo is not None and hi is not None and lo > hi:
                return False, domains
        if not changed:
            break
    for coeffs, k, rel in expanded:
        if rel != "!=":
            continue
        vals = {}
        determined = True
        for v in coeffs:
            lo, hi = domains[v]
            if lo is not None and lo == hi:
                vals[v] = lo
            else:
                determined = False
                break
        if determined:
            if sum(c * vals[v] for v, c in coeffs.items()) + k == 0:
                return False, domains
    return True, domains


LABEL_CAP = 200000


def fd_solutions(state: State, ctx: SolveContext):
    """(assignments, unbounded) for labeling at emission.

    assignments is a list of dicts var->int covering every combination
    of the finite domains that satisfies the rows, in ascending order
    of the store-ordered variables.  unbounded is True when some
    domain has an open side, in which case assignments is empty.
    """
    rows = collect_rows(state)
    if not rows:
        return [], False
    sat, domains = fd_bounds(rows)
    if not sat:
        return [], False
    variables = int_vars(state)
    for v in variables:
        lo, hi = domains.get(v, (None, None))
        if lo is None or hi is None:
            return [], True
    total = 1
    for v in variables:
        lo, hi = domains[v]
        total *= hi - lo + 1
        if total > LABEL_CAP:
            raise SetlogError("labeling space too large")
    out = []

    def rows_hold(assign):
        for coeffs, k, rel in rows:
            s = sum(c * assign.get(v, 0) for v, c in coeffs.items()) + k
            if rel == "=" and s != 0:
                return False
            if rel == "<=" and not s <= 0:
                return False
            if rel == "<" and not s < 0:
                return False
            if rel == "!=" and s == 0:
                return False
        return True

    def rec(i, assign):
        ctx.tick()
        if i == len(variables):
            if rows_hold(assign):
                out.append(dict(assign))
            return
        v = variables[i]
        lo, hi = domains[v]
        for val in range(lo, hi + 1):
            assign[v] = val
            rec(i + 1, assign)
        del assign[v]

    rec(0, {})
    return out, False
