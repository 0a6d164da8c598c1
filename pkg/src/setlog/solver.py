"""The solving engine.

Goals are rewritten against an immutable State until only irreducible
constraints remain.  The search is a depth-first walk over an explicit
stack of (agenda, state) frames, so deep searches cost heap, not
Python stack.  Each exhausted agenda is a solution; under the clpfd
mode the finite-domain variables are labeled at that point and one
solution is emitted per assignment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import intsolver, settheory
from .control import negate_goal
from .errors import SetlogError, UnknownClauseError
from .goals import (GOAL_TYPES, And, Atom, CommitFirst, Foreach, Implies,
                    Naf, Neg, Or, goal_vars, subst_goal)
from .state import SolveContext, State
from .terms import (EmptySet, Int, Interval, SetCons, Subst, Var,
                    is_fresh_name, term_vars)

ANSI_CODES = {
    "red": "31", "green": "32", "yellow": "33", "blue": "34",
    "magenta": "35", "cyan": "36", "white": "37", "black": "30",
}


@dataclass
class Solution:
    """One answer: bindings for the goal's variables plus the residue."""
    bindings: list = field(default_factory=list)
    residue: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    state: State = field(default_factory=State)


def solve(goal, ctx: SolveContext, state: State = None):
    """Yield the solutions of a goal, left to right."""
    display_vars = [v for v in goal_vars(goal) if not is_fresh_name(v.name)]
    for st in run([goal], state if state is not None else State(), ctx):
        yield _build_solution(display_vars, st, ctx)


def _build_solution(display_vars, state: State, ctx: SolveContext) -> Solution:
    bindings = []
    for v in display_vars:
        value = state.resolve(v)
        if value != v:
            bindings.append((v, value))
    residue = []
    for entry in state.store:
        if isinstance(entry, Atom):
            from .goals import map_atom_args
            residue.append(map_atom_args(state.resolve, entry))
        else:
            residue.append(subst_goal(state.subst, entry))
    warnings = list(ctx.warnings)
    ctx.warnings = []
    return Solution(bindings, residue, warnings, state)


def run(goals, state: State, ctx: SolveContext, depth: int = 0):
    """Yield every State satisfying the conjunction of goals."""
    stack = [(list(goals), state)]
    while stack:
        agenda, st = stack.pop()
        failed = False
        while True:
            ctx.tick()
            if st.pending:
                items, st = st.drain_pending()
                agenda = items + agenda
            if not agenda:
                break
            g, agenda = agenda[0], agenda[1:]

            if isinstance(g, And):
                agenda = [g.left, g.right] + agenda
                continue
            if isinstance(g, Or):
                stack.append(([g.right] + agenda, st))
                agenda = [g.left] + agenda
                continue
            if isinstance(g, Implies):
                agenda = [Or(negate_goal(g.left, ctx),
                             And(g.left, g.right))] + agenda
                continue
            if isinstance(g, Neg):
                agenda = [negate_goal(g.goal, ctx)] + agenda
                continue
            if isinstance(g, Naf):
                if _has_solution(g.goal, st, ctx, depth):
                    failed = True
                    break
                continue
            if isinstance(g, CommitFirst):
                first = _first_solution(g.goal, st, ctx, depth)
                if first is None:
                    failed = True
                    break
                st = first
                continue
            if isinstance(g, Foreach):
                expansion, stored = _expand_foreach(g, st, ctx)
                if stored is not None:
                    st = stored
                    continue
                if expansion is None:
                    failed = True
                    break
                agenda = expansion + agenda
                continue
            if isinstance(g, Atom):
                result = _step_atom(g, st, ctx)
                if result is CONTINUE:
                    continue
                if not result:
                    failed = True
                    break
                for alt in reversed(result[1:]):
                    stack.append((list(agenda), alt))
                st = result[0]
                continue
            raise SetlogError("cannot solve %r" % (g,))
        if not failed:
            yield from _emit(st, ctx, depth)


CONTINUE = object()


def _step_atom(atom: Atom, st: State, ctx: SolveContext):
    """Solve one atom; CONTINUE for silent builtins, else a list of
    alternative states (empty means failure)."""
    name = atom.name

    if name == "true":
        return CONTINUE
    if name == "fail" or name == "false":
        return []
    if name == "dec":
        # Runtime ignores type annotations; the type checker reads them.
        return CONTINUE
    if name == "write":
        ctx.write(_text_of(st.resolve(atom.args[0])))
        return CONTINUE
    if name == "nl":
        ctx.write("\n")
        return CONTINUE
    if name == "ansi":
        text = _text_of(st.resolve(atom.args[0]))
        color = _text_of(st.resolve(atom.args[1]))
        code = ANSI_CODES.get(color)
        if ctx.color and code:
            ctx.write("\x1b[1;%sm%s\x1b[0m" % (code, text))
        else:
            ctx.write(text)
        return CONTINUE
    if name == "call":
        return [st.push_pending(_as_goal(st.resolve(atom.args[0])))]
    if name == "naf":
        return [st.push_pending(Naf(_as_goal(st.resolve(atom.args[0]))))]

    if name in settheory.REGISTRY:
        arity, proc = settheory.REGISTRY[name]
        if len(atom.args) != arity:
            raise UnknownClauseError(
                "unknown constraint: %s/%d" % (name, len(atom.args)))
        return list(proc(atom, st, ctx))
    if name in settheory.ARITH_ATOM_NAMES:
        return list(intsolver.solve_arith(atom, st, ctx))

    return _call_clauses(atom, st, ctx)


def _call_clauses(atom: Atom, st: State, ctx: SolveContext):
    program = ctx.program
    arity = len(atom.args)
    if program is None or not program.has_clause(atom.name, arity):
        raise UnknownClauseError(
            "unknown clause: %s/%d" % (atom.name, arity))
    alts = []
    for clause in program.clauses(atom.name, arity):
        params, body = _rename_clause(clause, ctx)
        goals = [Atom("=", (p, a)) for p, a in zip(params, atom.args)]
        goals.append(body)
        alts.append(st.push_pending(*goals))
    return alts


def _rename_clause(clause, ctx: SolveContext):
    names = set()
    for p in clause.params:
        names.update(term_vars(p))
    names.update(goal_vars(clause.body))
    # Built in one shot: bind() composes, and a clause's own _N
    # variables may collide with freshly generated images.
    renaming = Subst({v: ctx.fresh() for v in names})
    params = tuple(renaming.apply(p) for p in clause.params)
    body = subst_goal(renaming, clause.body)
    return params, body


def _has_solution(goal, st: State, ctx: SolveContext, depth: int) -> bool:
    for _ in run([goal], st, ctx, depth + 1):
        return True
    return False


def _first_solution(goal, st: State, ctx: SolveContext, depth: int):
    for result in run([goal], st, ctx, depth + 1):
        return result
    return None


def _as_goal(t):
    if isinstance(t, GOAL_TYPES):
        return t
    if isinstance(t, Var):
        raise SetlogError("call: unbound goal variable %s" % t.name)
    from .terms import Const
    if isinstance(t, Const):
        return Atom(t.name, ())
    raise SetlogError("call: not a goal: %r" % (t,))


def _text_of(t) -> str:
    from .terms import Const, print_term
    if isinstance(t, Const):
        return t.name
    return print_term(t)


def _expand_foreach(g: Foreach, st: State, ctx: SolveContext):
    """(expansion goals, None) when the collection is extensional,
    (None, new state) when it must be stored, (None, None) on failure."""
    collection = st.resolve(g.set_term)
    if isinstance(collection, Var):
        entry = Foreach(st.resolve(g.pattern), collection,
                        subst_goal(st.subst, g.body))
        return None, st.add_store(entry)
    goals = []
    binder = term_vars(g.pattern)

    def instance(element):
        renaming = Subst({v: ctx.fresh() for v in binder})
        goals.append(Atom("=", (renaming.apply(g.pattern), element)))
        goals.append(subst_goal(renaming, g.body))

    while True:
        if isinstance(collection, EmptySet):
            return goals, None
        if isinstance(collection, SetCons):
            for element in collection.elems:
                instance(element)
            collection = st.resolve(collection.tail)
            if isinstance(collection, Var):
                goals.append(Foreach(g.pattern, collection, g.body))
                return goals, None
            continue
        if isinstance(collection, Interval):
            lo = st.resolve(collection.lo)
            hi = st.resolve(collection.hi)
            if isinstance(lo, Int) and isinstance(hi, Int):
                for k in range(lo.value, hi.value + 1):
                    instance(Int(k))
                return goals, None
            entry = Foreach(st.resolve(g.pattern), collection,
                            subst_goal(st.subst, g.body))
            return None, st.add_store(entry)
        return None, None


def _emit(state: State, ctx: SolveContext, depth: int):
    if depth == 0 and ctx.mode == "clpfd":
        rows = intsolver.collect_rows(state)
        if rows:
            assignments, unbounded = intsolver.fd_solutions(state, ctx)
            if unbounded:
                ctx.warn("***WARNING***: non-finite domain")
                yield state
                return
            for assignment in assignments:
                goals = [Atom("=", (v, Int(n)))
                         for v, n in assignment.items()]
                yield from run(goals, state, ctx, depth + 1)
            return
    yield state
