"""Goal language: atomic constraints and the logical connectives.

A goal is a tree of And/Or/Implies/Neg/Foreach/CommitFirst nodes over
Atom leaves.  Atoms cover registry constraints, user clause calls and
the handful of built-in output atoms; which of those an atom is gets
decided at solve time, not at parse time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .terms import Term, print_term, term_vars


@dataclass(frozen=True)
class Atom:
    """Atomic goal name(args); infix forms normalize to this shape."""

    name: str
    args: tuple = ()


@dataclass(frozen=True)
class And:
    left: "Goal"
    right: "Goal"


@dataclass(frozen=True)
class Or:
    left: "Goal"
    right: "Goal"


@dataclass(frozen=True)
class Implies:
    left: "Goal"
    right: "Goal"


@dataclass(frozen=True)
class Neg:
    goal: "Goal"


@dataclass(frozen=True)
class Foreach:
    """Restricted universal quantifier: body holds for every member.

    Every element of the set must unify with the binder pattern.
    """

    pattern: Term
    set_term: Term
    body: "Goal"


@dataclass(frozen=True)
class CommitFirst:
    """Postfix ``!``: keep only the first solution of the wrapped goal."""

    goal: "Goal"


@dataclass(frozen=True)
class Naf:
    """Negation as failure over a clause call; produced by negate()."""

    goal: "Goal"


Goal = Union[Atom, And, Or, Implies, Neg, Foreach, CommitFirst, Naf]

GOAL_TYPES = (Atom, And, Or, Implies, Neg, Foreach, CommitFirst, Naf)

TRUE = Atom("true", ())

# infix constraint operators as written in source
INFIX_ATOMS = ("=", "neq", "in", "nin", "is", "=<", "<", ">=", ">")


def conj(goals):
    """Right-nested conjunction of a goal list (TRUE when empty)."""
    gs = list(goals)
    if not gs:
        return TRUE
    out = gs[-1]
    for g in reversed(gs[:-1]):
        out = And(g, out)
    return out


def flatten_conj(g: Goal) -> list:
    if isinstance(g, And):
        return flatten_conj(g.left) + flatten_conj(g.right)
    return [g]


def goal_vars(g: Goal) -> list:
    """Variables of a goal in textual first-occurrence order."""
    seen: list = []

    def walk(node):
        if isinstance(node, Atom):
            for a in node.args:
                if isinstance(a, GOAL_TYPES):
                    walk(a)
                else:
                    _collect_term(a, seen)
        elif isinstance(node, (And, Or, Implies)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (Neg, CommitFirst, Naf)):
            walk(node.goal)
        elif isinstance(node, Foreach):
            _collect_term(node.pattern, seen)
            _collect_term(node.set_term, seen)
            walk(node.body)

    walk(g)
    return seen


def _collect_term(a, seen):
    # dec atoms carry a TypeExpr in the second slot; skip non-terms
    try:
        for v in term_vars(a):
            if v not in seen:
                seen.append(v)
    except TypeError:
        pass


def map_atom_args(fn, a):
    """Apply fn to the term arguments of an atom, skipping type payloads."""
    out = []
    for x in a.args:
        try:
            out.append(fn(x))
        except TypeError:
            out.append(x)
    return Atom(a.name, tuple(out))


def subst_goal(subst, g: Goal) -> Goal:
    """Apply a substitution over every term in the goal."""
    if isinstance(g, Atom):
        # call/naf arguments may be whole goals; descend into them.
        out = []
        for x in g.args:
            if isinstance(x, GOAL_TYPES):
                out.append(subst_goal(subst, x))
            else:
                out.append(subst.apply(x))
        return Atom(g.name, tuple(out))
    if isinstance(g, And):
        return And(subst_goal(subst, g.left), subst_goal(subst, g.right))
    if isinstance(g, Or):
        return Or(subst_goal(subst, g.left), subst_goal(subst, g.right))
    if isinstance(g, Implies):
        return Implies(subst_goal(subst, g.left), subst_goal(subst, g.right))
    if isinstance(g, Neg):
        return Neg(subst_goal(subst, g.goal))
    if isinstance(g, CommitFirst):
        return CommitFirst(subst_goal(subst, g.goal))
    if isinstance(g, Naf):
        return Naf(subst_goal(subst, g.goal))
    if isinstance(g, Foreach):
        return Foreach(subst.apply(g.pattern), subst.apply(g.set_term),
                       subst_goal(subst, g.body))
    raise TypeError(f"not a goal: {g!r}")


# --- printing ---------------------------------------------------------------

_PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def print_goal(g: Goal, prec: int = 0) -> str:
    if isinstance(g, Atom):
        return _print_atom(g)
    if isinstance(g, Implies):
        s = (f"{print_goal(g.left, _PREC_IMPLIES)} implies "
             f"{print_goal(g.right, _PREC_IMPLIES + 1)}")
        return f"({s})" if prec > _PREC_IMPLIES else s
    if isinstance(g, Or):
        s = f"{print_goal(g.left, _PREC_OR)} or {print_goal(g.right, _PREC_OR + 1)}"
        return f"({s})" if prec > _PREC_OR else s
    if isinstance(g, And):
        s = f"{print_goal(g.left, _PREC_AND)} & {print_goal(g.right, _PREC_AND + 1)}"
        return f"({s})" if prec > _PREC_AND else s
    if isinstance(g, Neg):
        return f"neg({print_goal(g.goal)})"
    if isinstance(g, Naf):
        return f"naf({print_goal(g.goal)})"
    if isinstance(g, CommitFirst):
        return f"({print_goal(g.goal)})!"
    if isinstance(g, Foreach):
        return (f"foreach({print_term(g.pattern)} in "
                f"{print_term(g.set_term)}, {print_goal(g.body)})")
    raise TypeError(f"not a goal: {g!r}")


def _print_atom(a: Atom) -> str:
    if a.name in INFIX_ATOMS and len(a.args) == 2:
        lhs, rhs = a.args
        spaced = a.name in ("neq", "in", "nin", "is")
        sep = f" {a.name} " if spaced else a.name
        return f"{print_term(lhs)}{sep}{print_term(rhs)}"
    if a.name == "ansi":
        text, color = a.args
        style = f"[bold,fg({color.name})]" if color.name else "[bold]"
        quoted = text.name.replace("\\", "\\\\").replace("\n", "\\n")
        return f"prolog_call(ansi_format({style},'{quoted}',[[]]))"
    if a.name == "dec":
        target, ty = a.args
        return f"dec({print_term(target)},{ty})"
    if not a.args:
        return a.name
    inner = ",".join(_print_arg(x) for x in a.args)
    return f"{a.name}({inner})"


def _print_arg(x):
    try:
        return print_term(x)
    except TypeError:
        return str(x)
