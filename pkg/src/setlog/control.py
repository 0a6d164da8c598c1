"""Classical negation of goals.

Negation is pushed down to atoms.  Constraint atoms flip to their
negated counterparts; a call to a user clause p flips to the negative
clause n_p when one with the same arity is consulted, and otherwise
falls back to negation as failure with a warning, which is unsound in
general because it cannot bind variables.
"""

from __future__ import annotations

from .errors import SetlogError
from .goals import And, Atom, CommitFirst, Foreach, Implies, Naf, Neg, Or, subst_goal
from .terms import ListTerm, term_vars

NAF_WARNING = "***WARNING***: Unsafe use of negation - using naf"

_PAIRS = [
    ("=", "neq"), ("in", "nin"), ("un", "nun"), ("disj", "ndisj"),
    ("subset", "nsubset"), ("inters", "ninters"), ("diff", "ndiff"),
    ("set", "nset"), ("rel", "nrel"), ("pfun", "npfun"), ("dom", "ndom"),
    ("ran", "nran"), ("inv", "ninv"), ("comp", "ncomp"), ("dres", "ndres"),
    ("dares", "ndares"), ("rres", "nrres"), ("rares", "nrares"),
    ("oplus", "noplus"), ("ring", "nring"), ("img", "nimg"),
    ("apply", "napply"), ("applyTo", "napply"),
]

NEGATION_OF = {}
for _p, _n in _PAIRS:
    NEGATION_OF[_p] = _n
    NEGATION_OF.setdefault(_n, _p)

_ORDER_FLIP = {"=<": ">", "<": ">=", ">=": "<", ">": "=<"}


def negate_goal(goal, ctx):
    if isinstance(goal, And):
        return Or(negate_goal(goal.left, ctx), negate_goal(goal.right, ctx))
    if isinstance(goal, Or):
        return And(negate_goal(goal.left, ctx), negate_goal(goal.right, ctx))
    if isinstance(goal, Implies):
        return And(goal.left, negate_goal(goal.right, ctx))
    if isinstance(goal, Neg):
        return goal.goal
    if isinstance(goal, Naf):
        return goal.goal
    if isinstance(goal, CommitFirst):
        return negate_goal(goal.goal, ctx)
    if isinstance(goal, Foreach):
        # not (forall x in A: P)  iff  some member violates P.
        from .terms import Subst
        renaming = Subst({v: ctx.fresh() for v in term_vars(goal.pattern)})
        pattern = renaming.apply(goal.pattern)
        body = subst_goal(renaming, goal.body)
        return And(Atom("in", (pattern, goal.set_term)),
                   negate_goal(body, ctx))
    if isinstance(goal, Atom):
        return _negate_atom(goal, ctx)
    raise SetlogError("cannot negate goal %r" % (goal,))


def _negate_atom(atom: Atom, ctx):
    name = atom.name
    if name in NEGATION_OF:
        return Atom(NEGATION_OF[name], atom.args)
    if name in _ORDER_FLIP:
        return Atom(_ORDER_FLIP[name], atom.args)
    if name == "is":
        m = ctx.fresh()
        return And(Atom("is", (m, atom.args[1])),
                   Atom("neq", (atom.args[0], m)))
    if name == "size":
        m = ctx.fresh()
        return And(Atom("size", (atom.args[0], m)),
                   Atom("neq", (m, atom.args[1])))
    if name == "ssubset":
        return Or(Atom("nsubset", atom.args), Atom("=", atom.args))
    if name == "npair":
        x, y = ctx.fresh(), ctx.fresh()
        return Atom("=", (atom.args[0], ListTerm((x, y))))
    if name == "true":
        return Atom("fail", ())
    if name == "fail":
        return Atom("true", ())
    if name == "naf":
        return Atom("call", atom.args)
    if name == "call":
        return Atom("naf", atom.args)
    if name == "dec":
        # Type annotations hold vacuously; their negation never does.
        return Atom("fail", ())
    if name in ("write", "nl", "ansi"):
        raise SetlogError("cannot negate an output action: %s" % name)

    program = getattr(ctx, "program", None)
    if program is not None:
        arity = len(atom.args)
        if name.startswith("n_") and program.has_clause(name[2:], arity):
            return Atom(name[2:], atom.args)
        if program.has_clause("n_" + name, arity):
            return Atom("n_" + name, atom.args)
    ctx.warn(NAF_WARNING)
    return Naf(atom)
