"""Optional static types for programs and goals.

When typing is switched on, every clause needs a dec_p_type signature
and every goal variable needs a dec(V,t) atom; constraint arguments
then have to fit the operator signatures below.  Basic types are open:
any lowercase name used inside a type expression denotes a basic type,
and its constants are written tagged, as in name:maxi.  Enumeration
constants are the exception: they stay untagged because their spelling
already decides their type.
"""

from __future__ import annotations

from .errors import TypeCheckError
from .goals import And, Atom, CommitFirst, Foreach, Implies, Naf, Neg, Or
from .terms import (ArithExpr, CartProd, Const, EmptySet, Int, Interval,
                    ListTerm, SetCons, TypedConst, Var, is_fresh_name)
from .types import (INT, BasicType, EnumType, IntType, PairType, SetType,
                    TypeName, TypeVar, rel_type)


def _sig(make):
    """Wrap a signature builder so each use gets fresh type variables."""
    counter = [0]

    def build():
        counter[0] += 1
        suffix = str(counter[0])
        a, b, c = (TypeVar("A" + suffix), TypeVar("B" + suffix),
                   TypeVar("C" + suffix))
        return make(a, b, c)

    return build


SIGNATURES = {
    "=": _sig(lambda a, b, c: (a, a)),
    "neq": _sig(lambda a, b, c: (a, a)),
    "in": _sig(lambda a, b, c: (a, SetType(a))),
    "nin": _sig(lambda a, b, c: (a, SetType(a))),
    "set": _sig(lambda a, b, c: (SetType(a),)),
    "nset": _sig(lambda a, b, c: (a,)),
    "npair": _sig(lambda a, b, c: (a,)),
    "un": _sig(lambda a, b, c: (SetType(a), SetType(a), SetType(a))),
    "nun": _sig(lambda a, b, c: (SetType(a), SetType(a), SetType(a))),
    "disj": _sig(lambda a, b, c: (SetType(a), SetType(a))),
    "ndisj": _sig(lambda a, b, c: (SetType(a), SetType(a))),
    "subset": _sig(lambda a, b, c: (SetType(a), SetType(a))),
    "nsubset": _sig(lambda a, b, c: (SetType(a), SetType(a))),
    "ssubset": _sig(lambda a, b, c: (SetType(a), SetType(a))),
    "inters": _sig(lambda a, b, c: (SetType(a), SetType(a), SetType(a))),
    "ninters": _sig(lambda a, b, c: (SetType(a), SetType(a), SetType(a))),
    "diff": _sig(lambda a, b, c: (SetType(a), SetType(a), SetType(a))),
    "ndiff": _sig(lambda a, b, c: (SetType(a), SetType(a), SetType(a))),
    "size": _sig(lambda a, b, c: (SetType(a), INT)),
    "rel": _sig(lambda a, b, c: (rel_type(a, b),)),
    "nrel": _sig(lambda a, b, c: (rel_type(a, b),)),
    "pfun": _sig(lambda a, b, c: (rel_type(a, b),)),
    "npfun": _sig(lambda a, b, c: (rel_type(a, b),)),
    "comppf": _sig(lambda a, b, c: (a, b, rel_type(a, b))),
    "dom": _sig(lambda a, b, c: (rel_type(a, b), SetType(a))),
    "ndom": _sig(lambda a, b, c: (rel_type(a, b), SetType(a))),
    "ran": _sig(lambda a, b, c: (rel_type(a, b), SetType(b))),
    "nran": _sig(lambda a, b, c: (rel_type(a, b), SetType(b))),
    "inv": _sig(lambda a, b, c: (rel_type(a, b), rel_type(b, a))),
    "ninv": _sig(lambda a, b, c: (rel_type(a, b), rel_type(b, a))),
    "comp": _sig(lambda a, b, c:
                 (rel_type(a, b), rel_type(b, c), rel_type(a, c))),
    "ncomp": _sig(lambda a, b, c:
                  (rel_type(a, b), rel_type(b, c), rel_type(a, c))),
    "dres": _sig(lambda a, b, c:
                 (SetType(a), rel_type(a, b), rel_type(a, b))),
    "ndres": _sig(lambda a, b, c:
                  (SetType(a), rel_type(a, b), rel_type(a, b))),
    "dares": _sig(lambda a, b, c:
                  (SetType(a), rel_type(a, b), rel_type(a, b))),
    "ndares": _sig(lambda a, b, c:
                   (SetType(a), rel_type(a, b), rel_type(a, b))),
    "rres": _sig(lambda a, b, c:
                 (rel_type(a, b), SetType(b), rel_type(a, b))),
    "nrres": _sig(lambda a, b, c:
                  (rel_type(a, b), SetType(b), rel_type(a, b))),
    "rares": _sig(lambda a, b, c:
                  (rel_type(a, b), SetType(b), rel_type(a, b))),
    "nrares": _sig(lambda a, b, c:
                   (rel_type(a, b), SetType(b), rel_type(a, b))),
    "oplus": _sig(lambda a, b, c:
                  (rel_type(a, b), rel_type(a, b), rel_type(a, b))),
    "noplus": _sig(lambda a, b, c:
                   (rel_type(a, b), rel_type(a, b), rel_type(a, b))),
    "ring": _sig(lambda a, b, c:
                 (SetType(a), rel_type(a, b), SetType(b))),
    "nring": _sig(lambda a, b, c:
                  (SetType(a), rel_type(a, b), SetType(b))),
    "img": _sig(lambda a, b, c:
                (SetType(a), rel_type(a, b), SetType(b))),
    "nimg": _sig(lambda a, b, c:
                 (SetType(a), rel_type(a, b), SetType(b))),
    "apply": _sig(lambda a, b, c: (rel_type(a, b), a, b)),
    "applyTo": _sig(lambda a, b, c: (rel_type(a, b), a, b)),
    "napply": _sig(lambda a, b, c: (rel_type(a, b), a, b)),
    "is": _sig(lambda a, b, c: (INT, INT)),
    "=<": _sig(lambda a, b, c: (INT, INT)),
    "<": _sig(lambda a, b, c: (INT, INT)),
    ">=": _sig(lambda a, b, c: (INT, INT)),
    ">": _sig(lambda a, b, c: (INT, INT)),
}

UNTYPED_ATOMS = {"true", "fail", "write", "nl", "ansi", "call", "naf",
                 "dec", "consult", "halt"}


class Checker:
    def __init__(self, program):
        self.program = program
        self.defs = dict(program.type_defs) if program else {}
        self.sigs = dict(program.clause_sigs) if program else {}
        self._fresh = 0

    # --- type expression plumbing ---

    def resolve(self, ty, seen=()):
        """Chase synonyms; unresolved names become basic types."""
        if isinstance(ty, TypeName):
            if ty.name in seen:
                raise TypeCheckError(
                    "type error: circular type definition %s" % ty.name)
            if ty.name == "int":
                return INT
            if ty.name in self.defs:
                return self.resolve(self.defs[ty.name], seen + (ty.name,))
            return BasicType(ty.name)
        if isinstance(ty, SetType):
            return SetType(self.resolve(ty.elem, seen))
        if isinstance(ty, PairType):
            return PairType(self.resolve(ty.first, seen),
                            self.resolve(ty.second, seen))
        return ty

    def fresh_type(self):
        self._fresh += 1
        return TypeVar("_T%d" % self._fresh)

    def enum_of(self, name):
        """The resolved enum type a constant belongs to, if any."""
        for ty in self.defs.values():
            ty = self.resolve(ty)
            if isinstance(ty, EnumType) and name in ty.values:
                return ty
        return None

    # --- goals ---

    def check_goal(self, goal):
        """Typed-mode check of an interactive goal."""
        env = {}
        collect_decs(goal, env, self)
        from .goals import goal_vars
        for v in goal_vars(goal):
            if is_fresh_name(v.name):
                continue
            if v.name not in env:
                raise TypeCheckError(
                    "type error: variable %s has no type declaration"
                    % v.name)
        self.check_goal_types(goal, env, {})

    def check_clause(self, clause):
        sig = self.sigs.get(clause.name)
        if sig is None:
            raise TypeCheckError(
                "type error: clause %s has no dec_p_type declaration"
                % clause.name)
        if len(sig) != clause.arity:
            raise TypeCheckError(
                "type error: dec_p_type for %s declares %d arguments "
                "but the clause takes %d"
                % (clause.name, len(sig), clause.arity))
        env = {}
        bind = {}
        for p, ty in zip(clause.params, sig):
            ty = self.resolve(ty)
            if isinstance(p, Var):
                known = env.get(p.name)
                if known is None:
                    env[p.name] = ty
                elif not unify_types(known, ty, bind):
                    raise TypeCheckError(
                        "type error: variable %s used at types %s and %s "
                        "in the head of %s"
                        % (p.name, known, ty, clause.name))
            else:
                self.check_term(p, ty, env, bind)
        collect_decs(clause.body, env, self)
        try:
            self.check_goal_types(clause.body, env, bind)
        except TypeCheckError as exc:
            raise TypeCheckError("%s in clause %s" % (exc, clause.name))

    def check_program(self):
        for key in self.program.clause_keys():
            for clause in self.program.clause_map[key]:
                self.check_clause(clause)

    # --- structure walking ---

    def check_goal_types(self, g, env, bind):
        if isinstance(g, (And, Or, Implies)):
            self.check_goal_types(g.left, env, bind)
            self.check_goal_types(g.right, env, bind)
            return
        if isinstance(g, (Neg, CommitFirst, Naf)):
            self.check_goal_types(g.goal, env, bind)
            return
        if isinstance(g, Foreach):
            set_ty = self.infer(g.set_term, env, bind)
            elem = self.fresh_type()
            if not unify_types(set_ty, SetType(elem), bind):
                raise TypeCheckError(
                    "type error: foreach ranges over %s, not a set"
                    % type_str(set_ty, bind))
            inner = dict(env)
            self._bind_pattern(g.pattern, walk(elem, bind), inner, bind)
            self.check_goal_types(g.body, inner, bind)
            return
        if isinstance(g, Atom):
            self.check_atom(g, env, bind)
            return
        raise TypeCheckError("type error: cannot check %r" % (g,))

    def _bind_pattern(self, pattern, ty, env, bind):
        if isinstance(pattern, Var):
            env[pattern.name] = ty
            return
        if isinstance(pattern, ListTerm) and len(pattern.items) == 2:
            a, b = self.fresh_type(), self.fresh_type()
            if not unify_types(ty, PairType(a, b), bind):
                raise TypeCheckError(
                    "type error: pair pattern over non-pair elements")
            self._bind_pattern(pattern.items[0], walk(a, bind), env, bind)
            self._bind_pattern(pattern.items[1], walk(b, bind), env, bind)
            return
        self.check_term(pattern, ty, env, bind)

    def check_atom(self, atom, env, bind):
        name = atom.name
        if name in UNTYPED_ATOMS:
            return
        if name in SIGNATURES:
            sig = SIGNATURES[name]()
            if len(sig) != len(atom.args):
                raise TypeCheckError(
                    "type error: %s takes %d arguments" % (name, len(sig)))
            for arg, ty in zip(atom.args, sig):
                self.check_term(arg, ty, env, bind)
            return
        sig = self.sigs.get(name)
        if sig is not None:
            if len(sig) != len(atom.args):
                raise TypeCheckError(
                    "type error: %s takes %d arguments" % (name, len(sig)))
            for arg, ty in zip(atom.args, sig):
                self.check_term(arg, self.resolve(ty), env, bind)
            return
        raise TypeCheckError(
            "type error: clause %s has no dec_p_type declaration" % name)

    # --- terms ---

    def check_term(self, t, expected, env, bind):
        actual = self.infer(t, env, bind)
        if not unify_types(actual, expected, bind):
            raise TypeCheckError(
                "type error: %s has type %s where %s is required"
                % (term_str(t), type_str(actual, bind),
                   type_str(expected, bind)))

    def infer(self, t, env, bind):
        if isinstance(t, Var):
            ty = env.get(t.name)
            if ty is None:
                raise TypeCheckError(
                    "type error: variable %s has no type declaration"
                    % t.name)
            return ty
        if isinstance(t, Int):
            return INT
        if isinstance(t, TypedConst):
            return BasicType(t.tag)
        if isinstance(t, Const):
            enum = self.enum_of(t.name)
            if enum is None:
                raise TypeCheckError(
                    "type error: constant %s is not a member of any "
                    "declared enumeration (tag it as type:%s)"
                    % (t.name, t.name))
            return enum
        if isinstance(t, EmptySet):
            return SetType(self.fresh_type())
        if isinstance(t, SetCons):
            elem = self.fresh_type()
            for e in t.elems:
                self.check_term(e, elem, env, bind)
            self.check_term(t.tail, SetType(elem), env, bind)
            return SetType(walk(elem, bind))
        if isinstance(t, ListTerm):
            if len(t.items) != 2:
                raise TypeCheckError(
                    "type error: only two-element lists (pairs) are typed")
            return PairType(self.infer(t.items[0], env, bind),
                            self.infer(t.items[1], env, bind))
        if isinstance(t, Interval):
            self.check_term(t.lo, INT, env, bind)
            self.check_term(t.hi, INT, env, bind)
            return SetType(INT)
        if isinstance(t, CartProd):
            a, b = self.fresh_type(), self.fresh_type()
            self.check_term(t.left, SetType(a), env, bind)
            self.check_term(t.right, SetType(b), env, bind)
            return rel_type(walk(a, bind), walk(b, bind))
        if isinstance(t, ArithExpr):
            for arg in t.args:
                self.check_term(arg, INT, env, bind)
            return INT
        raise TypeCheckError("type error: cannot type %r" % (t,))


def collect_decs(g, env, checker):
    """Harvest dec(V,t) and dec([V...],t) atoms into the environment."""
    if isinstance(g, (And, Or, Implies)):
        collect_decs(g.left, env, checker)
        collect_decs(g.right, env, checker)
    elif isinstance(g, (Neg, CommitFirst, Naf)):
        collect_decs(g.goal, env, checker)
    elif isinstance(g, Foreach):
        collect_decs(g.body, env, checker)
    elif isinstance(g, Atom) and g.name == "dec" and len(g.args) == 2:
        targets, ty_term = g.args
        ty = checker.resolve(_type_of_term(ty_term))
        if isinstance(targets, ListTerm):
            names = targets.items
        else:
            names = (targets,)
        for v in names:
            if not isinstance(v, Var):
                raise TypeCheckError(
                    "type error: dec declares variables, got %s"
                    % term_str(v))
            env[v.name] = ty


def _type_of_term(t):
    """dec's second argument: a type expression, or an atom naming one."""
    if isinstance(t, (BasicType, EnumType, IntType, PairType, SetType,
                      TypeName, TypeVar)):
        return t
    if isinstance(t, Const):
        return TypeName(t.name)
    raise TypeCheckError(
        "type error: %s is not a type name (declare one with def_type)"
        % term_str(t))


# --- type unification -------------------------------------------------

def walk(ty, bind):
    while isinstance(ty, TypeVar) and ty in bind:
        ty = bind[ty]
    return ty


def unify_types(a, b, bind):
    a, b = walk(a, bind), walk(b, bind)
    if a == b:
        return True
    if isinstance(a, TypeVar):
        bind[a] = b
        return True
    if isinstance(b, TypeVar):
        bind[b] = a
        return True
    if isinstance(a, SetType) and isinstance(b, SetType):
        return unify_types(a.elem, b.elem, bind)
    if isinstance(a, PairType) and isinstance(b, PairType):
        return (unify_types(a.first, b.first, bind)
                and unify_types(a.second, b.second, bind))
    return False


def type_str(ty, bind):
    ty = walk(ty, bind)
    if isinstance(ty, SetType):
        inner = walk(ty.elem, bind)
        if isinstance(inner, PairType):
            return "rel(%s,%s)" % (type_str(inner.first, bind),
                                   type_str(inner.second, bind))
        return "set(%s)" % type_str(inner, bind)
    if isinstance(ty, PairType):
        return "[%s,%s]" % (type_str(ty.first, bind),
                            type_str(ty.second, bind))
    if isinstance(ty, TypeVar):
        return "?"
    return str(ty)


def term_str(t):
    from .terms import print_term
    return print_term(t)
