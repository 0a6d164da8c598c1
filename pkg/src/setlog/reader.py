"""Concrete syntax: tokenizer and parser.

The same grammar serves interactive goals and consulted files.  Files
hold clauses (``head :- body.`` or facts), declarations (variables,
invariant, initial, operation, def_type, dec_p_type) and directives
(``:- goal.``).  Goals use the connective precedence implies < or < &,
with neg binding tightest; infix constraints bind tighter than any
connective.  ``%`` starts a comment; every item ends with a dot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .goals import (
    And, Atom, CommitFirst, Foreach, Goal, Implies, Naf, Neg, Or,
)
from .terms import (
    ArithExpr, CartProd, Const, EmptySet, Int, Interval, ListTerm,
    Term, TypedConst, Var, VarGen, set_cons,
)
from .types import (
    EnumType, IntType, PairType, SetType, TypeExpr, TypeName, rel_type,
)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<qatom>'(?:\\.|[^'\\])*')
  | (?P<int>\d+)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<op>:-|=<|>=|<=|[(){}\[\],/:.!&=<>+\-*])
""", re.VERBOSE)

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'"}

_DECL_NAMES = ("variables", "invariant", "initial", "operation",
               "def_type", "dec_p_type")

_INFIX_OPS = {"=", "neq", "in", "nin", "is", "=<", "<", ">=", ">", "<="}


@dataclass
class Token:
    kind: str  # name var int qatom op end
    text: str
    line: int
    col: int


def tokenize(text: str):
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        raw = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, raw, line, col))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
        pos = m.end()
    tokens.append(Token("end", "", line, col))
    return tokens


def unquote(raw: str) -> str:
    body = raw[1:-1]
    out, i = [], 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            out.append(_ESCAPES.get(body[i + 1], body[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


@dataclass
class ClauseDef:
    name: str
    params: tuple
    body: Goal
    line: int = 0

    @property
    def arity(self):
        return len(self.params)


@dataclass
class Declaration:
    kind: str
    payload: object
    line: int = 0


@dataclass
class Directive:
    goal: Goal
    line: int = 0


class Parser:
    def __init__(self, text: str, vargen: VarGen | None = None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.vargen = vargen or VarGen()

    # --- token plumbing ---

    def peek(self, ahead=0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.peek()
        if t.kind != "end":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text

    def at_word(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "name" and t.text == word

    def expect(self, text: str) -> Token:
        if not self.at(text):
            t = self.peek()
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'}",
                             t.line, t.col)
        return self.next()

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # --- terms ---

    def parse_term(self) -> Term:
        return self._additive()

    def _additive(self) -> Term:
        t = self._multiplicative()
        while self.at("+") or self.at("-"):
            op = self.next().text
            rhs = self._multiplicative()
            t = ArithExpr(op, (t, rhs))
        return t

    def _multiplicative(self) -> Term:
        t = self._unary_term()
        while True:
            if self.at("*"):
                op = self.next().text
            elif self.at_word("div") or self.at_word("mod"):
                op = self.next().text
            else:
                return t
            rhs = self._unary_term()
            t = ArithExpr(op, (t, rhs))

    def _unary_term(self) -> Term:
        if self.at("-"):
            self.next()
            inner = self._unary_term()
            if isinstance(inner, Int):
                return Int(-inner.value)
            return ArithExpr("-", (Int(0), inner))
        return self._primary_term()

    def _primary_term(self) -> Term:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return Int(int(t.text))
        if t.kind == "qatom":
            self.next()
            return Const(unquote(t.text))
        if t.kind == "var":
            self.next()
            if t.text == "_":
                return self.vargen.fresh()
            return Var(t.text)
        if t.kind == "name":
            return self._name_term()
        if self.at("{"):
            return self._set_term()
        if self.at("["):
            return self._list_term()
        if self.at("("):
            self.next()
            inner = self.parse_term()
            self.expect(")")
            return inner
        self.fail(f"expected a term, found {t.text or 'end of input'}")

    def _name_term(self) -> Term:
        t = self.next()
        name = t.text
        if self.at("(") and name in ("int", "cp"):
            self.next()
            a = self.parse_term()
            self.expect(",")
            b = self.parse_term()
            self.expect(")")
            if name == "int":
                for bound in (a, b):
                    if not isinstance(bound, (Int, Var)):
                        raise ParseError(
                            "interval bounds must be integers or variables",
                            t.line, t.col)
                return Interval(a, b)
            return CartProd(a, b)
        if self.at("("):
            raise ParseError(f"{name}(...) is not a term", t.line, t.col)
        if self.at(":") and self.peek(1).kind in ("name", "int"):
            self.next()
            v = self.next()
            value = int(v.text) if v.kind == "int" else v.text
            return TypedConst(name, value)
        return Const(name)

    def _set_term(self) -> Term:
        self.expect("{")
        if self.at("}"):
            self.next()
            return EmptySet()
        elems = [self.parse_term()]
        while self.at(","):
            self.next()
            elems.append(self.parse_term())
        tail: Term = EmptySet()
        if self.at("/"):
            self.next()
            tail = self.parse_term()
            if not _is_set_shape(tail):
                self.fail("set tail must be a set term or variable")
        self.expect("}")
        return set_cons(tuple(elems), tail)

    def _list_term(self) -> Term:
        self.expect("[")
        if self.at("]"):
            self.next()
            return ListTerm(())
        items = [self.parse_term()]
        while self.at(","):
            self.next()
            items.append(self.parse_term())
        self.expect("]")
        return ListTerm(tuple(items))

    # --- types ---

    def parse_type(self) -> TypeExpr:
        t = self.peek()
        if self.at("["):
            self.next()
            a = self.parse_type()
            self.expect(",")
            b = self.parse_type()
            self.expect("]")
            return PairType(a, b)
        if t.kind != "name":
            self.fail("expected a type expression")
        self.next()
        name = t.text
        if name == "int" and not self.at("("):
            return IntType()
        if name in ("set", "rel", "enum") and self.at("("):
            self.next()
            if name == "set":
                inner = self.parse_type()
                self.expect(")")
                return SetType(inner)
            if name == "rel":
                a = self.parse_type()
                self.expect(",")
                b = self.parse_type()
                self.expect(")")
                return rel_type(a, b)
            self.expect("[")
            values = []
            while True:
                v = self.peek()
                if v.kind != "name":
                    self.fail("enum values must be atoms")
                values.append(self.next().text)
                if self.at(","):
                    self.next()
                    continue
                break
            self.expect("]")
            self.expect(")")
            return EnumType(tuple(values))
        return TypeName(name)

    # --- goals ---

    def parse_goal(self) -> Goal:
        return self._implies_expr()

    def _implies_expr(self) -> Goal:
        left = self._or_expr()
        if self.at_word("implies"):
            self.next()
            right = self._implies_expr()
            return Implies(left, right)
        return left

    def _or_expr(self) -> Goal:
        g = self._and_expr()
        while self.at_word("or"):
            self.next()
            g = Or(g, self._and_expr())
        return g

    def _and_expr(self) -> Goal:
        g = self._unary_goal()
        while self.at("&"):
            self.next()
            g = And(g, self._unary_goal())
        return g

    def _unary_goal(self) -> Goal:
        if self.at_word("neg"):
            self.next()
            self.expect("(")
            inner = self.parse_goal()
            self.expect(")")
            return Neg(inner)
        if self.at_word("foreach"):
            self.next()
            self.expect("(")
            pattern = self.parse_term()
            if not self.at_word("in"):
                self.fail("expected 'in' inside foreach")
            self.next()
            set_term = self.parse_term()
            self.expect(",")
            body = self.parse_goal()
            self.expect(")")
            return Foreach(pattern, set_term, body)
        return self._primary_goal()

    def _primary_goal(self) -> Goal:
        g = self._primary_goal_base()
        if self.at("!"):
            self.next()
            return CommitFirst(g)
        return g

    def _primary_goal_base(self) -> Goal:
        t = self.peek()
        if t.kind == "name" and self.peek(1).kind == "op" \
                and self.peek(1).text == "(" and t.text not in ("int", "cp"):
            return self._compound_atom()
        if self.at("("):
            mark = self.pos
            try:
                self.next()
                inner = self.parse_goal()
                self.expect(")")
                return inner
            except ParseError:
                self.pos = mark
            # fall through: a parenthesized term such as (X+1) > X
        lhs = self.parse_term()
        op = self.peek()
        if (op.kind == "op" and op.text in _INFIX_OPS) or \
                (op.kind == "name" and op.text in _INFIX_OPS):
            self.next()
            rhs = self.parse_term()
            name = "=<" if op.text == "<=" else op.text
            return Atom(name, (lhs, rhs))
        if isinstance(lhs, Const):
            return Atom(lhs.name, ())
        self.fail("expected a constraint or clause call")

    def _compound_atom(self) -> Goal:
        t = self.next()
        name = t.text
        self.expect("(")
        if name == "dec":
            target = self.parse_term()
            self.expect(",")
            ty = self.parse_type()
            self.expect(")")
            return Atom("dec", (target, ty))
        if name == "prolog_call":
            return self._prolog_call(t)
        if name == "naf":
            # naf(V) resolves at runtime; naf(goal) negates a call now
            if self.peek().kind == "var" and self.peek(1).text == ")":
                v = self.next()
                self.expect(")")
                return Atom("naf", (Var(v.text),))
            inner = self.parse_goal()
            self.expect(")")
            return Naf(inner)
        if name == "call":
            # the argument is a goal (possibly still a variable)
            if self.peek().kind == "var" and self.peek(1).text == ")":
                v = self.next()
                self.expect(")")
                return Atom("call", (Var(v.text),))
            inner = self.parse_goal()
            self.expect(")")
            return Atom("call", (inner,))
        args = []
        if not self.at(")"):
            args.append(self.parse_term())
            while self.at(","):
                self.next()
                args.append(self.parse_term())
        self.expect(")")
        return Atom(name, tuple(args))

    def _prolog_call(self, t: Token) -> Goal:
        # only the ansi_format shape from generated check files is known
        if not self.at_word("ansi_format"):
            raise ParseError("unsupported prolog_call form", t.line, t.col)
        self.next()
        self.expect("(")
        self.expect("[")
        color = ""
        while not self.at("]"):
            item = self.next()
            if item.kind != "name":
                raise ParseError("bad ansi_format style", item.line, item.col)
            if self.at("("):
                self.next()
                inner = self.next()
                self.expect(")")
                if item.text == "fg":
                    color = inner.text
            if self.at(","):
                self.next()
        self.expect("]")
        self.expect(",")
        text_tok = self.next()
        if text_tok.kind != "qatom":
            raise ParseError("ansi_format text must be quoted",
                             text_tok.line, text_tok.col)
        self.expect(",")
        self._list_term()
        self.expect(")")
        self.expect(")")
        return Atom("ansi", (Const(unquote(text_tok.text)), Const(color)))

    # --- files ---

    def parse_items(self):
        items = []
        while self.peek().kind != "end":
            items.append(self._parse_item())
        return items

    def _parse_item(self):
        t = self.peek()
        if self.at(":-"):
            self.next()
            goal = self.parse_goal()
            self.expect(".")
            return Directive(goal, t.line)
        if t.kind != "name":
            self.fail("expected a clause head, declaration or directive")
        name = t.text
        if name in _DECL_NAMES:
            return self._parse_declaration()
        head = self.next()
        params: tuple = ()
        if self.at("("):
            self.next()
            ps = [self.parse_term()]
            while self.at(","):
                self.next()
                ps.append(self.parse_term())
            self.expect(")")
            params = tuple(ps)
        if self.at("."):
            self.next()
            return ClauseDef(name, params, Atom("true", ()), head.line)
        self.expect(":-")
        body = self.parse_goal()
        self.expect(".")
        return ClauseDef(name, params, body, head.line)

    def _parse_declaration(self) -> Declaration:
        t = self.next()
        kind = t.text
        self.expect("(")
        if kind == "variables":
            lst = self._list_term()
            if not isinstance(lst, ListTerm) or \
                    not all(isinstance(v, Var) for v in lst.items):
                raise ParseError("variables(...) takes a list of variables",
                                 t.line, t.col)
            payload = tuple(v.name for v in lst.items)
        elif kind in ("invariant", "initial", "operation"):
            nm = self.next()
            if nm.kind != "name":
                raise ParseError(f"{kind}(...) takes a clause name", t.line, t.col)
            payload = nm.text
        elif kind == "def_type":
            nm = self.next()
            if nm.kind != "name":
                raise ParseError("def_type takes a name and a type", t.line, t.col)
            self.expect(",")
            payload = (nm.text, self.parse_type())
        else:  # dec_p_type
            nm = self.next()
            if nm.kind != "name":
                raise ParseError("dec_p_type takes name(types)", t.line, t.col)
            self.expect("(")
            tys = [self.parse_type()]
            while self.at(","):
                self.next()
                tys.append(self.parse_type())
            self.expect(")")
            payload = (nm.text, tuple(tys))
        self.expect(")")
        self.expect(".")
        return Declaration(kind, payload, t.line)


def _is_set_shape(t) -> bool:
    from .terms import SetCons
    return isinstance(t, (EmptySet, Var, SetCons, Interval, CartProd))


def parse_goal(text: str, vargen: VarGen | None = None) -> Goal:
    """Parse one goal; a single trailing dot is permitted."""
    p = Parser(text, vargen)
    g = p.parse_goal()
    if p.at("."):
        p.next()
    if p.peek().kind != "end":
        p.fail("unexpected trailing input after goal")
    return g


def parse_term(text: str, vargen: VarGen | None = None) -> Term:
    p = Parser(text, vargen)
    t = p.parse_term()
    if p.peek().kind != "end":
        p.fail("unexpected trailing input after term")
    return t


def parse_program(text: str, vargen: VarGen | None = None):
    """Parse a full source file into clause/declaration/directive items."""
    return Parser(text, vargen).parse_items()


def goal_complete(text: str) -> bool:
    """True when the text tokenizes and ends with a terminating dot."""
    try:
        tokens = tokenize(text)
    except ParseError:
        return False
    meaningful = [t for t in tokens if t.kind != "end"]
    return bool(meaningful) and meaningful[-1].text == "."
