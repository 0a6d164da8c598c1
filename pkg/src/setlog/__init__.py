"""Satisfiability solver for finite sets, binary relations and linear
integer arithmetic, with a clause language for writing forgrams, an
interactive prompt, a type checker and a verification-condition
generator."""

from .errors import (ParseError, SetlogError, TimeoutExceeded, TypeCheckError,
                     UnknownClauseError)
from .goals import And, Atom, Foreach, Implies, Naf, Neg, Or, print_goal
from .reader import parse_goal, parse_term
from .session import Session
from .solver import Solution, solve
from .state import SolveContext, State
from .terms import (Const, EmptySet, Int, Interval, ListTerm, SetCons,
                    TypedConst, Var, print_term)

__version__ = "0.1.0"

__all__ = [
    "And", "Atom", "Const", "EmptySet", "Foreach", "Implies", "Int",
    "Interval", "ListTerm", "Naf", "Neg", "Or", "ParseError", "SetCons",
    "Session", "SetlogError", "Solution", "SolveContext", "State",
    "TimeoutExceeded", "TypeCheckError", "TypedConst", "UnknownClauseError",
    "Var", "parse_goal", "parse_term", "print_goal", "print_term", "solve",
    "__version__",
]
