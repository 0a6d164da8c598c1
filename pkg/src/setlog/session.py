"""Interactive session: a consulted program plus the mode switches.

The REPL and the batch CLI both drive one of these.  Commands
(type_check, notype_check, int_solver, consult, vcg, halt) arrive as
ordinary atoms and are intercepted before the solver sees them.
"""

from __future__ import annotations

import os
import sys

from .errors import SetlogError, TypeCheckError
from .goals import Atom
from .program import Program
from .reader import Parser, parse_goal
from .solver import solve
from .state import SolveContext
from .terms import Const, VarGen
from .typecheck import Checker

COMMAND_NAMES = {"type_check", "notype_check", "int_solver", "consult",
                 "vcg", "halt"}


class HaltSession(Exception):
    pass


# Generous enough for every bundled example, small enough that a
# diverging goal turns into ***TIMEOUT*** instead of a hang.
DEFAULT_BUDGET = 30.0


class Session:
    def __init__(self, out=None, budget=DEFAULT_BUDGET, color=False):
        self.program = Program()
        self.typed = False
        self.int_mode = "clpq"
        self.budget = budget
        self.out = out if out is not None else sys.stdout
        self.color = color
        self.base_dirs = [os.getcwd()]
        self._consult_depth = 0
        self.at_line_start = True

    # --- output ---

    def write(self, text):
        if text:
            self.at_line_start = text.endswith("\n")
        if self.out is not None:
            self.out.write(text)

    def warn(self, message):
        self.write(message + "\n")

    # --- commands ---

    def is_command(self, goal):
        return isinstance(goal, Atom) and goal.name in COMMAND_NAMES

    def run_command(self, goal):
        name = goal.name
        if name == "halt":
            raise HaltSession()
        if name == "type_check":
            self.typed = True
            return
        if name == "notype_check":
            self.typed = False
            return
        if name == "int_solver":
            arg = goal.args[0] if goal.args else None
            if not (isinstance(arg, Const) and arg.name in ("clpq", "clpfd")):
                raise SetlogError("int_solver takes clpq or clpfd")
            self.int_mode = arg.name
            return
        if name == "consult":
            self.consult(self._path_arg(goal))
            return
        if name == "vcg":
            from .vcg import generate
            generate(self._resolve_path(self._path_arg(goal)), self)
            return
        raise SetlogError("unknown command %s" % name)

    def _path_arg(self, goal):
        if len(goal.args) != 1 or not isinstance(goal.args[0], Const):
            raise SetlogError("%s takes a quoted file name" % goal.name)
        return goal.args[0].name

    def _resolve_path(self, name):
        if os.path.isabs(name):
            return name
        return os.path.join(self.base_dirs[-1], name)

    # --- consulting ---

    def consult(self, name):
        path = self._resolve_path(name)
        try:
            with open(path, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise SetlogError("cannot consult %s: %s" % (name, exc))
        items = Parser(text, VarGen()).parse_items()
        top = self._consult_depth == 0
        self.base_dirs.append(os.path.dirname(path) or ".")
        self._consult_depth += 1
        try:
            loaded = self.program.load_items(items, self._run_directive)
        finally:
            self._consult_depth -= 1
            self.base_dirs.pop()
        if self.typed:
            checker = Checker(self.program)
            for clause in loaded:
                checker.check_clause(clause)
        if top:
            self.write("file %s consulted.\n" % name)

    def _run_directive(self, goal):
        if self.is_command(goal):
            self.run_command(goal)
            return
        ctx = self.context()
        for _solution in solve(goal, ctx):
            return

    # --- goals ---

    def context(self, vargen=None):
        # out=self keeps the cursor tracking in write() coherent when
        # goals print through the write/nl builtins.
        return SolveContext(
            program=self.program, mode=self.int_mode,
            vargen=vargen or VarGen(), budget=self.budget,
            out=self, warn=self.warn, color=self.color)

    def submit(self, text):
        """Parse and solve one goal line; returns a solution iterator,
        or None when the line was a session command."""
        vargen = VarGen()
        goal = parse_goal(text, vargen)
        if self.is_command(goal):
            self.run_command(goal)
            return None
        if self.typed:
            Checker(self.program).check_goal(goal)
        return solve(goal, self.context(vargen))
