"""The interactive prompt: goal entry, solution stepping, commands.

Output format notes live here because both the REPL and the batch
runner go through format_solution; the two must print identical
solution blocks for the same goal.
"""

from __future__ import annotations

import sys

from .errors import (ParseError, SetlogError, TimeoutExceeded, TypeCheckError,
                     UnknownClauseError)
from .goals import print_goal
from .session import HaltSession, Session
from .terms import print_term

PROMPT = "{log}=> "
ASK = "Another solution? (y/n) "
TIMEOUT_MSG = "***TIMEOUT***"


def format_binding(var, value) -> str:
    return "%s = %s" % (var.name, print_term(value))


def format_residue_entry(entry) -> str:
    return print_goal(entry)


def format_solution(sol) -> str:
    """Render one solution block, without a trailing newline."""
    lines = [format_binding(v, value) for v, value in sol.bindings]
    body = ",\n".join(lines) if lines else "true"
    if sol.residue:
        body += "\nConstraint: " + ", ".join(
            format_residue_entry(e) for e in sol.residue)
    return body


class Repl:
    def __init__(self, session=None, stdin=None, stdout=None):
        self.stdout = stdout if stdout is not None else sys.stdout
        self.stdin = stdin if stdin is not None else sys.stdin
        self.session = session or Session(out=self.stdout)
        self.session.out = self.stdout

    def write(self, text):
        self.session.write(text)
        self.stdout.flush()

    def ensure_line(self):
        """Break the line when a goal's own writes left it open."""
        if not self.session.at_line_start:
            self.write("\n")

    def read_line(self):
        line = self.stdin.readline()
        if line == "":
            raise EOFError()
        # The user's newline moved the cursor even though it never
        # passed through session.write.
        self.session.at_line_start = True
        return line.rstrip("\n")

    # --- input accumulation ---

    def read_goal(self):
        """Read lines until a goal terminated by '.' is complete."""
        buf = ""
        prompt = PROMPT
        while True:
            self.write(prompt)
            line = self.read_line()
            buf = (buf + "\n" + line) if buf else line
            if goal_complete(buf):
                return buf
            if not buf.strip():
                buf = ""
                continue
            prompt = "      "

    # --- main loop ---

    def loop(self):
        while True:
            try:
                text = self.read_goal()
            except EOFError:
                self.write("\n")
                return
            if not text.strip():
                continue
            try:
                self.run_goal(text)
            except HaltSession:
                return

    def run_goal(self, text):
        try:
            solutions = self.session.submit(text)
            if solutions is None:
                self.write("\n")
                return
            self.step_solutions(solutions)
        except HaltSession:
            raise
        except TimeoutExceeded:
            self.ensure_line()
            self.write(TIMEOUT_MSG + "\n\n")
        except (ParseError, TypeCheckError, UnknownClauseError,
                SetlogError) as exc:
            self.ensure_line()
            self.write("***ERROR***: %s\n\n" % exc)

    def step_solutions(self, solutions):
        try:
            for sol in solutions:
                self.ensure_line()
                self.write(format_solution(sol) + "\n")
                self.write("\n" + ASK)
                try:
                    answer = self.read_line()
                except EOFError:
                    self.write("\n")
                    return
                if not answer.strip().lower().startswith("y"):
                    break
                self.write("\n")
            self.write("no\n\n")
        except TimeoutExceeded:
            self.ensure_line()
            self.write(TIMEOUT_MSG + "\n\n")


def goal_complete(text: str) -> bool:
    """True when the text ends with a goal-terminating dot, outside
    quotes and comments."""
    i, n = 0, len(text)
    last_dot = False
    while i < n:
        c = text[i]
        if c == "'":
            i += 1
            while i < n and text[i] != "'":
                i += 2 if text[i] == "\\" else 1
            i += 1
            last_dot = False
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if not c.isspace():
            last_dot = c == "." and not (i + 1 < n and text[i + 1].isdigit())
        i += 1
    return last_dot


def main():
    Repl().loop()


if __name__ == "__main__":
    main()
