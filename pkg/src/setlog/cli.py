"""Command-line entry point: interactive prompt by default, batch
flags for scripted runs."""

from __future__ import annotations

import argparse
import sys

from .errors import (ParseError, SetlogError, TimeoutExceeded, TypeCheckError,
                     UnknownClauseError)
from .repl import TIMEOUT_MSG, Repl, format_solution
from .session import HaltSession, Session
from .vcg import generate, run_checks

USER_ERRORS = (ParseError, TypeCheckError, UnknownClauseError, SetlogError)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="setlog",
        description="Satisfiability solver over sets, binary relations "
                    "and integers; runs forgram simulations and "
                    "verification conditions.")
    p.add_argument("--consult", action="append", default=[],
                   metavar="FILE", help="consult FILE before anything else "
                   "(repeatable)")
    p.add_argument("--goal", metavar="GOAL",
                   help="solve GOAL and exit (0 when satisfiable)")
    p.add_argument("--all-solutions", action="store_true",
                   help="with --goal, print every solution")
    p.add_argument("--timeout", type=float, metavar="SEC",
                   help="per-goal time budget in seconds "
                   "(default 30; 0 disables the limit)")
    p.add_argument("--solver", choices=["clpq", "clpfd"],
                   help="integer solving mode (default clpq)")
    p.add_argument("--typecheck", action="store_true",
                   help="activate the type checker before consulting")
    p.add_argument("--vcg", metavar="FILE",
                   help="generate the verification-condition file for FILE")
    p.add_argument("--check", metavar="BASE",
                   help="consult BASE-vcg.pl and run its checks "
                   "(0 when all OK)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    session = Session(out=sys.stdout, color=sys.stdout.isatty())
    if args.timeout is not None:
        session.budget = args.timeout or None
    if args.typecheck:
        session.typed = True
    if args.solver:
        session.int_mode = args.solver
    try:
        for name in args.consult:
            session.consult(name)
        if args.vcg:
            generate(session._resolve_path(args.vcg), session)
        if args.check:
            session.consult(args.check + "-vcg.pl")
            results = run_checks(session, args.check)
            if any(r.status != "OK" for r in results):
                return 1
            if not args.goal:
                return 0
        if args.goal:
            return run_batch_goal(session, args.goal, args.all_solutions)
    except USER_ERRORS as exc:
        sys.stdout.write("***ERROR***: %s\n" % exc)
        return 1
    except HaltSession:
        return 0
    if not (args.goal or args.check or args.vcg):
        Repl(session).loop()
    return 0


def run_batch_goal(session: Session, text: str, all_solutions: bool) -> int:
    if not text.rstrip().endswith("."):
        text = text + "."
    solutions = session.submit(text)
    if solutions is None:
        return 0
    found = False
    try:
        for sol in solutions:
            found = True
            if not session.at_line_start:
                session.write("\n")
            session.write(format_solution(sol) + "\n")
            if not all_solutions:
                break
            session.write("\n")
    except TimeoutExceeded:
        if not session.at_line_start:
            session.write("\n")
        session.write(TIMEOUT_MSG + "\n")
        return 1
    if not found:
        session.write("no\n")
        return 1
    if all_solutions:
        session.write("no\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
