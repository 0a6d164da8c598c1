"""Verification-condition generation for state-machine forgrams.

From a file declaring variables, invariants, initials and operations,
emit a consultable check file with one satisfiability condition per
initial and operation and one invariance lemma per (operation,
invariant) pair, plus the harness that discharges them.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

from .errors import SetlogError, TimeoutExceeded
from .goals import And, Atom, Goal
from .program import Program
from .reader import Parser
from .solver import solve
from .terms import Const, VarGen, print_term


@dataclass(frozen=True)
class VerificationCondition:
    id: str
    kind: str  # "sat" or "unsat"
    source: tuple  # (operation-or-initial, invariant-or-"")


@dataclass
class CheckResult:
    vc_id: str
    kind: str
    status: str  # "OK", "ERROR" or "TIMEOUT"
    counterexample: object = None


def generate(source_path: str, session=None) -> str:
    """Write the check file for a forgram; returns the output path."""
    with open(source_path, encoding="utf-8") as handle:
        text = handle.read()
    items = Parser(text, VarGen()).parse_items()
    prog = Program()
    prog.load_items(items)
    base = os.path.splitext(os.path.basename(source_path))[0]
    warn = session.warn if session is not None else (lambda m: None)
    check_wellformed(prog, base, warn)
    out_path = os.path.join(os.path.dirname(source_path) or ".",
                            base + "-vcg.pl")
    content = render_check_file(prog, base)
    with open(out_path, "w", encoding="utf-8") as handle:
        handle.write(content)
    return out_path


def check_wellformed(prog: Program, base: str, warn):
    if not prog.state_vars:
        raise SetlogError(
            "vcg: %s has no variables declaration" % base)
    if not prog.invariants:
        raise SetlogError(
            "vcg: %s declares no invariant" % base)
    names = ([(n, "invariant") for n in prog.invariants]
             + [(n, "initial") for n in prog.initials]
             + [(n, "operation") for n in prog.operations])
    arity = {}
    for name, role in names:
        keys = [k for k in prog.clause_keys() if k[0] == name]
        if not keys:
            raise SetlogError(
                "vcg: %s %s has no clause" % (role, name))
        arity[name] = keys[0][1]
    state = set(prog.state_vars)
    for name in prog.invariants:
        if arity[name] != len(prog.state_vars):
            raise SetlogError(
                "vcg: invariant %s must take the %d state variables"
                % (name, len(prog.state_vars)))
        if not prog.has_clause("n_" + name, arity[name]):
            warn("***WARNING***: invariant %s has no negative clause n_%s"
                 % (name, name))
    for name in prog.initials + prog.operations:
        params = _params(prog, name)
        missing = state - {print_term(p) for p in params}
        if missing:
            raise SetlogError(
                "vcg: %s does not mention state variable %s"
                % (name, sorted(missing)[0]))


def _params(prog: Program, name: str):
    for (cname, _arity), clauses in prog.clause_map.items():
        if cname == name:
            return clauses[0].params
    return ()


def _changes_state(prog: Program, op: str) -> bool:
    names = {print_term(p) for p in _params(prog, op)}
    return any(v + "_" in names for v in prog.state_vars)


def list_vcs(prog: Program) -> list:
    vcs = []
    for init in prog.initials:
        for inv in prog.invariants:
            vcs.append(VerificationCondition(
                "%s_sat_%s" % (init, inv), "sat", (init, inv)))
    for op in prog.operations:
        vcs.append(VerificationCondition(op + "_is_sat", "sat", (op, "")))
        for inv in prog.invariants:
            vcs.append(VerificationCondition(
                "%s_pi_%s" % (op, inv), "unsat", (op, inv)))
    return vcs


def render_check_file(prog: Program, base: str) -> str:
    out = []
    out.append("% Verification conditions for {0}.pl\n".format(base))
    out.append("% Run check_vcs_{0} to see if the program verifies "
               "all the VCs\n".format(base))
    out.append(":- notype_check.\n")
    out.append(":- consult('{0}.pl').\n".format(base))
    state = ",".join(prog.state_vars)
    state_ = ",".join(v + "_" for v in prog.state_vars)
    for init in prog.initials:
        args = ",".join(print_term(p) for p in _params(prog, init))
        for inv in prog.invariants:
            out.append("{0}_sat_{1} :-\n"
                       "    {0}({2}) &\n"
                       "    {1}({3}).\n".format(init, inv, args, state))
    for op in prog.operations:
        args = ",".join(print_term(p) for p in _params(prog, op))
        if _changes_state(prog, op):
            out.append("{0}_is_sat :-\n"
                       "    {0}({1}) &\n"
                       "    [{2}] neq [{3}].\n".format(op, args, state, state_))
        else:
            out.append("{0}_is_sat :-\n"
                       "    {0}({1}).\n".format(op, args))
        for inv in prog.invariants:
            if _changes_state(prog, op):
                out.append(
                    "{0}_pi_{1} :-\n"
                    "    neg(\n"
                    "        % here conjoin other invariants as hypothesis"
                    " if necessary\n"
                    "        {1}({2}) &\n"
                    "        {0}({3}) implies\n"
                    "        {1}({4})\n"
                    "    ).\n".format(op, inv, state, args, state_))
            else:
                out.append(
                    "{0}_pi_{1} :-\n"
                    "    % {0} doesn't change {1} variables\n"
                    "    neg(true).\n".format(op, inv))
    out.append(
        "check_sat_vc(VCID) :-\n"
        "    write('\\nChecking ') & write(VCID) & write(' ... ') &\n"
        "    ((call(VCID) & write_ok)!\n"
        "     or\n"
        "     write_err\n"
        "    ).\n")
    out.append(
        "check_unsat_vc(VCID) :-\n"
        "    write('\\nChecking ') & write(VCID) & write(' ... ') &\n"
        "    ((call(naf(VCID)) & write_ok)!\n"
        "     or\n"
        "     write_err\n"
        "    ).\n")
    out.append(
        "write_ok :-\n"
        "    prolog_call(ansi_format([bold,fg(green)],'OK',[[]])).\n")
    out.append(
        "write_err :-\n"
        "    prolog_call(ansi_format([bold,fg(red)],'ERROR',[[]])).\n")
    vcs = list_vcs(prog)
    lines = ["check_vcs_%s :-" % base]
    for vc in vcs:
        if vc.kind == "sat":
            lines.append("    check_sat_vc(%s) &" % vc.id)
    for vc in vcs:
        if vc.kind == "unsat":
            lines.append("    check_unsat_vc(%s) &" % vc.id)
    lines.append("    true.")
    out.append("\n".join(lines) + "\n")
    out.append(
        ":- nl &\n"
        "    prolog_call(ansi_format([bold,fg(green)],\n"
        "        'Type checking has been deactivated.',[[]])) &\n"
        "    nl & nl.\n")
    out.append(
        ":- nl &\n"
        "    prolog_call(ansi_format([bold,fg(green)],\n"
        "        'Call check_vcs_{0} to run the verification"
        " conditions.',\n"
        "        [[]])) &\n"
        "    nl & nl.\n".format(base))
    return "\n".join(out)


# --- running the checks ---


def driver_vcs(prog: Program, base: str) -> list:
    """Read the VC list back out of the check_vcs_<base> driver clause."""
    name = "check_vcs_" + base
    if not prog.has_clause(name, 0):
        raise SetlogError("no %s clause; consult the check file first" % name)
    clause = prog.clauses(name, 0)[0]
    vcs = []

    def walk(g: Goal):
        if isinstance(g, And):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, Atom) and g.name in ("check_sat_vc",
                                                "check_unsat_vc"):
            vc_id = g.args[0]
            if isinstance(vc_id, Const):
                kind = "sat" if g.name == "check_sat_vc" else "unsat"
                vcs.append(VerificationCondition(vc_id.name, kind, ("", "")))

    walk(clause.body)
    return vcs


def run_checks(session, base: str, per_vc_budget=None) -> list:
    """Discharge every VC listed by the driver clause; prints one
    Checking line per VC and returns the results."""
    from .repl import format_solution

    results = []
    budget = per_vc_budget if per_vc_budget is not None else session.budget
    for vc in driver_vcs(session.program, base):
        session.write("\nChecking %s ... " % vc.id)
        clause = session.program.clauses(vc.id, 0)[0]
        ctx = session.context()
        if budget is not None:
            ctx.deadline = time.monotonic() + budget
        try:
            first = None
            for sol in solve(clause.body, ctx):
                first = sol
                break
            sat = first is not None
        except TimeoutExceeded:
            results.append(CheckResult(vc.id, vc.kind, "TIMEOUT"))
            session.write(_status("TIMEOUT", session.color))
            continue
        if (vc.kind == "sat") == sat:
            results.append(CheckResult(vc.id, vc.kind, "OK"))
            session.write(_status("OK", session.color))
        else:
            results.append(CheckResult(vc.id, vc.kind, "ERROR", first))
            session.write(_status("ERROR", session.color))
            if vc.kind == "unsat" and first is not None:
                session.write("\n" + format_solution(first))
    session.write("\n")
    return results


def _status(text: str, color: bool) -> str:
    if not color:
        return text
    code = {"OK": "32", "ERROR": "31"}.get(text)
    if code is None:
        return text
    return "\x1b[1;%sm%s\x1b[0m" % (code, text)
