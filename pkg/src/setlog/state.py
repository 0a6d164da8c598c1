"""Solver state and solving context.

A State is an immutable value: the current substitution, the solved
(irreducible) constraint store in insertion order, and a pending queue
of constraints re-activated by recent bindings.  Procedures never
mutate a state; they return extended copies, so backtracking is just
dropping a reference.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from .errors import TimeoutExceeded
from .goals import Atom, Foreach, goal_vars
from .terms import Subst, Var, VarGen


_STORED_VARS_CACHE: dict = {}


def stored_vars(entry):
    """Variables mentioned by a store entry (Atom or Foreach),
    memoized by identity since wake scans revisit the same entries."""
    key = id(entry)
    hit = _STORED_VARS_CACHE.get(key)
    if hit is not None and hit[0] is entry:
        return hit[1]
    if len(_STORED_VARS_CACHE) > 1_000_000:
        _STORED_VARS_CACHE.clear()
    vs = frozenset(goal_vars(entry))
    _STORED_VARS_CACHE[key] = (entry, vs)
    return vs


@dataclass(frozen=True)
class State:
    subst: Subst = field(default_factory=Subst)
    store: tuple = ()
    pending: tuple = ()

    def resolve(self, t):
        return self.subst.apply(t)

    def bind(self, v: Var, t) -> "State":
        """Extend the substitution; store entries naming v wake up."""
        new_subst = self.subst.bind(v, t)
        stay, woken = [], []
        for entry in self.store:
            if v in stored_vars(entry):
                woken.append(entry)
            else:
                stay.append(entry)
        return State(new_subst, tuple(stay), self.pending + tuple(woken))

    def push_pending(self, *goals) -> "State":
        return replace(self, pending=self.pending + tuple(goals))

    def add_store(self, entry) -> "State":
        """Store an irreducible constraint, skipping exact duplicates."""
        if isinstance(entry, Atom):
            from .goals import map_atom_args
            entry = map_atom_args(self.subst.apply, entry)
        if entry in self.store:
            return self
        return replace(self, store=self.store + (entry,))

    def drain_pending(self):
        return list(self.pending), replace(self, pending=())


class SolveContext:
    """Per-goal solving environment: program, mode, budget, output."""

    def __init__(self, program=None, mode="clpq", vargen=None, budget=None,
                 out=None, warn=None, color=False):
        self.program = program
        self.mode = mode
        self.vargen = vargen or VarGen()
        self.deadline = None if budget is None else time.monotonic() + budget
        self.out = out
        self.warn_cb = warn
        self.color = color
        self.warnings = []
        self._steps = 0

    def fresh(self, hint="") -> Var:
        return self.vargen.fresh(hint)

    def tick(self):
        self._steps += 1
        if self.deadline is not None and self._steps % 64 == 0:
            if time.monotonic() > self.deadline:
                raise TimeoutExceeded("goal exceeded its time budget")

    def warn(self, message: str):
        self.warnings.append(message)
        if self.warn_cb:
            self.warn_cb(message)

    def write(self, text: str):
        if self.out is not None:
            self.out.write(text)
