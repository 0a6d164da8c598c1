"""Consulted-program database.

Clauses are keyed by name and arity.  Re-consulting a file replaces
earlier clauses for the keys it defines instead of stacking duplicate
definitions, which is what makes edit/reload cycles behave.
State-machine declarations (variables, invariant, initial, operation)
and the typing declarations (def_type, dec_p_type) are kept alongside
for the type checker and the verification-condition generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .reader import ClauseDef, Declaration, Directive


@dataclass
class Program:
    clause_map: dict = field(default_factory=dict)
    state_vars: tuple = ()
    invariants: list = field(default_factory=list)
    initials: list = field(default_factory=list)
    operations: list = field(default_factory=list)
    type_defs: dict = field(default_factory=dict)
    clause_sigs: dict = field(default_factory=dict)

    def has_clause(self, name: str, arity: int) -> bool:
        return (name, arity) in self.clause_map

    def clauses(self, name: str, arity: int):
        return self.clause_map.get((name, arity), [])

    def clause_keys(self):
        return list(self.clause_map)

    def add_clause(self, clause: ClauseDef, fresh_keys: set):
        key = (clause.name, clause.arity)
        if key not in fresh_keys:
            fresh_keys.add(key)
            self.clause_map[key] = []
        self.clause_map[key].append(clause)

    def add_declaration(self, decl: Declaration):
        if decl.kind == "variables":
            self.state_vars = decl.payload
        elif decl.kind == "invariant":
            if decl.payload not in self.invariants:
                self.invariants.append(decl.payload)
        elif decl.kind == "initial":
            if decl.payload not in self.initials:
                self.initials.append(decl.payload)
        elif decl.kind == "operation":
            if decl.payload not in self.operations:
                self.operations.append(decl.payload)
        elif decl.kind == "def_type":
            name, ty = decl.payload
            self.type_defs[name] = ty
        elif decl.kind == "dec_p_type":
            name, tys = decl.payload
            self.clause_sigs[name] = tys

    def load_items(self, items, on_directive=None):
        """Install parsed file items in order.

        Directives are handed to on_directive as they are met, so their
        effects interleave with clause loading the way the file reads.
        """
        fresh_keys: set = set()
        loaded = []
        for item in items:
            if isinstance(item, ClauseDef):
                self.add_clause(item, fresh_keys)
                loaded.append(item)
            elif isinstance(item, Declaration):
                self.add_declaration(item)
            elif isinstance(item, Directive):
                if on_directive is not None:
                    on_directive(item.goal)
            else:
                raise TypeError("unexpected program item %r" % (item,))
        return loaded
