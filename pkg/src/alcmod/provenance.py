"""Inference bookkeeping: which clauses and input axioms each clause came from."""

from __future__ import annotations

from typing import Iterable

from .syntax import TAUTOLOGY, Clause, IdFactory, Literal, canonical_clause, make_clause


class ProvenanceGraph:
    """Derived clause id -> premise ids, and root clause id -> input axiom indices.

    The graph also owns the clause-id factory, so every clause of a run gets
    its id here.
    """

    def __init__(self) -> None:
        self.ids = IdFactory()
        self.edges: dict[int, frozenset[int]] = {}
        self.roots: dict[int, frozenset[int]] = {}

    def root(self, lits: Iterable[Literal], axiom_index: int) -> Clause | None:
        c = canonical_clause(lits, self.ids)
        if c is TAUTOLOGY:
            return None
        self.roots[c.id] = frozenset({axiom_index})
        return c

    def derive(self, lits: Iterable[Literal], premises: Iterable[Clause], *, keep_trivial: bool = False) -> Clause | None:
        """New clause inferred from ``premises``; None when it is a tautology."""
        if keep_trivial:
            c = make_clause(lits, self.ids)
        else:
            c = canonical_clause(lits, self.ids)
            if c is TAUTOLOGY:
                return None
        self.edges[c.id] = frozenset(p.id for p in premises)
        return c

    def axioms_behind(self, clause_ids: Iterable[int]) -> set[int]:
        """Input axiom indices reachable backwards from the given clauses."""
        seen: set[int] = set()
        stack = list(clause_ids)
        out: set[int] = set()
        while stack:
            cid = stack.pop()
            if cid in seen:
                continue
            seen.add(cid)
            out |= self.roots.get(cid, frozenset())
            stack.extend(self.edges.get(cid, ()))
        return out

    def is_acyclic(self) -> bool:
        # premises always carry smaller ids than their conclusions
        return all(all(p < cid for p in ps) for cid, ps in self.edges.items())
