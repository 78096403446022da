"""Clausification: NNF, one fresh definer per role filler, CNF by distribution."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterable

from .provenance import ProvenanceGraph
from .syntax import (
    BOTTOM,
    TOP,
    And,
    Atom,
    Axiom,
    Clause,
    Concept,
    Exists,
    Forall,
    LitTag,
    Literal,
    Name,
    Not,
    Ontology,
    Or,
    Signature,
    definer_name,
    disj,
    length,
    nnf,
    signature_of,
)

EXISTS = "exists"
FORALL = "forall"


class InvariantViolation(RuntimeError):
    pass


@dataclass
class DefinerMap:
    """C_D for every definer, plus the single restriction each definer fills."""

    defs: dict[Name, Concept] = field(default_factory=dict)
    positive_literal: dict[Name, tuple[Name, str]] = field(default_factory=dict)

    def __contains__(self, d: Name) -> bool:
        return d in self.defs

    def __len__(self) -> int:
        return len(self.defs)


@dataclass
class NormalizedOntology:
    clauses: tuple[Clause, ...]
    definers: DefinerMap
    graph: ProvenanceGraph

    @property
    def origin(self) -> dict[int, frozenset[int]]:
        return {c.id: self.graph.roots[c.id] for c in self.clauses if c.id in self.graph.roots}

    def with_clauses(self, clauses: Iterable[Clause]) -> NormalizedOntology:
        return NormalizedOntology(tuple(clauses), self.definers, self.graph)

    def literal_sets(self) -> set[frozenset[Literal]]:
        return {c.literal_set for c in self.clauses}

    def __len__(self) -> int:
        return len(self.clauses)


def clausify(o: Ontology, graph: ProvenanceGraph | None = None) -> NormalizedOntology:
    """cl(O): every clause is tagged with the index of the axiom it came from."""
    graph = graph if graph is not None else ProvenanceGraph()
    definers = DefinerMap()
    counter = itertools.count(1)
    seen: dict[frozenset[Literal], Clause] = {}

    for index, ax in enumerate(o.axioms):
        if any(n.is_definer for n in _names(ax)):
            raise InvariantViolation(f"axiom {index} already contains definers")
        for concept in _definitions(nnf(disj([Not(ax.lhs), ax.rhs])), definers, counter):
            for lits in cnf(concept):
                key = frozenset(lits)
                if key in seen:
                    continue
                c = graph.root(lits, index)
                if c is not None:
                    seen[key] = c
    return NormalizedOntology(tuple(seen.values()), definers, graph)


def _names(ax: Axiom) -> set[Name]:
    return set(signature_of(ax).concepts)


def _definitions(top: Concept, definers: DefinerMap, counter) -> list[Concept]:
    """The axiom itself followed by the ¬D ⊔ F definitions, depth first."""
    out: list[Concept] = []

    def visit(c: Concept) -> Concept:
        if isinstance(c, (Exists, Forall)):
            d = definer_name(next(counter))
            definers.defs[d] = c.filler
            definers.positive_literal[d] = (c.role, EXISTS if isinstance(c, Exists) else FORALL)
            slot = len(out)
            out.append(TOP)
            out[slot] = disj([Not(Atom(d)), visit(c.filler)])
            return type(c)(c.role, Atom(d))
        if isinstance(c, And):
            return And(visit(a) for a in c.args)
        if isinstance(c, Or):
            return Or(visit(a) for a in c.args)
        return c

    head = visit(top)
    return [head] + out


def cnf(c: Concept) -> list[list[Literal]]:
    """Distribute ⊔ over ⊓ for an NNF concept whose restrictions are literal-shaped."""
    if c == TOP:
        return []
    if c == BOTTOM:
        return [[]]
    if isinstance(c, Atom):
        return [[Literal.pos(c.name)]]
    if isinstance(c, Not):
        if not isinstance(c.arg, Atom):
            raise ValueError("cnf expects negation normal form")
        return [[Literal.neg(c.arg.name)]]
    if isinstance(c, Exists):
        return [[Literal.ex(c.role, c.filler)]]
    if isinstance(c, Forall):
        return [[Literal.all(c.role, c.filler)]]
    if isinstance(c, And):
        return [cl for a in c.args for cl in cnf(a)]
    if isinstance(c, Or):
        acc: list[list[Literal]] = [[]]
        for a in c.args:
            part = cnf(a)
            acc = [x + y for x in acc for y in part]
            if not acc:
                break
        return acc
    raise TypeError(c)


# ---------------------------------------------------------------- ordering


class DefinerOrder:
    """Reflexive-transitive ⪯_d: D' ⪯_d D when D' occurs in a clause ¬D ⊔ C."""

    def __init__(self, below: dict[Name, set[Name]]) -> None:
        self._below = below
        self._above: dict[Name, set[Name]] = {d: {d} for d in below}
        for d, lower in below.items():
            for x in lower:
                self._above.setdefault(x, {x}).add(d)

    def le(self, a: Name, b: Name) -> bool:
        return a == b or a in self._below.get(b, ())

    def below(self, d: Name) -> set[Name]:
        return set(self._below.get(d, {d}))

    def above(self, d: Name) -> set[Name]:
        return set(self._above.get(d, {d}))

    def pairs(self) -> set[tuple[Name, Name]]:
        return {(x, d) for d, lower in self._below.items() for x in lower}


def definer_order(n: NormalizedOntology) -> DefinerOrder:
    direct: dict[Name, set[Name]] = {d: set() for d in n.definers.defs}
    for c in n.clauses:
        heads = [l.name for l in c.literals if l.tag is LitTag.NEG and l.name.is_definer]
        if not heads:
            continue
        inside = c.definers()
        for d in heads:
            direct.setdefault(d, set()).update(x for x in inside if x != d)
    try:
        order = list(TopologicalSorter(direct).static_order())
    except CycleError as exc:
        raise InvariantViolation(f"definer order is cyclic: {exc.args[1]}") from exc
    below: dict[Name, set[Name]] = {}
    for d in order:  # dependencies come first
        acc = {d}
        for x in direct.get(d, ()):
            acc |= below[x]
        below[d] = acc
    return DefinerOrder(below)


# ----------------------------------------------------------------- helpers


def roles_of(name: Name, clauses: Iterable[Clause]) -> set[Name]:
    """Rol(A): roles r such that some literal Qr.A occurs."""
    out = set()
    for c in clauses:
        for l in c.literals:
            if l.is_role and isinstance(l.filler, Atom) and l.filler.name == name:
                out.add(l.role)
    return out


def role_index(clauses: Iterable[Clause]) -> dict[Name, set[Name]]:
    """Rol for every concept name occurring as a filler."""
    out: dict[Name, set[Name]] = {}
    for c in clauses:
        for l in c.literals:
            if l.is_role and isinstance(l.filler, Atom):
                out.setdefault(l.filler.name, set()).add(l.role)
    return out


def outside_names(clauses: Iterable[Clause], sigma: Signature) -> set[Name]:
    """Out_Σ: names whose role context is not contained in Σ."""
    return {a for a, roles in role_index(clauses).items() if not roles <= sigma.roles}


def clauses_length(clauses: Iterable[Clause]) -> int:
    return sum(length(c) for c in clauses)


def clauses_as_ontology(clauses: Iterable[Clause]) -> Ontology:
    return Ontology(tuple(c.as_axiom() for c in clauses))
