"""Shared inputs and comparison helpers for the test suite."""

from __future__ import annotations

import itertools
from typing import Iterable

from alcmod.parser_io import parse_ontology
from alcmod.syntax import (
    BOTTOM,
    TOP,
    Clause,
    Literal,
    Name,
    Signature,
    concept_name,
    definer_name,
    role_name,
)

RUNNING = """
SubClassOf(A1 ObjectUnionOf(ObjectSomeValuesFrom(r ObjectSomeValuesFrom(s B1)) ObjectSomeValuesFrom(r B2)))
SubClassOf(A2 ObjectUnionOf(A3 ObjectAllValuesFrom(s B3)))
SubClassOf(ObjectIntersectionOf(B1 B3) owl:Nothing)
SubClassOf(B4 A4)
SubClassOf(B2 B4)
"""
RUNNING_SIGMA = Signature.of(["A1", "A2", "A3", "A4"], ["r"])

ISOLATED = """
SubClassOf(A ObjectAllValuesFrom(r ObjectSomeValuesFrom(s B1)))
SubClassOf(A1 ObjectAllValuesFrom(r ObjectAllValuesFrom(s B2)))
SubClassOf(ObjectIntersectionOf(B1 B2) owl:Nothing)
"""
ISOLATED_SIGMA = Signature.of(["A", "A1"], ["r"])

CYCLIC = """
SubClassOf(A ObjectSomeValuesFrom(r B))
SubClassOf(B ObjectSomeValuesFrom(s B))
SubClassOf(B B1)
SubClassOf(B1 A1)
"""
CYCLIC_SIGMA = Signature.of(["A", "A1"], ["r", "s"])


def running():
    return parse_ontology(RUNNING)


def isolated():
    return parse_ontology(ISOLATED)


def cyclic():
    return parse_ontology(CYCLIC)


def axioms(text: str) -> set:
    """Axiom set of a functional-syntax snippet, for structural comparison."""
    return set(parse_ontology(text).axioms)


# ------------------------------------------------------------ clause strings


def _name(tok: str) -> Name:
    if tok.startswith("_D"):
        return definer_name(int(tok[2:]))
    return concept_name(tok)


def _filler(tok: str):
    if tok == "⊥":
        return BOTTOM
    if tok == "⊤":
        return TOP
    return _name(tok)


def lit(tok: str) -> Literal:
    """Read one literal written as A, ¬A, ∃r.X or ∀r.X (X a name, _Dk, ⊤ or ⊥)."""
    tok = tok.strip()
    if tok.startswith("¬"):
        return Literal.neg(_name(tok[1:]))
    if tok[0] in "∃∀":
        role, _, filler = tok[1:].partition(".")
        make = Literal.ex if tok[0] == "∃" else Literal.all
        return make(role_name(role), _filler(filler))
    return Literal.pos(_name(tok))


def clause_set(texts: Iterable[str]) -> set[frozenset[Literal]]:
    return {frozenset(lit(t) for t in text.split("⊔")) for text in texts}


def literal_sets(clauses: Iterable[Clause]) -> set[frozenset[Literal]]:
    return {c.literal_set for c in clauses}


def _rename_lit(l: Literal, m: dict[Name, Name]) -> Literal:
    if l.is_role:
        d = l.filler_definer
        return Literal(l.tag, role=l.role, filler=Literal.pos(m[d]).concept()) if d in m else l
    return Literal(l.tag, name=m.get(l.name, l.name))


def rename(sets: Iterable[frozenset[Literal]], m: dict[Name, Name]) -> set[frozenset[Literal]]:
    return {frozenset(_rename_lit(l, m) for l in s) for s in sets}


def _definers(sets: Iterable[frozenset[Literal]]) -> set[Name]:
    out = set()
    for s in sets:
        for l in s:
            if l.is_role and l.filler_definer is not None:
                out.add(l.filler_definer)
            elif not l.is_role and l.name.is_definer:
                out.add(l.name)
    return out


def definer_renaming(actual: Iterable[Clause], expected: Iterable[str]) -> dict[Name, Name] | None:
    """A bijection on definers taking the actual clauses onto the expected ones, if any."""
    got = literal_sets(actual)
    want = clause_set(expected)
    mine, theirs = sorted(_definers(got)), sorted(_definers(want))
    if len(mine) != len(theirs):
        return None
    for perm in itertools.permutations(theirs):
        m = dict(zip(mine, perm))
        if rename(got, m) == want:
            return m
    return None


def matches_under(actual: Iterable[Clause], expected: Iterable[str], m: dict[Name, Name]) -> bool:
    return rename(literal_sets(actual), m) == clause_set(expected)
