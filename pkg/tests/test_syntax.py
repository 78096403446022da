from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from alcmod.generate import family
from alcmod.oracle import Tableau, entails
from alcmod.parser_io import parse_ontology
from alcmod.syntax import (
    BOTTOM,
    TAUTOLOGY,
    TOP,
    And,
    Atom,
    Axiom,
    Exists,
    Forall,
    Literal,
    Not,
    Or,
    Signature,
    canonical_clause,
    concept_name,
    conj,
    definer_name,
    disj,
    length,
    nnf,
    role_name,
    signature_of,
)
from helpers import running
from strategies import concepts, literals

A, B, B1 = (Atom(concept_name(t)) for t in ("A", "B", "B1"))
r, s = role_name("r"), role_name("s")


def _negation_on_atoms_only(c) -> bool:
    if isinstance(c, Not):
        return isinstance(c.arg, Atom)
    if isinstance(c, (And, Or)):
        return all(_negation_on_atoms_only(a) for a in c.args)
    if isinstance(c, (Exists, Forall)):
        return _negation_on_atoms_only(c.filler)
    return True


class TestNnf:
    def test_de_morgan(self):
        assert nnf(Not(conj([A, B]))) == disj([Not(A), Not(B)])

    def test_quantifier_duality(self):
        assert nnf(Not(Exists(r, A))) == Forall(r, Not(A))

    def test_double_negation_collapses(self):
        assert Not(Not(A)) == A
        assert nnf(Not(Not(A))) == A

    def test_trivial_restrictions_collapse(self):
        assert nnf(Exists(r, Exists(s, BOTTOM))) == BOTTOM
        assert nnf(Not(Exists(r, BOTTOM))) == TOP
        assert nnf(Forall(r, disj([A, Not(A)]))) == Forall(r, disj([A, Not(A)]))

    @given(concepts)
    def test_shape_and_idempotence(self, c):
        n = nnf(c)
        assert _negation_on_atoms_only(n)
        assert nnf(n) == n

    @settings(max_examples=60, deadline=None)
    @given(concepts)
    def test_equivalent_per_oracle(self, c):
        tab = Tableau([])
        assert tab.entails(Axiom(c, nnf(c)))
        assert tab.entails(Axiom(nnf(c), c))


class TestLength:
    def test_axiom_with_universal(self):
        ax = parse_ontology("SubClassOf(A2 ObjectUnionOf(A3 ObjectAllValuesFrom(s B3)))").axioms[0]
        assert length(ax) == 4

    def test_nested_existentials(self):
        assert length(Exists(r, Exists(s, B1))) == 3

    def test_negation_is_free(self):
        assert length(Not(A)) == length(A) == length(TOP) == 1

    def test_family_n2(self):
        o, _ = family(2)
        assert [length(a) for a in o.axioms] == [3, 3, 3, 4, 4, 4, 4]
        assert length(o) == 25

    @given(st.lists(literals, min_size=1, max_size=4))
    def test_clause_length_is_one_plus_literals(self, lits):
        c = canonical_clause(lits)
        if c is not TAUTOLOGY:
            assert length(c) == 1 + sum(length(l.concept()) for l in c.literals)
            assert length(c) == length(c.as_axiom())


class TestSignature:
    def test_nested(self):
        sig = signature_of(Exists(r, Exists(s, B1)))
        assert sig == Signature.of(["B1"], ["r", "s"])

    def test_running_roles(self):
        assert signature_of(running()).roles == {r, s}

    def test_top_axiom_is_empty(self):
        assert len(signature_of(Axiom(TOP, TOP))) == 0

    def test_kinds_are_separated(self):
        assert concept_name("r") not in Signature.of([], ["r"])


class TestCanonicalClause:
    def test_dedup(self):
        b1, b3 = concept_name("B1"), concept_name("B3")
        c = canonical_clause([Literal.pos(b1), Literal.neg(b3), Literal.pos(b1)])
        assert c.literal_set == {Literal.pos(b1), Literal.neg(b3)}
        assert len(c) == 2

    def test_excluded_middle(self):
        a = concept_name("A")
        assert canonical_clause([Literal.pos(a), Literal.neg(a)]) is TAUTOLOGY

    def test_negative_definers(self):
        d2, d4 = definer_name(2), definer_name(4)
        c = canonical_clause([Literal.neg(d4), Literal.neg(d2)])
        assert c.literals == (Literal.neg(d2), Literal.neg(d4))
        assert c.is_negative_definer_clause

    def test_forall_top_is_tautology(self):
        assert canonical_clause([Literal.all(r, TOP)]) is TAUTOLOGY

    @given(st.lists(literals, max_size=5), st.randoms())
    def test_order_insensitive_and_idempotent(self, lits, rnd):
        c1 = canonical_clause(lits)
        shuffled = list(lits)
        rnd.shuffle(shuffled)
        c2 = canonical_clause(shuffled)
        if c1 is TAUTOLOGY:
            assert c2 is TAUTOLOGY
            return
        assert c1 == c2
        assert canonical_clause(c1.literals) == c1


def test_entails_is_reflexive_on_running():
    o = running()
    assert all(entails(o, a) for a in o.axioms)
