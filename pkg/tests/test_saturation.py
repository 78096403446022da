from __future__ import annotations

import itertools

import pytest

from alcmod.generate import family, random_ontology, random_signature
from alcmod.module_builder import substitute_definers
from alcmod.normalize import clausify, role_index
from alcmod.oracle import Tableau, inseparable_sampled
from alcmod.parser_io import parse_ontology
from alcmod.provenance import ProvenanceGraph
from alcmod.saturation import (
    BudgetExceeded,
    RuleError,
    a_rule,
    conflict_sets,
    r_rule,
    is_role_isolated,
    role_isolate,
    saturate,
)
from alcmod.syntax import TAUTOLOGY, Atom, Ontology, Signature, concept_name, conj, make_clause, role_name, signature_of
from helpers import (
    ISOLATED_SIGMA,
    RUNNING_SIGMA,
    definer_renaming,
    isolated,
    lit,
    literal_sets,
    matches_under,
    running,
)
from test_acceptance import CL, RI


def C(text: str):
    return make_clause(lit(t) for t in text.split("⊔"))


def N(text: str):
    return concept_name(text)


class TestARule:
    def test_first_inference(self):
        out = a_rule(C("¬_D2 ⊔ B1"), C("¬B1 ⊔ ¬B3"), N("B1"))
        assert out.literal_set == C("¬_D2 ⊔ ¬B3").literal_set

    def test_second_inference(self):
        out = a_rule(C("¬_D4 ⊔ B3"), C("¬_D2 ⊔ ¬B3"), N("B3"))
        assert out.literal_set == C("¬_D2 ⊔ ¬_D4").literal_set

    def test_shared_literal_deduplicated(self):
        assert a_rule(C("A ⊔ B"), C("¬B ⊔ A"), N("B")).literal_set == C("A").literal_set

    def test_tautology(self):
        assert a_rule(C("A ⊔ B"), C("¬B ⊔ ¬A"), N("B")) is TAUTOLOGY

    def test_precondition(self):
        with pytest.raises(RuleError):
            a_rule(C("¬B ⊔ A"), C("A ⊔ B"), N("B"))


class TestRRule:
    def test_example(self):
        out = r_rule(C("¬_D1 ⊔ ∃s._D2"), [C("¬A2 ⊔ A3 ⊔ ∀s._D4")], C("¬_D2 ⊔ ¬_D4"), role_name("s"))
        assert out.literal_set == C("¬_D1 ⊔ ¬A2 ⊔ A3").literal_set

    def test_existential_only(self):
        out = r_rule(C("X ⊔ ∃r._D1"), [], C("¬_D1"), role_name("r"))
        assert out.literal_set == C("X").literal_set

    def test_existential_and_universal(self):
        # D1 ⊓ D2 ⊑ ⊥ holds in {¬D1 ⊔ B, ¬D2 ⊔ ¬B}, so K_D = ¬D1 ⊔ ¬D2 is sound there
        assert not Tableau([C("¬_D1 ⊔ B"), C("¬_D2 ⊔ ¬B")]).satisfiable(
            conj([Atom(lit("_D1").name), Atom(lit("_D2").name)])
        )
        out = r_rule(C("A ⊔ ∃r._D1"), [C("A ⊔ ∀r._D2")], C("¬_D1 ⊔ ¬_D2"), role_name("r"))
        assert out.literal_set == C("A").literal_set

    def test_role_mismatch(self):
        with pytest.raises(RuleError):
            r_rule(C("A ⊔ ∃r._D1"), [C("A ⊔ ∀s._D2")], C("¬_D1 ⊔ ¬_D2"), role_name("r"))
        with pytest.raises(RuleError):
            r_rule(C("A ⊔ ∃r._D1"), [], C("¬_D3"), role_name("r"))


class TestConflictSets:
    def test_running(self):
        n = clausify(running())
        m = definer_renaming(n.clauses, CL)
        got = {frozenset(m[d] for d in cs.definers) for cs in conflict_sets(n)}
        assert got == {frozenset({lit("_D2").name, lit("_D4").name})}

    def test_no_bottom(self):
        n = clausify(parse_ontology("SubClassOf(A ObjectSomeValuesFrom(r B))\nSubClassOf(B C)"))
        assert conflict_sets(n) == []

    def test_family_n2(self):
        n = clausify(family(2)[0])
        got = [sorted(str(n.definers.defs[d]) for d in cs.definers) for cs in conflict_sets(n)]
        assert sorted(got) == [["X1", "X2"], ["X1", "Y2"], ["X2", "Y1"], ["Y1", "Y2"]]

    def test_per_role_finds_the_conflicts_under_a_shared_role(self):
        for seed in range(40):
            n = clausify(random_ontology(seed))
            roles = role_index(n.clauses)
            full = {cs.definers for cs in conflict_sets(n)}
            per_role = {cs.definers for cs in conflict_sets(n, roles=signature_of(n.clauses).roles)}
            shared = {s for s in full if s and set.intersection(*(roles[d] for d in s))}
            assert shared <= per_role
            assert {s for s in per_role if s} <= full

    def test_budget_reports_uncovered_roles(self):
        n = clausify(family(8)[0])
        with pytest.raises(BudgetExceeded) as err:
            conflict_sets(n, budget_ms=0.0, roles=[role_name("s")])
        assert err.value.uncovered_roles == [role_name("s")]

    def test_sound_and_minimal(self):
        checked = 0
        for seed in range(60):
            n = clausify(random_ontology(seed))
            tab = Tableau(n.clauses)
            for cs in conflict_sets(n):
                ds = sorted(cs.definers)
                assert not tab.satisfiable(conj(Atom(d) for d in ds))
                for sub in itertools.combinations(ds, max(len(ds) - 1, 0)) if ds else ():
                    assert tab.satisfiable(conj(Atom(d) for d in sub))
                checked += 1
        assert checked > 20

    def test_saturation_stays_within_literal_universe(self):
        n = clausify(running())
        store = saturate(n.clauses, ProvenanceGraph())
        universe = {l for c in n.clauses for l in c.literals}
        assert all(l in universe for c in store for l in c.literals)
        assert len(store) <= 2 ** len(universe)


class TestRoleIsolation:
    def test_running(self):
        n = clausify(running())
        m = definer_renaming(n.clauses, CL)
        ri = role_isolate(n, RUNNING_SIGMA)
        assert matches_under(ri.clauses, RI, m)
        assert is_role_isolated(ri, RUNNING_SIGMA)
        assert not is_role_isolated(n, RUNNING_SIGMA)

    def test_full_signature_keeps_everything(self):
        o = running()
        n = clausify(o)
        assert literal_sets(role_isolate(n, signature_of(o)).clauses) == n.literal_sets()

    def test_isolated(self):
        n = clausify(isolated())
        ri = role_isolate(n, ISOLATED_SIGMA)
        want = ["¬A ⊔ ∀r._D1", "¬_D1 ⊔ ∃s._D2", "¬A1 ⊔ ∀r._D3", "¬_D3 ⊔ ∀s._D4", "¬B1 ⊔ ¬B2", "¬_D2 ⊔ ¬_D4"]
        assert definer_renaming(ri.clauses, want) is not None

    def test_empty(self):
        assert is_role_isolated([], Signature())

    @pytest.mark.parametrize("seed", range(12))
    def test_preserves_signature_plus_concepts(self, seed):
        o = random_ontology(500 + seed, max_axioms=8)
        sigma = random_signature(o, seed)
        n = clausify(o)
        ri = role_isolate(n, sigma)
        back = substitute_definers(ri.clauses, n.definers)
        wide = sigma | Signature(signature_of(o).concepts)
        assert inseparable_sampled(o, back, wide, 40, 2, seed).inseparable

    def test_running_preserves_signature_plus_concepts(self):
        o = running()
        n = clausify(o)
        back = substitute_definers(role_isolate(n, RUNNING_SIGMA).clauses, n.definers)
        wide = RUNNING_SIGMA | Signature(signature_of(o).concepts)
        assert inseparable_sampled(o, back, wide, 100, 2, 0).inseparable


def test_tableau_on_clausal_input():
    n = clausify(running())
    m = definer_renaming(n.clauses, CL)
    inv = {v: k for k, v in m.items()}
    d2, d4 = inv[lit("_D2").name], inv[lit("_D4").name]
    assert not Tableau(n.clauses).satisfiable(conj([Atom(d2), Atom(d4)]))
    assert Tableau(Ontology()).satisfiable(Atom(N("A")))
