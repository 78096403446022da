"""Synthetic inputs: the exponential family O_n and seed-pinned random ontologies."""

from __future__ import annotations

import random

from .oracle import random_concept
from .syntax import (
    BOTTOM,
    TOP,
    Atom,
    Axiom,
    Exists,
    Forall,
    Ontology,
    Signature,
    concept_name,
    conj,
    disj,
    role_name,
)


def family(n: int) -> tuple[Ontology, Signature]:
    """O_n with Σ_n = {A_j, Abar_j}: the general module has 2^n axioms."""
    if n < 1:
        raise ValueError("n must be at least 1")
    s = role_name("s")
    A = lambda p, i: Atom(concept_name(f"{p}{i}"))  # noqa: E731
    axioms = [Axiom(conj(A("Z", i) for i in range(1, n + 1)), BOTTOM)]
    axioms += [Axiom(disj([A("X", i), A("Y", i)]), A("Z", i)) for i in range(1, n + 1)]
    for j in range(1, n + 1):
        q = Exists if j == 1 else Forall
        axioms.append(Axiom(TOP, disj([A("A", j), q(s, A("X", j))])))
        axioms.append(Axiom(TOP, disj([A("Abar", j), q(s, A("Y", j))])))
    sigma = Signature(
        frozenset(concept_name(f"{p}{j}") for p in ("A", "Abar") for j in range(1, n + 1)),
        frozenset(),
    )
    return Ontology(tuple(axioms)), sigma


def random_ontology(
    seed: int,
    max_axioms: int = 10,
    n_concepts: int = 5,
    n_roles: int = 2,
    depth: int = 2,
) -> Ontology:
    """Seed-pinned random ontology over names A1..Ak and roles r1..rm."""
    rng = random.Random(seed)
    sigma = Signature(
        frozenset(concept_name(f"A{i}") for i in range(1, n_concepts + 1)),
        frozenset(role_name(f"r{i}") for i in range(1, n_roles + 1)),
    )
    count = rng.randint(1, max_axioms)
    axioms = []
    for _ in range(count):
        lhs = random_concept(rng, sigma, depth, leaf_prob=0.55)
        rhs = random_concept(rng, sigma, depth, leaf_prob=0.45)
        axioms.append(Axiom(lhs, rhs))
    return Ontology(tuple(axioms))


def random_clause_shaped(seed: int, max_axioms: int = 8, n_concepts: int = 5, n_roles: int = 2) -> Ontology:
    """Random ontology whose axioms are already ⊤ ⊑ L1 ⊔ … ⊔ Ln over literals A, ¬A, Qr.A."""
    from .syntax import Not

    rng = random.Random(seed)
    names = [Atom(concept_name(f"A{i}")) for i in range(1, n_concepts + 1)]
    roles = [role_name(f"r{i}") for i in range(1, n_roles + 1)]
    axioms = []
    for _ in range(rng.randint(1, max_axioms)):
        lits = []
        for _ in range(rng.randint(1, 3)):
            kind = rng.random()
            a = rng.choice(names)
            if kind < 0.35:
                lits.append(a)
            elif kind < 0.7:
                lits.append(Not(a))
            elif kind < 0.85:
                lits.append(Exists(rng.choice(roles), a))
            else:
                lits.append(Forall(rng.choice(roles), a))
        axioms.append(Axiom(TOP, disj(lits)))
    return Ontology(tuple(axioms))


def random_signature(o: Ontology, seed: int) -> Signature:
    """A random subset of sig(o), each name kept with probability 1/2."""
    from .syntax import signature_of

    rng = random.Random(seed)
    sig = signature_of(o)
    return Signature(
        frozenset(n for n in sorted(sig.concepts) if rng.random() < 0.5),
        frozenset(n for n in sorted(sig.roles) if rng.random() < 0.5),
    )
