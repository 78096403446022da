"""Role forgetting and concept forgetting on clause sets."""

from __future__ import annotations

from collections import Counter

from .normalize import NormalizedOntology
from .saturation import ClauseStore, is_role_isolated, r_instances
from .syntax import Atom, Clause, LitTag, Literal, Name, Signature


class NotRoleIsolated(ValueError):
    pass


def forget_roles(n: NormalizedOntology, sigma: Signature) -> NormalizedOntology:
    """rolE: saturate with the r-Rule for every r ∉ Σ, then drop clauses mentioning such roles."""
    if not is_role_isolated(n, sigma):
        raise NotRoleIsolated("clause set is not role isolated for the given signature")
    foreign = {l.role for c in n.clauses for l in c.literals if l.is_role} - sigma.roles
    if not foreign:
        return n
    store = ClauseStore(n.clauses)
    pending = [c for c in n.clauses if c.is_negative_definer_clause and c.literals]
    done: set[frozenset] = set()
    while pending:
        k = pending.pop()
        if k.literal_set in done:
            continue
        done.add(k.literal_set)
        for inst in r_instances(k, store, roles=foreign):
            new = n.graph.derive(inst.conclusion_literals(), inst.premises())
            if new is None or not store.add(new):
                continue
            if new.is_negative_definer_clause and new.literals:
                pending.append(new)
            elif any(l.is_role and l.role in foreign for l in new.literals):
                # a fresh premise: K clauses already processed must see it
                pending.extend(c for c in store if c.is_negative_definer_clause and c.literals)
                done.clear()
    kept = [c for c in store if not any(l.is_role and l.role in foreign for l in c.literals)]
    return n.with_clauses(kept)


def _occurrences(store: ClauseStore, a: Name) -> int:
    return len(store.with_literal(Literal.pos(a))) + len(store.with_literal(Literal.neg(a)))


def _add(store: ClauseStore, c: Clause) -> None:
    key = c.literal_set
    if key in store or store.subsumes_any(key):
        return
    for old in store.subsumed_by(key):
        store.remove(old)
    store.add(c)


def forget_concepts(n: NormalizedOntology, sigma: Signature) -> NormalizedOntology:
    """conE: eliminate every concept name outside Σ (definers excepted) by resolution.

    Names go in ascending order of their current number of occurrences. Once
    no name is left, clauses with a definer that no longer fills any role
    restriction are removed until none remain.
    """
    store = ClauseStore()
    for c in n.clauses:
        _add(store, c)

    def targets() -> set[Name]:
        out = set()
        for c in store:
            for l in c.literals:
                if not l.is_role and not l.name.is_definer and l.name not in sigma:
                    out.add(l.name)
        return out

    remaining = targets()
    while remaining:
        a = min(remaining, key=lambda x: (_occurrences(store, x), x.sort_key()))
        remaining.discard(a)
        pos_lit, neg_lit = Literal.pos(a), Literal.neg(a)
        positives = store.with_literal(pos_lit)
        negatives = store.with_literal(neg_lit)
        for c in positives + negatives:
            store.remove(c)
        for p in positives:
            for q in negatives:
                new = n.graph.derive(p.without(pos_lit) + q.without(neg_lit), (p, q))
                if new is not None:
                    _add(store, new)

    clauses = store.clauses()
    while True:
        filled = {l.filler.name for c in clauses for l in c.literals if l.is_role and isinstance(l.filler, Atom)}
        keep = [c for c in clauses if all(d in filled for d in _negated_definers(c))]
        if len(keep) == len(clauses):
            break
        clauses = keep
    return n.with_clauses(clauses)


def _negated_definers(c: Clause) -> list[Name]:
    return [l.name for l in c.literals if l.tag is LitTag.NEG and l.name.is_definer]


def occurrence_profile(n: NormalizedOntology) -> Counter:
    """How often each concept name appears as a top-level literal."""
    counts: Counter = Counter()
    for c in n.clauses:
        for l in c.literals:
            if not l.is_role:
                counts[l.name] += 1
    return counts
