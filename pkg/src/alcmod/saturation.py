"""A-Rule / r-Rule saturation, definer conflict sets and role isolation."""

from __future__ import annotations

import itertools
import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .locality import star_module_indices
from .normalize import NormalizedOntology, definer_order, outside_names, role_index
from .provenance import ProvenanceGraph
from .syntax import (
    TAUTOLOGY,
    Atom,
    Clause,
    LitTag,
    Literal,
    Name,
    Signature,
    canonical_clause,
)


class BudgetExceeded(RuntimeError):
    """Conflict computation ran out of time for some roles."""

    def __init__(self, partial: list[ConflictSet], uncovered_roles: list[Name]) -> None:
        names = ", ".join(r.text for r in uncovered_roles)
        super().__init__(f"conflict budget exhausted for role(s) {names}")
        self.partial = partial
        self.uncovered_roles = uncovered_roles


class RuleError(ValueError):
    """Premises do not match the rule they were given to."""


@dataclass(frozen=True)
class ConflictSet:
    definers: frozenset[Name]
    clause: Clause | None = field(default=None, compare=False, hash=False)

    def __len__(self) -> int:
        return len(self.definers)


# ------------------------------------------------------------------- store


class ClauseStore:
    """Clauses keyed by literal set, with an occurrence index per literal."""

    def __init__(self, clauses: Iterable[Clause] = ()) -> None:
        self._by_key: dict[frozenset[Literal], Clause] = {}
        self._occ: dict[Literal, set[frozenset[Literal]]] = defaultdict(set)
        self._fillers: dict[Name, set[Literal]] = defaultdict(set)
        for c in clauses:
            self.add(c)

    def __len__(self) -> int:
        return len(self._by_key)

    def __iter__(self) -> Iterator[Clause]:
        return iter(list(self._by_key.values()))

    def __contains__(self, c: Clause | frozenset) -> bool:
        key = c if isinstance(c, frozenset) else c.literal_set
        return key in self._by_key

    def clauses(self) -> list[Clause]:
        return list(self._by_key.values())

    def add(self, c: Clause) -> bool:
        key = c.literal_set
        if key in self._by_key:
            return False
        self._by_key[key] = c
        for lit in key:
            self._occ[lit].add(key)
            if lit.is_role and isinstance(lit.filler, Atom):
                self._fillers[lit.filler.name].add(lit)
        return True

    def remove(self, c: Clause) -> None:
        key = c.literal_set
        if self._by_key.pop(key, None) is None:
            return
        for lit in key:
            bucket = self._occ[lit]
            bucket.discard(key)
            if not bucket:
                del self._occ[lit]
                if lit.is_role and isinstance(lit.filler, Atom):
                    self._fillers[lit.filler.name].discard(lit)

    def with_literal(self, lit: Literal) -> list[Clause]:
        return [self._by_key[k] for k in self._occ.get(lit, ())]

    def positive_literals_of(self, d: Name) -> set[Literal]:
        """Role literals in the store whose filler is the name ``d``."""
        return set(self._fillers.get(d, ()))

    def literals(self) -> Iterable[Literal]:
        return self._occ.keys()

    def subsumes_any(self, key: frozenset[Literal]) -> bool:
        """Some stored clause is a subset of ``key``."""
        if frozenset() in self._by_key:
            return True
        for lit in key:
            for other in self._occ.get(lit, ()):
                if len(other) <= len(key) and other <= key:
                    return True
        return False

    def subsumed_by(self, key: frozenset[Literal]) -> list[Clause]:
        """Stored clauses that are strict supersets of ``key``."""
        if not key:
            return [c for k, c in self._by_key.items() if k]
        buckets = sorted((self._occ.get(l, set()) for l in key), key=len)
        out = []
        for other in buckets[0]:
            if len(other) > len(key) and key <= other:
                out.append(self._by_key[other])
        return out


def negative_definers(c: Clause) -> frozenset[Name]:
    return frozenset(l.name for l in c.literals if l.tag is LitTag.NEG and l.name.is_definer)


# ------------------------------------------------------------------- rules


def a_rule(c1: Clause, c2: Clause, a: Name, graph: ProvenanceGraph | None = None) -> Clause | type(TAUTOLOGY):
    """(C1 ⊔ A, ¬A ⊔ C2) / C1 ⊔ C2."""
    pos, neg = Literal.pos(a), Literal.neg(a)
    if pos not in c1 or neg not in c2:
        raise RuleError(f"A-Rule on {a} needs {a} in the first and ¬{a} in the second premise")
    lits = c1.without(pos) + c2.without(neg)
    if graph is None:
        return canonical_clause(lits)
    out = graph.derive(lits, (c1, c2))
    return TAUTOLOGY if out is None else out


def r_rule(
    existential: Clause,
    universals: Sequence[Clause],
    k_d: Clause,
    r: Name,
    graph: ProvenanceGraph | None = None,
) -> Clause | type(TAUTOLOGY):
    """(C1 ⊔ ∃r.D1, {Cj ⊔ ∀r.Dj}, K_D) / C1 ⊔ … ⊔ Cn, K_D over D1..Dn or D2..Dn."""
    ex = [l for l in existential.literals if l.tag is LitTag.EX and l.role == r and l.filler_definer]
    if not ex:
        raise RuleError(f"first premise has no ∃{r.text}.D literal")
    k_names = negative_definers(k_d)
    if len(k_names) != len(k_d):
        raise RuleError("K_D must consist of negated definers only")
    alls: list[Literal] = []
    for u in universals:
        cand = [l for l in u.literals if l.tag is LitTag.ALL and l.role == r and l.filler_definer in k_names]
        if not cand:
            raise RuleError(f"premise {u} has no matching ∀{r.text}.D literal")
        alls.append(cand[0])
    rest = frozenset(l.filler_definer for l in alls)
    for lit in ex:
        d1 = lit.filler_definer
        if k_names == rest | {d1} or (k_names == rest and d1 not in rest):
            lits = list(existential.without(lit))
            for u, l in zip(universals, alls):
                lits.extend(u.without(l))
            if graph is None:
                return canonical_clause(lits)
            out = graph.derive(lits, [existential, *universals, k_d])
            return TAUTOLOGY if out is None else out
    raise RuleError("K_D does not match the premise definers")


@dataclass(frozen=True)
class RInstance:
    """One r-Rule (or conD-Elim) premise choice: (clause, matched literal) pairs plus K_D."""

    slots: tuple[tuple[Clause, Literal], ...]
    k_d: Clause

    def conclusion_literals(self) -> list[Literal]:
        lits: list[Literal] = []
        for clause, lit in self.slots:
            lits.extend(clause.without(lit))
        return lits

    def premises(self) -> list[Clause]:
        return [c for c, _ in self.slots] + [self.k_d]


def _role_literals(store: ClauseStore, d: Name) -> list[Literal]:
    return sorted(store.positive_literals_of(d))


def r_instances(
    k_d: Clause,
    store: ClauseStore,
    roles: set[Name] | None = None,
    *,
    allow_extra_existential: bool = True,
    allow_all_universal: bool = False,
    require: Clause | None = None,
) -> Iterator[RInstance]:
    """Premise choices for the r-Rule with side premise ``k_d``.

    Either one definer of K_D sits under ∃r and the others under ∀r, or all
    of them sit under ∀r and an arbitrary ∃r-literal supplies the successor.
    With ``allow_all_universal`` an all-∀ choice is also produced on its own,
    which is what conD-Elim needs. With ``require`` only instances using that
    clause as a premise are produced.
    """
    names = sorted(negative_definers(k_d))
    if not names or len(names) != len(k_d):
        return
    per_name = {d: _role_literals(store, d) for d in names}
    candidate_roles = set.intersection(*({l.role for l in lits} for lits in per_name.values()))
    if roles is not None:
        candidate_roles &= roles
    for r in sorted(candidate_roles):
        options: list[list[Literal]] = []
        for d in names:
            options.append([l for l in per_name[d] if l.role == r])
        for combo in itertools.product(*options):
            n_ex = sum(1 for l in combo if l.tag is LitTag.EX)
            if n_ex == 1 or (n_ex == 0 and allow_all_universal):
                yield from _fill(combo, k_d, store, require, extra=None)
            elif n_ex == 0 and allow_extra_existential:
                extra_lits = [l for l in store.literals() if l.tag is LitTag.EX and l.role == r and l.filler_definer is not None]
                for e in sorted(extra_lits):
                    if e.filler_definer in names:
                        continue
                    yield from _fill(combo, k_d, store, require, extra=e)


def _fill(combo, k_d, store, require, extra) -> Iterator[RInstance]:
    lits = list(combo) + ([extra] if extra is not None else [])
    choices = [store.with_literal(l) for l in lits]
    if any(not ch for ch in choices):
        return
    for picked in itertools.product(*choices):
        if require is not None and require is not k_d and all(p is not require for p in picked):
            continue
        yield RInstance(tuple(zip(picked, lits)), k_d)


# -------------------------------------------------------------- saturation


def name_ranking(clauses: Iterable[Clause]) -> dict[Name, int]:
    """Rank non-definer concept names: rarer names rank higher and are resolved first."""
    counts: dict[Name, int] = defaultdict(int)
    for c in clauses:
        for l in c.literals:
            if not l.is_role and not l.name.is_definer:
                counts[l.name] += 1
    order = sorted(counts, key=lambda n: (counts[n], n.sort_key()), reverse=True)
    return {n: len(order) - i for i, n in enumerate(order)}


def _max_literal(c: Clause, rank: dict[Name, int]) -> Literal | None:
    best, best_rank = None, 0
    for l in c.literals:
        if l.is_role or l.name.is_definer:
            continue
        r = rank.get(l.name, 0)
        if best is None or r > best_rank:
            best, best_rank = l, r
    return best


def _a_rule_partners(g: Clause, store: ClauseStore, rank: dict[Name, int]) -> Iterator[tuple[Clause, Clause, Name]]:
    """Ordered A-Rule: resolve only on the top-ranked propositional literal of both premises."""
    lit = _max_literal(g, rank)
    if lit is None:
        return
    comp = lit.complement()
    for other in store.with_literal(comp):
        if _max_literal(other, rank) != comp:
            continue
        if lit.tag is LitTag.POS:
            yield g, other, lit.name
        else:
            yield other, g, lit.name


def _k_clauses_for(g: Clause, store: ClauseStore) -> set[Clause]:
    """Negative-definer clauses that could use ``g`` as an r-Rule premise."""
    ks: dict[frozenset, Clause] = {}
    ex_roles = set()
    for lit in g.literals:
        d = lit.filler_definer
        if d is None:
            continue
        for k in store.with_literal(Literal.neg(d)):
            if k.is_negative_definer_clause:
                ks[k.literal_set] = k
        if lit.tag is LitTag.EX:
            ex_roles.add(lit.role)
    if ex_roles:
        # g may serve as the extra ∃r premise for an all-∀ K_D
        for k in store.clauses():
            if k.is_negative_definer_clause and k.literals:
                ks[k.literal_set] = k
    return set(ks.values())


class Deadline:
    def __init__(self, budget_ms: float | None) -> None:
        self.end = None if budget_ms is None else time.monotonic() + budget_ms / 1000.0

    def expired(self) -> bool:
        return self.end is not None and time.monotonic() > self.end


class _Timeout(Exception):
    pass


def saturate(clauses: Iterable[Clause], graph: ProvenanceGraph, deadline: Deadline | None = None) -> ClauseStore:
    """Given-clause saturation under the A-Rule and r-Rule with subsumption deletion.

    The A-Rule is ordered: it only resolves on the highest-ranked non-definer
    literal of each premise. Definers and role literals rank below every
    concept name, so clauses over definers alone are still all derived.
    """
    deadline = deadline or Deadline(None)
    clauses = list(clauses)
    rank = name_ranking(clauses)
    active = ClauseStore()
    passive: deque[Clause] = deque(sorted(clauses, key=lambda c: (len(c), c.literals)))
    while passive:
        if deadline.expired():
            raise _Timeout
        g = passive.popleft()
        key = g.literal_set
        if key in active or active.subsumes_any(key):
            continue
        for old in active.subsumed_by(key):
            active.remove(old)
        active.add(g)
        for c1, c2, a in _a_rule_partners(g, active, rank):
            new = graph.derive(c1.without(Literal.pos(a)) + c2.without(Literal.neg(a)), (c1, c2))
            if new is not None:
                passive.append(new)
        ks = {g} if g.is_negative_definer_clause else _k_clauses_for(g, active)
        for k in ks:
            for inst in r_instances(k, active, require=g):
                new = graph.derive(inst.conclusion_literals(), inst.premises())
                if new is not None:
                    passive.append(new)
    return active


def minimal_conflicts(clauses: Iterable[Clause]) -> list[ConflictSet]:
    found: dict[frozenset[Name], Clause] = {}
    for c in clauses:
        if c.is_negative_definer_clause:
            found.setdefault(negative_definers(c), c)
    keys = sorted(found, key=lambda s: (len(s), sorted(s)))
    minimal: list[frozenset[Name]] = []
    for s in keys:
        if not any(m <= s for m in minimal):
            minimal.append(s)
    return [ConflictSet(s, found[s]) for s in minimal]


def conflict_sets(
    n: NormalizedOntology,
    budget_ms: float | None = None,
    roles: Iterable[Name] | None = None,
) -> list[ConflictSet]:
    """Minimal definer sets whose conjunction is unsatisfiable w.r.t. the clauses of ``n``.

    With ``roles`` the computation is split by role: for each role r only
    definers filling an r-restriction are considered, and saturation runs on
    the ⊤⊥*-module of the clauses for those definers. The budget then applies
    to each role separately.
    """
    if roles is None:
        try:
            store = saturate(n.clauses, n.graph, Deadline(budget_ms))
        except _Timeout:
            raise BudgetExceeded([], []) from None
        return minimal_conflicts(store)

    rol = role_index(n.clauses)
    axioms = [c.as_axiom() for c in n.clauses]
    found: list[ConflictSet] = []
    uncovered: list[Name] = []
    for r in sorted(set(roles)):
        sigma_r = frozenset(d for d, rs in rol.items() if r in rs and d.is_definer)
        if not sigma_r:
            continue
        module = [n.clauses[i] for i in star_module_indices(axioms, Signature(sigma_r))]
        try:
            store = saturate(module, n.graph, Deadline(budget_ms))
        except _Timeout:
            uncovered.append(r)
            continue
        for cs in minimal_conflicts(store):
            if cs.definers <= sigma_r:
                found.append(cs)
    merged = minimal_conflicts(cs.clause for cs in found)
    if uncovered:
        raise BudgetExceeded(merged, uncovered)
    return merged


# ----------------------------------------------------------- role isolation


def is_role_isolated(n: NormalizedOntology | Iterable[Clause], sigma: Signature) -> bool:
    clauses = list(n.clauses if isinstance(n, NormalizedOntology) else n)
    out = outside_names(clauses, sigma)
    for c in clauses:
        if all(l.tag is LitTag.NEG and l.name in out for l in c.literals):
            continue
        if all(l.is_role or l.name not in out for l in c.literals):
            continue
        return False
    return True


@dataclass
class RoleIsolation:
    result: NormalizedOntology
    kept: list[Clause]
    conflicts: list[Clause]


def role_isolate(n: NormalizedOntology, sigma: Signature, budget_ms: float | None = None) -> NormalizedOntology:
    return role_isolation(n, sigma, budget_ms).result


def role_isolation(n: NormalizedOntology, sigma: Signature, budget_ms: float | None = None) -> RoleIsolation:
    """RI_Σ(O) = cl_Σ(O) ∪ D_Σ(O), keeping both parts for inspection."""
    rol = role_index(n.clauses)
    order = definer_order(n)

    def isolated(d: Name) -> bool:
        return all(rol.get(up, set()) <= sigma.roles for up in order.above(d))

    kept = [c for c in n.clauses if all(isolated(d) for d in negative_definers(c))]
    foreign = sorted({r for rs in rol.values() for r in rs} - sigma.roles)
    conflicts = conflict_sets(n, budget_ms, roles=foreign) if foreign else []

    kept_store = ClauseStore(kept)
    extra: list[Clause] = []
    for cs in conflicts:
        if not cs.definers:
            extra.append(cs.clause)
        elif _shares_foreign_role(cs.definers, kept_store, sigma):
            extra.append(cs.clause)
    seen = {c.literal_set for c in kept}
    extra = [c for c in extra if c.literal_set not in seen]
    return RoleIsolation(n.with_clauses(kept + extra), kept, extra)


def _shares_foreign_role(definers: frozenset[Name], store: ClauseStore, sigma: Signature) -> bool:
    """Some r ∉ Σ carries every definer, at most one of them under ∃."""
    per = {d: store.positive_literals_of(d) for d in definers}
    roles = set.intersection(*({l.role for l in lits} for lits in per.values()))
    for r in roles - sigma.roles:
        quantifiers = [{l.tag for l in per[d] if l.role == r} for d in definers]
        n_only_ex = sum(1 for q in quantifiers if q == {LitTag.EX})
        if n_only_ex <= 1:
            return True
    return False
