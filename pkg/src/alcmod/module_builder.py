"""General modules, the optimised general module, deductive modules and uniform interpolants."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

from .forgetting import forget_concepts, forget_roles
from .normalize import (
    DefinerMap,
    InvariantViolation,
    NormalizedOntology,
    clausify,
    cnf,
    clauses_length,
)
from .provenance import ProvenanceGraph
from .saturation import BudgetExceeded, ClauseStore, Deadline, role_isolation, r_instances
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
    conj,
    disj,
    length,
    nnf,
    replace_names,
    signature_of,
)

__all__ = [
    "BuildConfig",
    "BuildResult",
    "ProvenanceGraph",
    "UiStatus",
    "build",
    "deductive_module",
    "deductive_module_indices",
    "delete_subsumed",
    "general_module",
    "general_module_opt",
    "op1_cond_elim",
    "op2_dprop",
    "oracle_rewrite_check",
    "simplify_axioms",
    "substitute_definers",
    "uniform_interpolant",
]


class UiStatus(str, Enum):
    EXACT = "Exact"
    APPROXIMATE = "Approximate"
    GENERAL_MODULE_ONLY = "GeneralModuleOnly"


RewriteCheck = Callable[[Axiom, Axiom], bool]


@dataclass
class BuildConfig:
    subsumption_budget_ms: float = 10_000.0
    conflict_budget_ms: float | None = 30_000.0
    ui_budget_ms: float | None = 30_000.0
    widen_on_budget: bool = True
    rewrite_check: RewriteCheck | None = None


# ---------------------------------------------------------------- subsumption


class SubsumptionPass(list):
    """The retained clauses; ``budget_hit`` tells whether the pass was cut short."""

    budget_hit: bool = False


def delete_subsumed(clauses: Iterable[Clause], budget_ms: float | None = 10_000.0) -> SubsumptionPass:
    """Drop every clause whose literal set strictly contains another clause's."""
    deadline = Deadline(budget_ms)
    uniq: dict[frozenset, Clause] = {}
    for c in clauses:
        uniq.setdefault(c.literal_set, c)
    ordered = sorted(uniq.values(), key=lambda c: (len(c), c.literals))
    store = ClauseStore()
    out = SubsumptionPass()
    for i, c in enumerate(ordered):
        if deadline.expired():
            out.extend(ordered[i:])
            out.budget_hit = True
            break
        if store.subsumes_any(c.literal_set):
            continue
        store.add(c)
        out.append(c)
    return out


# ------------------------------------------------------------- substitution


def substitute_definers(clauses: Iterable[Clause], d: DefinerMap) -> Ontology:
    """Replace every definer D by C_D and read each clause as ⊤ ⊑ disjunction."""
    mapping: dict[Name, Concept] = dict(d.defs)
    axioms = []
    for c in clauses:
        for name in c.definers():
            if name not in mapping:
                raise InvariantViolation(f"definer {name} has no definition")
        parts = []
        for lit in c.literals:
            if lit.tag is LitTag.NEG and lit.name.is_definer:
                parts.append(Not(mapping[lit.name]))
            elif lit.is_role:
                parts.append(type(lit.concept())(lit.role, _expand(lit.filler, mapping)))
            else:
                parts.append(lit.concept())
        axioms.append(Axiom(TOP, disj(parts)))
    return Ontology(tuple(axioms))


def _expand(c: Concept, mapping: dict[Name, Concept]) -> Concept:
    # definitions never mention definers, so a single pass suffices
    return replace_names(c, mapping)


# ----------------------------------------------------------- simplification


def _conjuncts(c: Concept) -> list[Concept]:
    return list(c.args) if isinstance(c, And) else [c]


def _disjuncts(c: Concept) -> list[Concept]:
    return list(c.args) if isinstance(c, Or) else [c]


def tidy(c: Concept) -> Concept:
    """Bottom-up cleanup: ∃r.⊥ → ⊥, ∀r.⊤ → ⊤, ⊤/⊥ absorbed in ⊓ and ⊔."""
    if isinstance(c, And):
        return conj(tidy(a) for a in c.args)
    if isinstance(c, Or):
        return disj(tidy(a) for a in c.args)
    if isinstance(c, Not):
        inner = tidy(c.arg)
        if inner == TOP:
            return BOTTOM
        if inner == BOTTOM:
            return TOP
        return Not(inner)
    if isinstance(c, Exists):
        f = tidy(c.filler)
        return BOTTOM if f == BOTTOM else Exists(c.role, f)
    if isinstance(c, Forall):
        f = tidy(c.filler)
        return TOP if f == TOP else Forall(c.role, f)
    return c


_DUAL = {Exists: Forall, Forall: Exists}


def _rewrite(ax: Axiom) -> Axiom | None:
    """Move negated disjuncts of the right-hand side to the left; None for tautologies."""
    lhs = [x for x in _conjuncts(tidy(ax.lhs)) if x != TOP]
    rhs_queue = _disjuncts(tidy(ax.rhs))
    rhs: list[Concept] = []
    for x in rhs_queue:
        if isinstance(x, Not):
            lhs.extend(_conjuncts(x.arg))
        elif isinstance(x, (Exists, Forall)) and isinstance(x.filler, Not):
            lhs.append(_DUAL[type(x)](x.role, x.filler.arg))
        elif x != BOTTOM:
            rhs.append(x)
    left = conj(lhs)
    right = disj(rhs)
    if right == TOP or left == BOTTOM:
        return None
    if set(_conjuncts(left)) & set(_disjuncts(right)):
        return None
    return Axiom(left, right)


def simplify_axioms(o: Ontology | Iterable[Axiom], check: RewriteCheck | None = None) -> Ontology:
    """Rewrite ⊤ ⊑ ¬C ⊔ D into C ⊑ D (and Qr.¬C into a left Q̄r.C), dropping tautologies.

    When ``check`` is given, each rewrite is kept only if ``check(before, after)``
    confirms the two axioms are equivalent; otherwise the tidied input is kept.
    """
    axioms = o.axioms if isinstance(o, Ontology) else tuple(o)
    out: list[Axiom] = []
    seen: set[Axiom] = set()
    for ax in axioms:
        new = _rewrite(ax)
        if new is None:
            continue
        if check is not None and new != ax and not check(ax, new):
            new = Axiom(tidy(ax.lhs), tidy(ax.rhs))
        if new not in seen:
            seen.add(new)
            out.append(new)
    return Ontology(tuple(out))


def oracle_rewrite_check(max_nodes: int = 20_000) -> RewriteCheck:
    """Equivalence test for two axioms via the tableau with an empty TBox."""
    from .oracle import Tableau, TableauConfig

    def check(before: Axiom, after: Axiom) -> bool:
        t1 = Tableau([before], TableauConfig(max_nodes=max_nodes))
        t2 = Tableau([after], TableauConfig(max_nodes=max_nodes))
        return t1.entails(after) and t2.entails(before)

    return check


# ----------------------------------------------------------------- Op1 / Op2


def op1_cond_elim(clauses: Iterable[Clause], graph: ProvenanceGraph) -> list[Clause]:
    """conD-Elim to a fixpoint, then drop all clauses made only of negated definers.

    Clauses subsumed by a conclusion go as well: C ⊔ ∃r.D is redundant next to C.
    """
    store = ClauseStore(clauses)
    changed = True
    while changed:
        changed = False
        for k in store.clauses():
            if not (k.is_negative_definer_clause and k.literals):
                continue
            for inst in r_instances(k, store, allow_extra_existential=False, allow_all_universal=True):
                role = inst.slots[0][1].role
                has_ex = any(lit.tag is LitTag.EX for _, lit in inst.slots)
                closing = Literal.ex(role, BOTTOM) if has_ex else Literal.all(role, BOTTOM)
                new = graph.derive(inst.conclusion_literals() + [closing], inst.premises())
                if new is not None and store.add(new):
                    changed = True
    kept = [c for c in store if not (c.is_negative_definer_clause and c.literals)]
    return list(delete_subsumed(kept, budget_ms=None))


def _positive_definers(c: Clause) -> set[Name]:
    return {l.filler.name for l in c.literals if l.is_role and isinstance(l.filler, Atom) and l.filler.name.is_definer}


def op2_dprop(clauses: Iterable[Clause], graph: ProvenanceGraph) -> list[Clause]:
    """D-Prop: inline a definer as the conjunction of its definer-free ¬D-clauses."""
    current = list(clauses)
    while True:
        target = _dprop_candidate(current)
        if target is None:
            return current
        current = _dprop_apply(current, target, graph)


def _dprop_candidate(clauses: Sequence[Clause]) -> Name | None:
    positive: set[Name] = set()
    for c in clauses:
        positive |= _positive_definers(c)
    for d in sorted(positive):
        neg = Literal.neg(d)
        if all(not Clause(c.without(neg)).definers() for c in clauses if neg in c):
            return d
    return None


def _dprop_apply(clauses: list[Clause], d: Name, graph: ProvenanceGraph) -> list[Clause]:
    neg = Literal.neg(d)
    defining = [c for c in clauses if neg in c]
    filler = conj(disj(l.concept() for l in c.without(neg)) for c in defining)
    out: list[Clause] = []
    for c in clauses:
        if neg in c:
            continue
        hits = [l for l in c.literals if l.is_role and l.filler == Atom(d)]
        if not hits:
            out.append(c)
            continue
        lits = [l for l in c.literals if l not in hits]
        lits += [Literal(l.tag, None, l.role, filler) for l in hits]
        out.append(graph.derive(lits, [c, *defining], keep_trivial=True))
    return out


# -------------------------------------------------------------------- pipeline


@dataclass
class BuildResult:
    ontology: Ontology
    clauses: list[Clause]
    sigma: Signature
    graph: ProvenanceGraph
    definers: DefinerMap
    stages: dict[str, list[Clause]] = field(default_factory=dict)
    stage_times_ms: dict[str, float] = field(default_factory=dict)
    widened_signature: list[str] = field(default_factory=list)
    subsumption_budget_hit: bool = False
    ui_status: UiStatus | None = None

    @property
    def cl_length(self) -> int:
        return clauses_length(self.stages.get("cl", []))

    @property
    def ri_size(self) -> int:
        return len(self.stages.get("ri", []))


class _Timer:
    def __init__(self, result: BuildResult, name: str) -> None:
        self.result, self.name = result, name

    def __enter__(self) -> None:
        self.t0 = time.perf_counter()

    def __exit__(self, *exc) -> None:
        spent = (time.perf_counter() - self.t0) * 1000.0
        self.result.stage_times_ms[self.name] = self.result.stage_times_ms.get(self.name, 0.0) + spent


def _check_sigma(sigma: Signature) -> None:
    if any(n.is_definer for n in sigma.concepts):
        raise ValueError("the signature may not contain definers")


def _forget(o: Ontology, sigma: Signature, cfg: BuildConfig, res: BuildResult) -> NormalizedOntology:
    with _Timer(res, "normalize"):
        n = clausify(o, res.graph)
    res.definers = n.definers
    res.stages["cl"] = list(n.clauses)
    while True:
        try:
            with _Timer(res, "role_isolation"):
                ri = role_isolation(n, res.sigma, cfg.conflict_budget_ms)
            break
        except BudgetExceeded as exc:
            if not cfg.widen_on_budget or not exc.uncovered_roles:
                raise
            res.sigma = res.sigma | Signature(roles=frozenset(exc.uncovered_roles))
            res.widened_signature.extend(r.text for r in exc.uncovered_roles)
    res.stages["ri"] = list(ri.result.clauses)
    with _Timer(res, "forget_roles"):
        rol = forget_roles(ri.result, res.sigma)
    res.stages["rolE"] = list(rol.clauses)
    with _Timer(res, "forget_concepts"):
        con = forget_concepts(rol, res.sigma)
    res.stages["conE"] = list(con.clauses)
    return con


def _finish(clauses: list[Clause], cfg: BuildConfig, res: BuildResult) -> None:
    with _Timer(res, "delete_subsumed"):
        kept = delete_subsumed(clauses, cfg.subsumption_budget_ms)
    res.subsumption_budget_hit = res.subsumption_budget_hit or kept.budget_hit
    res.clauses = list(kept)
    res.stages["final"] = list(kept)
    with _Timer(res, "substitute"):
        sub = substitute_definers(kept, res.definers)
    with _Timer(res, "simplify"):
        res.ontology = simplify_axioms(sub, cfg.rewrite_check)


def build(o: Ontology, sigma: Signature, kind: str = "gm", cfg: BuildConfig | None = None) -> BuildResult:
    """Run one of the pipelines ("gm", "gm*", "dm", "ui") and keep every stage."""
    cfg = cfg or BuildConfig()
    _check_sigma(sigma)
    if kind not in ("gm", "gm*", "dm", "ui"):
        raise ValueError(f"unknown pipeline {kind!r}")
    res = BuildResult(Ontology(()), [], sigma, ProvenanceGraph(), DefinerMap())
    con = _forget(o, sigma, cfg, res)
    clauses = list(con.clauses)
    if kind == "gm":
        _finish(clauses, cfg, res)
        return res
    with _Timer(res, "op1"):
        clauses = op1_cond_elim(clauses, res.graph)
    res.stages["op1"] = list(clauses)
    with _Timer(res, "op2"):
        clauses = op2_dprop(clauses, res.graph)
    res.stages["op2"] = list(clauses)
    if kind == "ui":
        _interpolate(clauses, sigma, cfg, res)
        return res
    _finish(clauses, cfg, res)
    if kind == "dm":
        idx = deductive_indices_from(res, o)
        res.ontology = o.subset(idx)
    return res


def general_module(o: Ontology, sigma: Signature, cfg: BuildConfig | None = None) -> Ontology:
    return build(o, sigma, "gm", cfg).ontology


def general_module_opt(o: Ontology, sigma: Signature, cfg: BuildConfig | None = None) -> Ontology:
    return build(o, sigma, "gm*", cfg).ontology


def deductive_indices_from(res: BuildResult, o: Ontology) -> list[int]:
    reached = res.graph.axioms_behind(c.id for c in res.clauses)
    statements = {o.statements[i] for i in reached}
    return [i for i, s in enumerate(o.statements) if s in statements]


def deductive_module_indices(o: Ontology, sigma: Signature, cfg: BuildConfig | None = None) -> list[int]:
    res = build(o, sigma, "gm*", cfg)
    return deductive_indices_from(res, o)


def deductive_module(o: Ontology, sigma: Signature, cfg: BuildConfig | None = None) -> Ontology:
    """The input axioms (whole statements) that the gm* clauses were derived from."""
    return o.subset(deductive_module_indices(o, sigma, cfg))


def uniform_interpolant(
    o: Ontology, sigma: Signature, cfg: BuildConfig | None = None
) -> tuple[Ontology, UiStatus]:
    res = build(o, sigma, "ui", cfg)
    return res.ontology, res.ui_status


# ------------------------------------------------------- uniform interpolation


class _Stuck(Exception):
    pass


def _all_definers(clauses: Iterable[Clause]) -> set[Name]:
    out: set[Name] = set()
    for c in clauses:
        out |= c.definers()
    return out


def _interpolate(clauses: list[Clause], sigma: Signature, cfg: BuildConfig, res: BuildResult) -> None:
    fallback = list(clauses)
    status = UiStatus.EXACT
    deadline = Deadline(cfg.ui_budget_ms)
    try:
        with _Timer(res, "ui"):
            if _all_definers(clauses):
                cyclic = cyclic_definers(clauses)
                if cyclic:
                    status = UiStatus.APPROXIMATE
                    clauses = _unfold(clauses, cyclic, res.definers, res.graph)
                    clauses = op2_dprop(clauses, res.graph)
                clauses = _dres_all(clauses, res.graph, deadline)
                clauses = [c for c in clauses if not c.definers()]
    except (_Stuck, _UiTimeout):
        _finish(fallback, cfg, res)
        res.ui_status = UiStatus.GENERAL_MODULE_ONLY
        return
    res.stages["ui"] = list(clauses)
    _finish(clauses, cfg, res)
    if status is UiStatus.EXACT and not signature_of(res.ontology) <= sigma:
        status = UiStatus.APPROXIMATE
    res.ui_status = status


def cyclic_definers(clauses: Iterable[Clause]) -> set[Name]:
    """Definers that reach themselves via D → D' when a ¬D-clause has D' under a role."""
    edges: dict[Name, set[Name]] = {}
    for c in clauses:
        negs = [l.name for l in c.literals if l.tag is LitTag.NEG and l.name.is_definer]
        inside: set[Name] = set()
        for l in c.literals:
            if l.is_role:
                inside |= {n for n in signature_of(l.filler).concepts if n.is_definer}
        for d in negs:
            edges.setdefault(d, set()).update(inside)
    out: set[Name] = set()
    for start in edges:
        stack, seen = list(edges[start]), set()
        while stack:
            x = stack.pop()
            if x == start:
                out.add(start)
                break
            if x in seen:
                continue
            seen.add(x)
            stack.extend(edges.get(x, ()))
    return out


def _unfold(clauses: list[Clause], targets: set[Name], d: DefinerMap, graph: ProvenanceGraph) -> list[Clause]:
    """Replace the given definers by their definitions everywhere."""
    mapping = {n: d.defs[n] for n in targets}
    out: list[Clause] = []
    for c in clauses:
        if not (c.definers() & targets):
            out.append(c)
            continue
        base: list[Literal] = []
        splits: list[list[list[Literal]]] = []
        for l in c.literals:
            if l.tag is LitTag.NEG and l.name in targets:
                splits.append(cnf(nnf(Not(mapping[l.name]))))
            elif l.is_role:
                base.append(Literal(l.tag, None, l.role, replace_names(l.filler, mapping)))
            else:
                base.append(l)
        for combo in itertools.product(*splits):
            lits = base + [x for part in combo for x in part]
            new = graph.derive(lits, [c])
            if new is not None:
                out.append(new)
    uniq: dict[frozenset, Clause] = {}
    for c in out:
        uniq.setdefault(c.literal_set, c)
    return list(uniq.values())


class _UiTimeout(Exception):
    pass


def _occurrences(clauses: list[Clause]) -> dict[Name, set[tuple[Name, LitTag]]]:
    occ: dict[Name, set[tuple[Name, LitTag]]] = {}
    for c in clauses:
        for l in c.literals:
            if l.is_role and isinstance(l.filler, Atom) and l.filler.name.is_definer:
                occ.setdefault(l.filler.name, set()).add((l.role, l.tag))
    return occ


def _linkable(a: Name, b: Name, occ: dict[Name, set[tuple[Name, LitTag]]]) -> bool:
    """Two definers can meet in one D-Res instance: a shared role, one of them under ∀."""
    for role, tag in occ.get(a, ()):
        for role2, tag2 in occ.get(b, ()):
            if role == role2 and LitTag.ALL in (tag, tag2):
                return True
    return False


def _groups(clauses: list[Clause], definers: set[Name]) -> list[set[Name]]:
    parent = {d: d for d in definers}

    def find(x: Name) -> Name:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    occ = _occurrences(clauses)
    for c in clauses:
        negs = [l.name for l in c.literals if l.tag is LitTag.NEG and l.name in definers]
        for a, b in itertools.combinations(negs, 2):
            if _linkable(a, b, occ):
                parent[find(a)] = find(b)
    comps: dict[Name, set[Name]] = {}
    for d in definers:
        comps.setdefault(find(d), set()).add(d)
    return sorted(comps.values(), key=lambda g: min(g).sort_key())


def _ready(group: set[Name], clauses: list[Clause]) -> bool:
    """No ¬D-clause of the group still has a definer under a role restriction."""
    for c in clauses:
        negs = {l.name for l in c.literals if l.tag is LitTag.NEG and l.name.is_definer}
        if negs & group:
            rest = Clause(tuple(l for l in c.literals if not (l.tag is LitTag.NEG and l.name.is_definer)))
            if rest.definers():
                return False
    return True


def _dres_all(clauses: list[Clause], graph: ProvenanceGraph, deadline: Deadline) -> list[Clause]:
    while True:
        remaining = _all_definers(clauses)
        if not remaining:
            return clauses
        groups = _groups(clauses, remaining)
        group = next((g for g in groups if _ready(g, clauses)), None)
        if group is None:
            raise _Stuck
        clauses = _dres_group(clauses, group, graph, deadline)


def _dres_group(clauses: list[Clause], group: set[Name], graph: ProvenanceGraph, deadline: Deadline) -> list[Clause]:
    """Resolve away one group of definers linked by shared negative clauses."""
    store = ClauseStore(clauses)
    # negative side: (definer set N, definer-free remainder C′)
    side: list[tuple[frozenset[Name], Concept, Clause]] = []
    for c in clauses:
        negs = frozenset(l.name for l in c.literals if l.tag is LitTag.NEG and l.name.is_definer)
        if negs & group:
            rest = [l for l in c.literals if not (l.tag is LitTag.NEG and l.name.is_definer)]
            side.append((negs, disj(l.concept() for l in rest), c))

    def in_group(l: Literal) -> bool:
        return l.is_role and isinstance(l.filler, Atom) and l.filler.name in group

    done: set[tuple] = set()
    changed = True
    while changed:
        changed = False
        for first in store.clauses():
            for lead in [l for l in first.literals if in_group(l)]:
                if deadline.expired():
                    raise _UiTimeout
                d1, r = lead.filler.name, lead.role
                universal = sorted(
                    {l for l in store.literals() if in_group(l) and l.tag is LitTag.ALL and l.role == r and l.filler.name != d1}
                )
                for size in range(len(universal) + 1):
                    for combo in itertools.combinations(universal, size):
                        names = frozenset({d1} | {l.filler.name for l in combo})
                        if len(names) != size + 1 or not _participates(combo, names, side):
                            continue
                        used = [s for s in side if s[0] <= names]
                        filler = conj(s[1] for s in used)
                        for picked in itertools.product(*(store.with_literal(l) for l in combo)):
                            key = (first.literal_set, lead, tuple(p.literal_set for p in picked))
                            if key in done:
                                continue
                            done.add(key)
                            lits = list(first.without(lead))
                            for p, l in zip(picked, combo):
                                lits.extend(p.without(l))
                            lits.append(Literal(lead.tag, None, r, filler))
                            premises = [first, *picked, *(s[2] for s in used)]
                            new = graph.derive(lits, premises)
                            if new is not None and store.add(new):
                                changed = True
    return [c for c in store if not (c.definers() & group)]


def _participates(combo, names: frozenset[Name], side) -> bool:
    """Every ∀-partner shares a negative clause with another definer of the combination."""
    for l in combo:
        d = l.filler.name
        if not any(d in negs and len(negs) > 1 and negs <= names for negs, _, _ in side):
            return False
    return True
