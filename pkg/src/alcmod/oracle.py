"""A small ALC tableau used to check results, not to produce them.

TBox axioms whose negation normal form has a negated concept name among its
top-level disjuncts are absorbed (A ⊑ C is unfolded lazily when A is in a
label); everything else is added to every node. Successors are blocked when
their initial label is contained in the label of a node on the current path.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass
from typing import Iterable

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
    Name,
    Not,
    Ontology,
    Or,
    Signature,
    conj,
    disj,
    nnf,
    signature_of,
)


# expansion recurses once per tableau node
if sys.getrecursionlimit() < 20_000:
    sys.setrecursionlimit(20_000)


class ResourceExceeded(RuntimeError):
    """The tableau created more nodes than allowed."""


@dataclass(frozen=True)
class TableauConfig:
    max_nodes: int = 100_000
    blocking: str = "subset"

    def __post_init__(self) -> None:
        if self.max_nodes <= 0:
            raise ValueError("max_nodes must be positive")
        if self.blocking != "subset":
            raise ValueError("only subset blocking is implemented")


DEFAULT_CONFIG = TableauConfig()


def _axioms_of(o) -> list[Axiom]:
    out = []
    for x in o:
        out.append(x.as_axiom() if isinstance(x, Clause) else x)
    return out


class Tableau:
    """Satisfiability of concepts with respect to a fixed TBox."""

    def __init__(self, tbox: Ontology | Iterable[Axiom] | Iterable[Clause], cfg: TableauConfig = DEFAULT_CONFIG) -> None:
        self.cfg = cfg
        self.unfold: dict[Name, list[Concept]] = {}
        general: list[Concept] = []
        for ax in _axioms_of(tbox):
            self._internalize(nnf(disj([Not(ax.lhs), ax.rhs])), general)
        self.general = frozenset(general)
        self._unsat: set[frozenset] = set()
        self._sat: set[frozenset] = set()
        self.nodes = 0

    def _internalize(self, g: Concept, general: list[Concept]) -> None:
        if g == TOP:
            return
        if isinstance(g, And):
            for a in g.args:
                self._internalize(a, general)
            return
        if isinstance(g, Not):
            self.unfold.setdefault(g.arg.name, []).append(BOTTOM)
            return
        if isinstance(g, Or):
            negs = [a for a in g.args if isinstance(a, Not)]
            if negs:
                head = negs[0]
                rest = disj(a for a in g.args if a != head)
                self.unfold.setdefault(head.arg.name, []).append(rest)
                return
        general.append(g)

    # -------------------------------------------------------------- queries

    def satisfiable(self, c: Concept) -> bool:
        self.nodes = 0
        init = frozenset({nnf(c)} | self.general) - {TOP}
        sat, _ = self._node(init, ())
        return sat

    def entails(self, ax: Axiom) -> bool:
        return not self.satisfiable(conj([ax.lhs, Not(ax.rhs)]))

    # ------------------------------------------------------------ expansion

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.cfg.max_nodes:
            raise ResourceExceeded(f"tableau exceeded {self.cfg.max_nodes} nodes")

    def _node(self, init: frozenset, ancestors: tuple) -> tuple[bool, bool]:
        if init in self._unsat:
            return False, False
        if init in self._sat:
            return True, False
        self._tick()
        label: set[Concept] = set()
        order: list[Concept] = []
        if not self._close(label, order, list(init)):
            self._unsat.add(init)
            return False, False
        sat, dep = self._branch(label, order, ancestors)
        if not sat:
            self._unsat.add(init)
        elif not dep:
            self._sat.add(init)
        return sat, dep

    def _close(self, label: set, order: list, queue: list) -> bool:
        while queue:
            c = queue.pop()
            if c in label or c == TOP:
                continue
            if c == BOTTOM:
                return False
            if isinstance(c, Atom):
                if Not(c) in label:
                    return False
                queue.extend(self.unfold.get(c.name, ()))
            elif isinstance(c, Not):
                if c.arg in label:
                    return False
            elif isinstance(c, And):
                queue.extend(c.args)
            label.add(c)
            order.append(c)
        return True

    @staticmethod
    def _clashes(c: Concept, label: set) -> bool:
        if c == BOTTOM:
            return True
        if isinstance(c, Atom):
            return Not(c) in label
        if isinstance(c, Not):
            return c.arg in label
        return False

    def _branch(self, label: set, order: list, ancestors: tuple) -> tuple[bool, bool]:
        while True:
            choice = None
            progressed = False
            for c in order:
                if not isinstance(c, Or) or any(a in label for a in c.args):
                    continue
                viable = [a for a in c.args if not self._clashes(a, label)]
                if not viable:
                    return False, False
                if len(viable) == 1:
                    if not self._close(label, order, [viable[0]]):
                        return False, False
                    progressed = True
                    break
                if choice is None:
                    choice = viable
            if progressed:
                continue
            break

        if choice is not None:
            dep_any = False
            for a in choice:
                self._tick()
                branch_label, branch_order = set(label), list(order)
                if not self._close(branch_label, branch_order, [a]):
                    continue
                sat, dep = self._branch(branch_label, branch_order, ancestors)
                dep_any = dep_any or dep
                if sat:
                    return True, dep_any
            return False, False

        here = frozenset(label)
        path = ancestors + (here,)
        dep_any = False
        for c in order:
            if not isinstance(c, Exists):
                continue
            succ = {c.filler} | self.general
            succ.update(d.filler for d in order if isinstance(d, Forall) and d.role == c.role)
            succ = frozenset(succ) - {TOP}  # labels never hold ⊤, so it would defeat blocking
            if any(succ <= anc for anc in path):
                dep_any = True
                continue
            sat, dep = self._node(succ, path)
            dep_any = dep_any or dep
            if not sat:
                return False, False
        return True, dep_any


def is_satisfiable(o, c: Concept, cfg: TableauConfig = DEFAULT_CONFIG) -> bool:
    return Tableau(o, cfg).satisfiable(c)


def entails(o, a: Axiom, cfg: TableauConfig = DEFAULT_CONFIG) -> bool:
    return Tableau(o, cfg).entails(a)


def entails_all(o, axioms: Iterable[Axiom], cfg: TableauConfig = DEFAULT_CONFIG) -> bool:
    t = Tableau(o, cfg)
    return all(t.entails(a) for a in axioms)


# ---------------------------------------------------------- inseparability


def random_concept(rng: random.Random, sigma: Signature, depth: int, leaf_prob: float = 0.5) -> Concept:
    """Random Σ-concept; each extra level of nesting is half as likely."""
    concepts = sorted(sigma.concepts)
    roles = sorted(sigma.roles)
    if depth <= 0 or rng.random() < leaf_prob:
        if concepts and rng.random() < 0.9:
            return Atom(rng.choice(concepts))
        return rng.choice([TOP, BOTTOM])
    productions = ["not", "and", "or"] + (["exists", "forall"] if roles else [])
    p = rng.choice(productions)
    sub = lambda: random_concept(rng, sigma, depth - 1, leaf_prob)  # noqa: E731
    if p == "not":
        return Not(sub())
    if p == "and":
        return conj([sub(), sub()])
    if p == "or":
        return disj([sub(), sub()])
    role = rng.choice(roles)
    return (Exists if p == "exists" else Forall)(role, sub())


def random_axiom(rng: random.Random, sigma: Signature, depth: int) -> Axiom:
    return Axiom(random_concept(rng, sigma, depth), random_concept(rng, sigma, depth))


def targeted_axioms(o1, o2, sigma: Signature) -> list[Axiom]:
    """Input axioms already inside Σ, plus simple atomic candidates."""
    out: list[Axiom] = []
    for ax in _axioms_of(o1) + _axioms_of(o2):
        if signature_of(ax) <= sigma:
            out.append(ax)
    names = sorted(sigma.concepts)
    out.append(Axiom(TOP, BOTTOM))
    out.extend(Axiom(Atom(a), BOTTOM) for a in names)
    if len(names) <= 8:
        out.extend(Axiom(Atom(a), Atom(b)) for a in names for b in names if a != b)
    for r in sorted(sigma.roles):
        out.append(Axiom(Exists(r, TOP), BOTTOM))
    return out


@dataclass
class InseparabilityResult:
    inseparable: bool
    counterexample: Axiom | None
    checked: int
    entailed_by_first: bool | None = None

    def __bool__(self) -> bool:
        return self.inseparable


def inseparable_sampled(
    o1,
    o2,
    sigma: Signature,
    samples: int = 50,
    depth: int = 2,
    seed: int = 0,
    cfg: TableauConfig = DEFAULT_CONFIG,
) -> InseparabilityResult:
    """Compare entailment of random and targeted Σ-axioms in both ontologies."""
    if depth > 3:
        raise ValueError("depth is limited to 3")
    rng = random.Random(seed)
    t1, t2 = Tableau(o1, cfg), Tableau(o2, cfg)
    candidates = targeted_axioms(o1, o2, sigma)
    candidates += [random_axiom(rng, sigma, depth) for _ in range(samples)]
    seen = set()
    checked = 0
    for ax in candidates:
        if ax in seen:
            continue
        seen.add(ax)
        checked += 1
        v1, v2 = t1.entails(ax), t2.entails(ax)
        if v1 != v2:
            return InseparabilityResult(False, ax, checked, v1)
    return InseparabilityResult(True, None, checked)
