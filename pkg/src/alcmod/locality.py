"""Syntactic ⊤⊥*-locality modules and frequency-weighted signature sampling."""

from __future__ import annotations

import random
from collections import Counter
from typing import Sequence

from .syntax import (
    BOTTOM,
    TOP,
    And,
    Atom,
    Axiom,
    Concept,
    Exists,
    Forall,
    Name,
    Not,
    Ontology,
    Or,
    Signature,
    signature_of,
    subconcepts,
)


class SignatureTooLarge(ValueError):
    pass


# A concept is classified as ⊥-equivalent, ⊤-equivalent, or neither, after
# every name outside the signature is replaced by ⊥ (bottom mode) or ⊤ (top
# mode; roles become the universal role).

_BOT, _TOP, _OTHER = -1, 1, 0


def _eval(c: Concept, sig: Signature, bottom_mode: bool) -> int:
    if c == TOP:
        return _TOP
    if c == BOTTOM:
        return _BOT
    if isinstance(c, Atom):
        if c.name in sig:
            return _OTHER
        return _BOT if bottom_mode else _TOP
    if isinstance(c, Not):
        return -_eval(c.arg, sig, bottom_mode)
    if isinstance(c, And):
        vals = [_eval(a, sig, bottom_mode) for a in c.args]
        if _BOT in vals:
            return _BOT
        return _TOP if all(v == _TOP for v in vals) else _OTHER
    if isinstance(c, Or):
        vals = [_eval(a, sig, bottom_mode) for a in c.args]
        if _TOP in vals:
            return _TOP
        return _BOT if all(v == _BOT for v in vals) else _OTHER
    if isinstance(c, (Exists, Forall)):
        inner = _eval(c.filler, sig, bottom_mode)
        outside = c.role not in sig
        if isinstance(c, Exists):
            if inner == _BOT or (outside and bottom_mode):
                return _BOT
            if outside and not bottom_mode and inner == _TOP:
                return _TOP
            return _OTHER
        if inner == _TOP or (outside and bottom_mode):
            return _TOP
        if outside and not bottom_mode and inner == _BOT:
            return _BOT
        return _OTHER
    raise TypeError(c)


def is_tautology(ax: Axiom) -> bool:
    """C ⊑ C, C ⊓ … ⊑ C and C ⊑ C ⊔ … hold whatever the signature."""
    lhs, rhs = ax.lhs, ax.rhs
    if lhs == rhs:
        return True
    if isinstance(lhs, And) and rhs in lhs.args:
        return True
    return isinstance(rhs, Or) and lhs in rhs.args


def is_local(ax: Axiom, sig: Signature, bottom_mode: bool) -> bool:
    if is_tautology(ax):
        return True
    return _eval(ax.lhs, sig, bottom_mode) == _BOT or _eval(ax.rhs, sig, bottom_mode) == _TOP


def _module_indices(axioms: Sequence[Axiom], candidates: list[int], sigma: Signature, bottom_mode: bool) -> list[int]:
    sig = sigma
    chosen: set[int] = set()
    changed = True
    while changed:
        changed = False
        for i in candidates:
            if i in chosen:
                continue
            if not is_local(axioms[i], sig, bottom_mode):
                chosen.add(i)
                sig = sig | signature_of(axioms[i])
                changed = True
    return sorted(chosen)


def star_module_indices(o: Ontology | Sequence[Axiom], sigma: Signature) -> list[int]:
    """Indices of the ⊤⊥*-module: ⊥- and ⊤-module extraction alternated to a fixpoint."""
    axioms = list(o.axioms if isinstance(o, Ontology) else o)
    current = list(range(len(axioms)))
    bottom_mode = True
    stable = 0
    while stable < 2:
        nxt = _module_indices(axioms, current, sigma, bottom_mode)
        stable = stable + 1 if nxt == current else 0
        current = nxt
        bottom_mode = not bottom_mode
    return current


def extract_star_module(o: Ontology, sigma: Signature) -> Ontology:
    return o.subset(star_module_indices(o, sigma))


def occurrence_counts(o: Ontology) -> Counter:
    counts: Counter = Counter()
    for ax in o.axioms:
        for side in (ax.lhs, ax.rhs):
            for sub in subconcepts(side):
                if isinstance(sub, Atom):
                    counts[sub.name] += 1
                elif isinstance(sub, (Exists, Forall)):
                    counts[sub.role] += 1
    return counts


def sample_signature(o: Ontology, size: int, seed: int) -> Signature:
    """Names drawn without replacement, each with probability proportional to its occurrences."""
    counts = occurrence_counts(o)
    names: list[Name] = sorted(counts)
    if size > len(names):
        raise SignatureTooLarge(f"requested {size} names but the ontology has {len(names)}")
    if size < 0:
        raise ValueError("size must be non-negative")
    rng = random.Random(seed)
    pool = list(names)
    weights = [counts[n] for n in pool]
    picked: list[Name] = []
    for _ in range(size):
        k = rng.choices(range(len(pool)), weights=weights)[0]
        picked.append(pool.pop(k))
        weights.pop(k)
    return Signature(
        frozenset(n for n in picked if n.kind.value == "concept"),
        frozenset(n for n in picked if n.kind.value == "role"),
    )
