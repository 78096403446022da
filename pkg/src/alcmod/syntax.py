"""Term language for ALC: names, concepts, axioms, signatures and clauses."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Union

DEFINER_PREFIX = "_D"


class Kind(str, Enum):
    CONCEPT = "concept"
    ROLE = "role"


class Origin(str, Enum):
    INPUT = "input"
    DEFINER = "definer"
    BOTTOM = "placeholder-bottom"


@dataclass(frozen=True, slots=True)
class Name:
    text: str
    kind: Kind = Kind.CONCEPT
    origin: Origin = Origin.INPUT

    @property
    def is_definer(self) -> bool:
        return self.origin is Origin.DEFINER

    def sort_key(self) -> tuple:
        return (self.kind.value, _natural_key(self.text))

    def __lt__(self, other: Name) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return self.text


def _natural_key(text: str) -> tuple:
    # "A10" sorts after "A2"
    parts = []
    for is_digit, chunk in itertools.groupby(text, str.isdigit):
        s = "".join(chunk)
        parts.append((1, int(s), s) if is_digit else (0, 0, s))
    return tuple(parts)


def concept_name(text: str) -> Name:
    return Name(text, Kind.CONCEPT, Origin.INPUT)


def role_name(text: str) -> Name:
    return Name(text, Kind.ROLE, Origin.INPUT)


def definer_name(index: int) -> Name:
    return Name(f"{DEFINER_PREFIX}{index}", Kind.CONCEPT, Origin.DEFINER)


# ---------------------------------------------------------------- concepts


class Concept:
    """Immutable concept term with a cached structural hash."""

    __slots__ = ("_h",)
    rank = 0

    def _fields(self) -> tuple:
        return ()

    def _seal(self) -> None:
        object.__setattr__(self, "_h", hash((type(self).__name__,) + self._fields()))

    def __setattr__(self, key, value):
        raise AttributeError("concepts are immutable")

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        return self._h == other._h and self._fields() == other._fields()

    def __hash__(self) -> int:
        return self._h

    def __repr__(self) -> str:
        return f"{type(self).__name__}({render(self)})"

    def __str__(self) -> str:
        return render(self)


class _Top(Concept):
    __slots__ = ()
    rank = 0

    def __init__(self) -> None:
        self._seal()


class _Bottom(Concept):
    __slots__ = ()
    rank = 1

    def __init__(self) -> None:
        self._seal()


TOP = _Top()
BOTTOM = _Bottom()


class Atom(Concept):
    __slots__ = ("name",)
    rank = 2

    def __init__(self, name: Name | str) -> None:
        if isinstance(name, str):
            name = concept_name(name)
        if name.kind is not Kind.CONCEPT:
            raise ValueError(f"{name} is not a concept name")
        object.__setattr__(self, "name", name)
        self._seal()

    def _fields(self) -> tuple:
        return (self.name,)


class Not(Concept):
    """Negation. ``Not(Not(c))`` collapses to ``c``."""

    __slots__ = ("arg",)
    rank = 3

    def __new__(cls, arg: Concept):
        if isinstance(arg, Not):
            return arg.arg
        return super().__new__(cls)

    def __init__(self, arg: Concept) -> None:
        object.__setattr__(self, "arg", arg)
        self._seal()

    def _fields(self) -> tuple:
        return (self.arg,)


class _Nary(Concept):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[Concept]) -> None:
        flat: set[Concept] = set()
        for a in args:
            if type(a) is type(self):
                flat.update(a.args)
            else:
                flat.add(a)
        if len(flat) < 2:
            raise ValueError(f"{type(self).__name__} needs at least two distinct members")
        object.__setattr__(self, "args", tuple(sorted(flat, key=sort_key)))
        self._seal()

    def _fields(self) -> tuple:
        return self.args


class And(_Nary):
    __slots__ = ()
    rank = 4


class Or(_Nary):
    __slots__ = ()
    rank = 5


class _Restriction(Concept):
    __slots__ = ("role", "filler")

    def __init__(self, role: Name | str, filler: Concept) -> None:
        if isinstance(role, str):
            role = role_name(role)
        if role.kind is not Kind.ROLE:
            raise ValueError(f"{role} is not a role name")
        object.__setattr__(self, "role", role)
        object.__setattr__(self, "filler", filler)
        self._seal()

    def _fields(self) -> tuple:
        return (self.role, self.filler)


class Exists(_Restriction):
    __slots__ = ()
    rank = 6


class Forall(_Restriction):
    __slots__ = ()
    rank = 7


def sort_key(c: Concept) -> tuple:
    if isinstance(c, Atom):
        return (c.rank, c.name.sort_key())
    if isinstance(c, Not):
        return (c.rank, sort_key(c.arg))
    if isinstance(c, _Nary):
        return (c.rank, tuple(sort_key(a) for a in c.args))
    if isinstance(c, _Restriction):
        return (c.rank, c.role.sort_key(), sort_key(c.filler))
    return (c.rank,)


def conj(args: Iterable[Concept]) -> Concept:
    """n-ary conjunction; empty gives TOP, a single member is returned as is."""
    members = {a for a in _flatten(args, And) if a != TOP}
    if BOTTOM in members:
        return BOTTOM
    if not members:
        return TOP
    if len(members) == 1:
        return next(iter(members))
    return And(members)


def disj(args: Iterable[Concept]) -> Concept:
    """n-ary disjunction; empty gives BOTTOM."""
    members = {a for a in _flatten(args, Or) if a != BOTTOM}
    if TOP in members:
        return TOP
    if not members:
        return BOTTOM
    if len(members) == 1:
        return next(iter(members))
    return Or(members)


def _flatten(args: Iterable[Concept], cls: type) -> Iterator[Concept]:
    for a in args:
        if isinstance(a, cls):
            yield from a.args
        else:
            yield a


def nnf(c: Concept) -> Concept:
    """Negation normal form: negation is pushed down to concept names.

    Trivial restrictions collapse on the way: ∃r.⊥ becomes ⊥ and ∀r.⊤ becomes ⊤.
    """
    if isinstance(c, Not):
        return _nnf_neg(c.arg)
    if isinstance(c, And):
        return conj(nnf(a) for a in c.args)
    if isinstance(c, Or):
        return disj(nnf(a) for a in c.args)
    if isinstance(c, Exists):
        return _exists(c.role, nnf(c.filler))
    if isinstance(c, Forall):
        return _forall(c.role, nnf(c.filler))
    return c


def _exists(r: Name, filler: Concept) -> Concept:
    return BOTTOM if filler == BOTTOM else Exists(r, filler)


def _forall(r: Name, filler: Concept) -> Concept:
    return TOP if filler == TOP else Forall(r, filler)


def _nnf_neg(c: Concept) -> Concept:
    if c is TOP:
        return BOTTOM
    if c is BOTTOM:
        return TOP
    if isinstance(c, Atom):
        return Not(c)
    if isinstance(c, Not):
        return nnf(c.arg)
    if isinstance(c, And):
        return disj(_nnf_neg(a) for a in c.args)
    if isinstance(c, Or):
        return conj(_nnf_neg(a) for a in c.args)
    if isinstance(c, Exists):
        return _forall(c.role, _nnf_neg(c.filler))
    if isinstance(c, Forall):
        return _exists(c.role, _nnf_neg(c.filler))
    raise TypeError(c)


def subconcepts(c: Concept) -> Iterator[Concept]:
    yield c
    if isinstance(c, Not):
        yield from subconcepts(c.arg)
    elif isinstance(c, _Nary):
        for a in c.args:
            yield from subconcepts(a)
    elif isinstance(c, _Restriction):
        yield from subconcepts(c.filler)


def replace_names(c: Concept, mapping: dict[Name, Concept]) -> Concept:
    """Substitute concept names by concepts everywhere in ``c``."""
    if isinstance(c, Atom):
        return mapping.get(c.name, c)
    if isinstance(c, Not):
        return Not(replace_names(c.arg, mapping))
    if isinstance(c, And):
        return conj(replace_names(a, mapping) for a in c.args)
    if isinstance(c, Or):
        return disj(replace_names(a, mapping) for a in c.args)
    if isinstance(c, _Restriction):
        return type(c)(c.role, replace_names(c.filler, mapping))
    return c


_PRECEDENCE = {And: 2, Or: 1}


def render(c: Concept, parent: int = 0) -> str:
    if c is TOP:
        return "⊤"
    if c is BOTTOM:
        return "⊥"
    if isinstance(c, Atom):
        return c.name.text
    if isinstance(c, Not):
        return "¬" + render(c.arg, 3)
    if isinstance(c, _Nary):
        prec = _PRECEDENCE[type(c)]
        sep = " ⊓ " if isinstance(c, And) else " ⊔ "
        body = sep.join(render(a, prec) for a in c.args)
        return f"({body})" if parent >= prec else body
    if isinstance(c, _Restriction):
        q = "∃" if isinstance(c, Exists) else "∀"
        return f"{q}{c.role.text}.{render(c.filler, 3)}"
    raise TypeError(c)


# ------------------------------------------------------- axioms, ontologies


@dataclass(frozen=True)
class Axiom:
    lhs: Concept
    rhs: Concept

    def __str__(self) -> str:
        return f"{render(self.lhs)} ⊑ {render(self.rhs)}"


@dataclass(frozen=True)
class Ontology:
    """Ordered axioms. ``statements[i]`` groups axioms desugared from one input statement."""

    axioms: tuple[Axiom, ...] = ()
    statements: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "axioms", tuple(self.axioms))
        if self.statements is None:
            object.__setattr__(self, "statements", tuple(range(len(self.axioms))))
        else:
            object.__setattr__(self, "statements", tuple(self.statements))
        if len(self.statements) != len(self.axioms):
            raise ValueError("one statement id per axiom is required")

    def __len__(self) -> int:
        return len(self.axioms)

    def __iter__(self) -> Iterator[Axiom]:
        return iter(self.axioms)

    def subset(self, indices: Iterable[int]) -> Ontology:
        keep = sorted(set(indices))
        return Ontology(
            tuple(self.axioms[i] for i in keep),
            tuple(self.statements[i] for i in keep),
        )


# --------------------------------------------------------------- signature


@dataclass(frozen=True)
class Signature:
    concepts: frozenset[Name] = frozenset()
    roles: frozenset[Name] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "concepts", frozenset(self.concepts))
        object.__setattr__(self, "roles", frozenset(self.roles))
        if any(n.kind is not Kind.CONCEPT for n in self.concepts):
            raise ValueError("role name among signature concepts")
        if any(n.kind is not Kind.ROLE for n in self.roles):
            raise ValueError("concept name among signature roles")

    @classmethod
    def of(cls, concepts: Iterable[str] = (), roles: Iterable[str] = ()) -> Signature:
        return cls(frozenset(map(concept_name, concepts)), frozenset(map(role_name, roles)))

    def __contains__(self, name: Name) -> bool:
        if name.kind is Kind.ROLE:
            return name in self.roles
        return name in self.concepts

    def __or__(self, other: Signature) -> Signature:
        return Signature(self.concepts | other.concepts, self.roles | other.roles)

    def __le__(self, other: Signature) -> bool:
        return self.concepts <= other.concepts and self.roles <= other.roles

    def __len__(self) -> int:
        return len(self.concepts) + len(self.roles)

    def names(self) -> list[Name]:
        return sorted(self.concepts | self.roles)

    def without_definers(self) -> Signature:
        return Signature(frozenset(n for n in self.concepts if not n.is_definer), self.roles)

    def __str__(self) -> str:
        return "{" + ", ".join(n.text for n in self.names()) + "}"


EMPTY_SIGNATURE = Signature()


def signature_of(x: Concept | Axiom | Ontology | Iterable) -> Signature:
    concepts: set[Name] = set()
    roles: set[Name] = set()
    _collect(x, concepts, roles)
    return Signature(frozenset(concepts), frozenset(roles))


def _collect(x, concepts: set[Name], roles: set[Name]) -> None:
    if isinstance(x, Concept):
        for sub in subconcepts(x):
            if isinstance(sub, Atom):
                concepts.add(sub.name)
            elif isinstance(sub, _Restriction):
                roles.add(sub.role)
    elif isinstance(x, Axiom):
        _collect(x.lhs, concepts, roles)
        _collect(x.rhs, concepts, roles)
    elif isinstance(x, Literal):
        _collect(x.concept(), concepts, roles)
    elif isinstance(x, Clause):
        for lit in x.literals:
            _collect(lit.concept(), concepts, roles)
    else:
        for item in x:
            _collect(item, concepts, roles)


# ------------------------------------------------------------------ length


def length(x: Concept | Axiom | Ontology | Clause | Iterable) -> int:
    """|⊤| = |A| = 1, |C⊓D| = |C⊔D| = |C⊑D| = |C|+|D|, |Qr.C| = |C|+1, |¬C| = |C|."""
    if isinstance(x, Concept):
        if isinstance(x, Not):
            return length(x.arg)
        if isinstance(x, _Nary):
            return sum(length(a) for a in x.args)
        if isinstance(x, _Restriction):
            return length(x.filler) + 1
        return 1
    if isinstance(x, Axiom):
        return length(x.lhs) + length(x.rhs)
    if isinstance(x, Clause):
        return 1 + sum(length(lit.concept()) for lit in x.literals)
    return sum(length(a) for a in x)


# ---------------------------------------------------------------- literals


class LitTag(int, Enum):
    POS = 0
    NEG = 1
    EX = 2
    ALL = 3


@dataclass(frozen=True, slots=True)
class Literal:
    """A disjunct of a clause: A, ¬A, ∃r.F or ∀r.F.

    Fillers produced by clausification are definer atoms; fillers become
    ⊥ or arbitrary concepts only when definers are eliminated.
    """

    tag: LitTag
    name: Name | None = None
    role: Name | None = None
    filler: Concept | None = None

    @staticmethod
    def pos(name: Name) -> Literal:
        return Literal(LitTag.POS, name=name)

    @staticmethod
    def neg(name: Name) -> Literal:
        return Literal(LitTag.NEG, name=name)

    @staticmethod
    def ex(role: Name, filler: Concept | Name) -> Literal:
        return Literal(LitTag.EX, role=role, filler=_as_concept(filler))

    @staticmethod
    def all(role: Name, filler: Concept | Name) -> Literal:
        return Literal(LitTag.ALL, role=role, filler=_as_concept(filler))

    @property
    def is_role(self) -> bool:
        return self.tag >= LitTag.EX

    @property
    def filler_definer(self) -> Name | None:
        """The definer this restriction points at, if its filler is a definer atom."""
        if self.is_role and isinstance(self.filler, Atom) and self.filler.name.is_definer:
            return self.filler.name
        return None

    def concept(self) -> Concept:
        if self.tag is LitTag.POS:
            return Atom(self.name)
        if self.tag is LitTag.NEG:
            return Not(Atom(self.name))
        if self.tag is LitTag.EX:
            return Exists(self.role, self.filler)
        return Forall(self.role, self.filler)

    def complement(self) -> Literal | None:
        if self.tag is LitTag.POS:
            return Literal.neg(self.name)
        if self.tag is LitTag.NEG:
            return Literal.pos(self.name)
        return None

    def sort_key(self) -> tuple:
        if self.is_role:
            return (int(self.tag), self.role.sort_key(), sort_key(self.filler))
        return (int(self.tag), (), self.name.sort_key())

    def __lt__(self, other: Literal) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return render(self.concept())


def _as_concept(filler: Concept | Name) -> Concept:
    return Atom(filler) if isinstance(filler, Name) else filler


def literal_of(c: Concept) -> Literal:
    """Read a literal-shaped concept back as a Literal."""
    if isinstance(c, Atom):
        return Literal.pos(c.name)
    if isinstance(c, Not) and isinstance(c.arg, Atom):
        return Literal.neg(c.arg.name)
    if isinstance(c, Exists):
        return Literal.ex(c.role, c.filler)
    if isinstance(c, Forall):
        return Literal.all(c.role, c.filler)
    raise ValueError(f"not a literal: {render(c)}")


# ----------------------------------------------------------------- clauses


_ids = itertools.count(1)


class IdFactory:
    """Monotone clause-id source; one per pipeline run."""

    def __init__(self, start: int = 1) -> None:
        self._counter = itertools.count(start)

    def __call__(self) -> int:
        return next(self._counter)


@dataclass(frozen=True)
class Clause:
    """⊤ ⊑ L1 ⊔ … ⊔ Ln with literals held as a sorted, duplicate-free tuple."""

    literals: tuple[Literal, ...]
    id: int = field(default=0, compare=False)

    @property
    def literal_set(self) -> frozenset[Literal]:
        return frozenset(self.literals)

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    def __contains__(self, lit: Literal) -> bool:
        return lit in self.literals

    def without(self, lit: Literal) -> tuple[Literal, ...]:
        return tuple(l for l in self.literals if l != lit)

    def concept(self) -> Concept:
        return disj(l.concept() for l in self.literals)

    def as_axiom(self) -> Axiom:
        return Axiom(TOP, self.concept())

    @property
    def is_negative_definer_clause(self) -> bool:
        """All literals are ¬D for definers D (the empty clause included)."""
        return all(l.tag is LitTag.NEG and l.name.is_definer for l in self.literals)

    def definers(self) -> set[Name]:
        out: set[Name] = set()
        for l in self.literals:
            if l.is_role:
                out.update(n for n in signature_of(l.filler).concepts if n.is_definer)
            elif l.name.is_definer:
                out.add(l.name)
        return out

    def __str__(self) -> str:
        if not self.literals:
            return "⊥"
        return " ⊔ ".join(str(l) for l in self.literals)


class _Tautology:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "TAUTOLOGY"

    def __bool__(self) -> bool:
        return False


TAUTOLOGY = _Tautology()


def is_trivially_true(lit: Literal) -> bool:
    return lit.tag is LitTag.ALL and lit.filler == TOP


def is_trivially_false(lit: Literal) -> bool:
    return lit.tag is LitTag.EX and lit.filler == BOTTOM


def make_clause(lits: Iterable[Literal], ids: IdFactory | None = None) -> Clause:
    """Sort and deduplicate without any tautology test."""
    lits = tuple(sorted(set(lits)))
    return Clause(lits, ids() if ids is not None else next(_ids))


def canonical_clause(lits: Iterable[Literal], ids: IdFactory | None = None) -> Clause | _Tautology:
    """Canonical clause, or TAUTOLOGY when A and ¬A co-occur or a disjunct is ∀r.⊤.

    ∃r.⊥ disjuncts are unsatisfiable and are dropped.
    """
    keep: set[Literal] = set()
    for lit in lits:
        if is_trivially_true(lit):
            return TAUTOLOGY
        if is_trivially_false(lit):
            continue
        keep.add(lit)
    for lit in keep:
        comp = lit.complement()
        if comp is not None and comp in keep:
            return TAUTOLOGY
    return make_clause(keep, ids)


def is_tautology(c: Clause) -> bool:
    return canonical_clause(c.literals, IdFactory()) is TAUTOLOGY


Node = Union[Concept, Axiom, Ontology, Clause]
