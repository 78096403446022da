"""Reading and writing ontologies, signatures and run reports.

The ontology format is a small subset of OWL functional syntax::

    # comment
    SubClassOf(A1 ObjectUnionOf(ObjectSomeValuesFrom(r B1) B2))
    EquivalentClasses(A ObjectIntersectionOf(B C))
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from typing import Any

from .syntax import (
    BOTTOM,
    DEFINER_PREFIX,
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
    concept_name,
    role_name,
)


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<iri><[^<>\s]*>)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_\-.:]*)
    """,
    re.VERBOSE,
)

_SIG_COMMENT = re.compile(r"(^|\s)#.*$")
_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-.:]*\Z")

_UNSUPPORTED = {
    "ObjectMinCardinality", "ObjectMaxCardinality", "ObjectExactCardinality",
    "ObjectHasValue", "ObjectHasSelf", "ObjectOneOf", "ObjectInverseOf",
    "ObjectPropertyChain", "SubObjectPropertyOf", "EquivalentObjectProperties",
    "DisjointClasses", "DisjointUnion", "ClassAssertion", "ObjectPropertyAssertion",
    "TransitiveObjectProperty", "ObjectPropertyDomain", "ObjectPropertyRange",
    "DataSomeValuesFrom", "DataAllValuesFrom",
}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str) -> None:
        self.toks = _tokenize(text)
        self.i = 0
        lines = text.split("\n")
        self.end = (len(lines), len(lines[-1]) + 1)

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, what: str) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise ParseError(*self.end, f"unexpected end of input, expected {what}")
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Tok:
        tok = self.next(what)
        if tok.kind != kind:
            raise ParseError(tok.line, tok.col, f"expected {what}, found {tok.text!r}")
        return tok

    def name_text(self, tok: _Tok) -> str:
        text = tok.text[1:-1] if tok.kind == "iri" else tok.text
        if text.startswith(DEFINER_PREFIX):
            raise ParseError(tok.line, tok.col, f"name {text!r} uses the reserved prefix {DEFINER_PREFIX!r}")
        if not text:
            raise ParseError(tok.line, tok.col, "empty IRI")
        return text

    def role(self) -> Name:
        tok = self.next("a role name")
        if tok.kind not in ("ident", "iri"):
            raise ParseError(tok.line, tok.col, f"expected a role name, found {tok.text!r}")
        if tok.kind == "ident" and self.peek() is not None and self.peek().kind == "lpar":
            raise ParseError(tok.line, tok.col, f"unsupported role expression {tok.text}")
        return role_name(self.name_text(tok))

    def concept(self) -> Concept:
        tok = self.next("a class expression")
        if tok.kind == "iri":
            return Atom(concept_name(self.name_text(tok)))
        if tok.kind != "ident":
            raise ParseError(tok.line, tok.col, f"expected a class expression, found {tok.text!r}")
        nxt = self.peek()
        if nxt is None or nxt.kind != "lpar":
            if tok.text == "owl:Thing":
                return TOP
            if tok.text == "owl:Nothing":
                return BOTTOM
            return Atom(concept_name(self.name_text(tok)))
        head = tok.text
        if head in _UNSUPPORTED:
            raise ParseError(tok.line, tok.col, f"unsupported constructor {head}")
        self.i += 1
        if head in ("ObjectIntersectionOf", "ObjectUnionOf"):
            args = [self.concept()]
            while self.peek() is not None and self.peek().kind != "rpar":
                args.append(self.concept())
            if len(args) < 2:
                raise ParseError(tok.line, tok.col, f"{head} needs at least two operands")
            self.expect("rpar", "')'")
            cls = And if head == "ObjectIntersectionOf" else Or
            return args[0] if len(set(args)) == 1 else cls(args)
        if head == "ObjectComplementOf":
            arg = self.concept()
            self.expect("rpar", "')'")
            return Not(arg)
        if head in ("ObjectSomeValuesFrom", "ObjectAllValuesFrom"):
            r = self.role()
            filler = self.concept()
            self.expect("rpar", "')'")
            return (Exists if head == "ObjectSomeValuesFrom" else Forall)(r, filler)
        raise ParseError(tok.line, tok.col, f"unknown constructor {head}")

    def skip_group(self) -> None:
        depth = 1
        while depth:
            tok = self.next("')'")
            depth += {"lpar": 1, "rpar": -1}.get(tok.kind, 0)


def parse_ontology(text: str) -> Ontology:
    p = _Parser(text)
    axioms: list[Axiom] = []
    statements: list[int] = []
    stmt = 0
    while p.peek() is not None:
        tok = p.expect("ident", "a statement")
        if tok.text in ("Prefix", "Declaration"):
            p.expect("lpar", "'('")
            p.skip_group()
            continue
        if tok.text == "Ontology":
            # tolerate an enclosing Ontology( ... ) wrapper
            p.expect("lpar", "'('")
            closing = _matching_rpar(p.toks, p.i - 1)
            while p.peek() is not None and p.peek().kind == "iri":
                p.i += 1
            if closing is None:
                raise ParseError(tok.line, tok.col, "unterminated Ontology(...)")
            del p.toks[closing]
            continue
        if tok.text == "SubClassOf":
            p.expect("lpar", "'('")
            lhs, rhs = p.concept(), p.concept()
            p.expect("rpar", "')'")
            axioms.append(Axiom(lhs, rhs))
            statements.append(stmt)
        elif tok.text == "EquivalentClasses":
            p.expect("lpar", "'('")
            lhs, rhs = p.concept(), p.concept()
            extra = p.peek()
            if extra is not None and extra.kind != "rpar":
                raise ParseError(extra.line, extra.col, "EquivalentClasses with more than two operands is not supported")
            p.expect("rpar", "')'")
            axioms += [Axiom(lhs, rhs), Axiom(rhs, lhs)]
            statements += [stmt, stmt]
        elif tok.text in _UNSUPPORTED:
            raise ParseError(tok.line, tok.col, f"unsupported axiom type {tok.text}")
        else:
            raise ParseError(tok.line, tok.col, f"unknown statement {tok.text!r}")
        stmt += 1
    return Ontology(tuple(axioms), tuple(statements))


def _matching_rpar(toks: list[_Tok], open_index: int) -> int | None:
    depth = 0
    for j in range(open_index, len(toks)):
        if toks[j].kind == "lpar":
            depth += 1
        elif toks[j].kind == "rpar":
            depth -= 1
            if depth == 0:
                return j
    return None


def _name_out(name: Name) -> str:
    return name.text if _BARE.match(name.text) and name.text not in ("owl:Thing", "owl:Nothing") else f"<{name.text}>"


def format_concept(c: Concept) -> str:
    if c == TOP:
        return "owl:Thing"
    if c == BOTTOM:
        return "owl:Nothing"
    if isinstance(c, Atom):
        return _name_out(c.name)
    if isinstance(c, Not):
        return f"ObjectComplementOf({format_concept(c.arg)})"
    if isinstance(c, And):
        return "ObjectIntersectionOf(" + " ".join(format_concept(a) for a in c.args) + ")"
    if isinstance(c, Or):
        return "ObjectUnionOf(" + " ".join(format_concept(a) for a in c.args) + ")"
    if isinstance(c, Exists):
        return f"ObjectSomeValuesFrom({_name_out(c.role)} {format_concept(c.filler)})"
    if isinstance(c, Forall):
        return f"ObjectAllValuesFrom({_name_out(c.role)} {format_concept(c.filler)})"
    raise TypeError(c)


def format_axiom(a: Axiom) -> str:
    return f"SubClassOf({format_concept(a.lhs)} {format_concept(a.rhs)})"


def serialize_ontology(o: Ontology) -> str:
    lines: list[str] = []
    i = 0
    axioms, stmts = o.axioms, o.statements
    while i < len(axioms):
        a = axioms[i]
        if (
            i + 1 < len(axioms)
            and stmts[i] == stmts[i + 1]
            and axioms[i + 1] == Axiom(a.rhs, a.lhs)
        ):
            lines.append(f"EquivalentClasses({format_concept(a.lhs)} {format_concept(a.rhs)})")
            i += 2
            continue
        lines.append(format_axiom(a))
        i += 1
    return "".join(line + "\n" for line in lines)


# --------------------------------------------------------------- signatures


def parse_signature(text: str) -> Signature:
    concepts: set[Name] = set()
    roles: set[Name] = set()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = _SIG_COMMENT.sub("", raw).strip()
        if not line:
            continue
        prefix, sep, rest = line.partition(":")
        if not sep or prefix.strip() not in ("Class", "ObjectProperty"):
            raise ParseError(lineno, 1, "expected 'Class:' or 'ObjectProperty:'")
        text_ = rest.strip()
        col = raw.find(text_) + 1 if text_ else len(raw) + 1
        if text_.startswith("<") and text_.endswith(">"):
            text_ = text_[1:-1]
        if not text_ or any(ch.isspace() for ch in text_):
            raise ParseError(lineno, col, "expected exactly one name")
        if text_.startswith(DEFINER_PREFIX):
            raise ParseError(lineno, col, f"name {text_!r} uses the reserved prefix {DEFINER_PREFIX!r}")
        if prefix.strip() == "Class":
            concepts.add(concept_name(text_))
        else:
            roles.add(role_name(text_))
    return Signature(frozenset(concepts), frozenset(roles))


def serialize_signature(sig: Signature) -> str:
    out = [f"ObjectProperty: {_name_out(r)}" for r in sorted(sig.roles)]
    out += [f"Class: {_name_out(c)}" for c in sorted(sig.concepts)]
    return "".join(line + "\n" for line in out)


# ------------------------------------------------------------------ reports


@dataclass
class RunReport:
    input_length: int = 0
    cl_length: int = 0
    ri_size: int = 0
    result_length: int = 0
    result_axioms: int = 0
    max_axiom_length: int = 0
    stage_times_ms: dict[str, float] = field(default_factory=dict)
    subsumption_budget_hit: bool = False
    ui_status: str | None = None
    widened_signature: list[str] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)


def emit_report(report: RunReport) -> str:
    data = asdict(report)
    extra = data.pop("extra")
    data.update(extra)
    data["stage_times_ms"] = {k: round(v, 3) for k, v in data["stage_times_ms"].items()}
    return json.dumps(data, indent=2, sort_keys=True) + "\n"
