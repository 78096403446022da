"""General modules, deductive modules and uniform interpolants for ALC ontologies."""

from .module_builder import (
    BuildConfig,
    UiStatus,
    build,
    deductive_module,
    general_module,
    general_module_opt,
    uniform_interpolant,
)
from .normalize import clausify
from .parser_io import parse_ontology, parse_signature, serialize_ontology
from .syntax import Axiom, Ontology, Signature

__all__ = [
    "Axiom",
    "BuildConfig",
    "Ontology",
    "Signature",
    "UiStatus",
    "build",
    "clausify",
    "deductive_module",
    "general_module",
    "general_module_opt",
    "parse_ontology",
    "parse_signature",
    "serialize_ontology",
    "uniform_interpolant",
]
