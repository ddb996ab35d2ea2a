"""PDDL lexing, parsing, printing and validation for STRIPS with typing."""

from .ast import ROOT_TYPE, ActionSchema, Atom, PddlDomain, PddlProblem, PredicateSchema, sorted_atoms
from .diagnostics import ERROR, WARNING, Issue, PddlError, ValidationReport
from .markup import strip_markup
from .parser import parse_domain, parse_problem
from .printer import render_problem
from .validate import validate_problem

__all__ = [
    "ERROR",
    "ROOT_TYPE",
    "WARNING",
    "ActionSchema",
    "Atom",
    "Issue",
    "PddlDomain",
    "PddlError",
    "PddlProblem",
    "PredicateSchema",
    "ValidationReport",
    "parse_domain",
    "parse_problem",
    "render_problem",
    "sorted_atoms",
    "strip_markup",
    "validate_problem",
]
