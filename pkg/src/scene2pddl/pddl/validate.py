"""Static checks of a problem against its domain."""

from __future__ import annotations

from .ast import PddlDomain, PddlProblem
from .diagnostics import Issue, ValidationReport, error, warning


def validate_problem(d: PddlDomain, p: PddlProblem) -> ValidationReport:
    """Check ``p`` against ``d``; never raises.

    Argument/parameter type disagreements are warnings only: they do not stop
    a STRIPS task from being grounded.
    """
    issues: list[Issue] = list(p.warnings)
    if p.domain_name != d.name:
        issues.append(error("DOMAIN_MISMATCH", f"problem is for domain {p.domain_name!r}, not {d.name!r}"))
    types = p.object_types
    for name, otype in p.objects:
        if not d.has_type(otype):
            issues.append(error("UNDECLARED_TYPE", f"object {name} has undeclared type {otype}"))
    for section, atoms in (("init", sorted(p.init, key=lambda a: a.key)), ("goal", p.goal)):
        for atom in atoms:
            schema = d.predicate_map.get(atom.predicate)
            if schema is None:
                issues.append(error("UNKNOWN_PREDICATE", f"{atom} in {section}: predicate not declared", atom.line, atom.col))
                continue
            if schema.arity != len(atom.args):
                issues.append(error("ARITY_MISMATCH", f"{atom} in {section}: {atom.predicate} takes {schema.arity} argument(s), got {len(atom.args)}", atom.line, atom.col))
            for arg, (_, ptype) in zip(atom.args, schema.params):
                if arg not in types:
                    issues.append(error("UNKNOWN_OBJECT", f"{atom} in {section}: {arg} is not a declared object", atom.line, atom.col))
                elif d.has_type(types[arg]) and not d.is_subtype(types[arg], ptype):
                    issues.append(warning("TYPE_MISMATCH", f"{atom} in {section}: {arg} is a {types[arg]}, expected {ptype}", atom.line, atom.col))
            for arg in atom.args[schema.arity :]:
                if arg not in types:
                    issues.append(error("UNKNOWN_OBJECT", f"{atom} in {section}: {arg} is not a declared object", atom.line, atom.col))
    return ValidationReport(tuple(issues))
