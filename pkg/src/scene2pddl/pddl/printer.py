"""Canonical PDDL problem printer."""

from __future__ import annotations

from .ast import PddlProblem, sorted_atoms


def render_problem(p: PddlProblem) -> str:
    """Render ``p`` deterministically: objects by name, init atoms sorted."""
    lines = [f"(define (problem {p.name})", f"  (:domain {p.domain_name})"]
    if p.objects:
        lines.append("  (:objects")
        lines.extend(f"    {name} - {otype}" for name, otype in sorted(p.objects))
        lines.append("  )")
    else:
        lines.append("  (:objects )")
    if p.init:
        lines.append("  (:init")
        lines.extend(f"    {atom}" for atom in sorted_atoms(p.init))
        lines.append("  )")
    else:
        lines.append("  (:init )")
    lines.append("  (:goal (and")
    lines.extend(f"    {atom}" for atom in p.goal)
    lines.append("  ))")
    lines.append(")")
    return "\n".join(lines) + "\n"
