"""STRIPS grounding, A* search and plan validation."""

from __future__ import annotations

import re

from .search import (
    BudgetExhausted,
    Plan,
    PlanCheck,
    PreconditionViolated,
    SearchBudget,
    Unsolvable,
    apply,
    solve,
    validate_plan,
)
from .task import DEFAULT_ACTION_CAP, GroundAction, GroundingError, GroundTask, ground

_STEP = re.compile(r"^\s*(?:\d+(?:\.\d+)?\s*:\s*)?\(([^()]*)\)")


def parse_plan(text: str, t: GroundTask) -> Plan:
    """Read an IPC-style plan (one ``(name args)`` per line, ``;`` comments)."""
    steps = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split(";", 1)[0].strip()
        if not body:
            continue
        m = _STEP.match(body)
        if m is None:
            raise ValueError(f"line {lineno}: not a plan step: {line!r}")
        label = "(" + " ".join(m.group(1).lower().split()) + ")"
        if label not in t.action_index:
            raise ValueError(f"line {lineno}: unknown ground action {label}")
        steps.append(t.actions[t.action_index[label]])
    return Plan(tuple(steps))


__all__ = [
    "DEFAULT_ACTION_CAP",
    "BudgetExhausted",
    "GroundAction",
    "GroundTask",
    "GroundingError",
    "Plan",
    "PlanCheck",
    "PreconditionViolated",
    "SearchBudget",
    "Unsolvable",
    "apply",
    "ground",
    "parse_plan",
    "solve",
    "validate_plan",
]
