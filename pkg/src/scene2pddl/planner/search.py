"""A* over bitset states with the goal-count heuristic."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

from .task import GroundAction, GroundTask


class PreconditionViolated(Exception):
    code = "PRECONDITION_VIOLATED"

    def __init__(self, action: GroundAction, missing: int):
        self.action = action
        self.missing = missing
        super().__init__(f"{self.code}: {action.label} is not applicable")


@dataclass(frozen=True)
class SearchBudget:
    max_expanded_nodes: int = 5_000_000
    max_wall_time: float = 30.0

    def __post_init__(self):
        if self.max_expanded_nodes <= 0 or self.max_wall_time <= 0:
            raise ValueError("search budget limits must be positive")


@dataclass(frozen=True)
class Plan:
    steps: tuple[GroundAction, ...] = ()
    expanded: int = 0

    def __len__(self) -> int:
        return len(self.steps)

    def to_ipc(self) -> str:
        return "".join(a.label + "\n" for a in self.steps)


@dataclass(frozen=True)
class Unsolvable:
    expanded: int


@dataclass(frozen=True)
class BudgetExhausted:
    expanded: int
    reason: str


@dataclass(frozen=True)
class PlanCheck:
    ok: bool
    failed_step: int | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def apply(state: int, a: GroundAction) -> int:
    if state & a.pre != a.pre:
        raise PreconditionViolated(a, a.pre & ~state)
    return (state & ~a.dele) | a.add


def validate_plan(t: GroundTask, plan: Plan) -> PlanCheck:
    state = t.init
    for i, a in enumerate(plan.steps):
        try:
            state = apply(state, a)
        except PreconditionViolated as exc:
            missing = ", ".join(str(x) for x in sorted(t.atoms_of(exc.missing), key=lambda x: x.key))
            return PlanCheck(False, i, f"step {i} {a.label}: unsatisfied precondition {missing}")
    if state & t.goal != t.goal:
        missing = ", ".join(str(x) for x in sorted(t.atoms_of(t.goal & ~state), key=lambda x: x.key))
        return PlanCheck(False, len(plan.steps), f"goal not reached: missing {missing}")
    return PlanCheck(True)


def _successor_table(t: GroundTask):
    """Index each action under its most selective non-static precondition.

    Returns (always, table, key_mask): ``always`` lists actions with no
    fluent precondition, ``table`` maps a single-bit mask to action rows.
    """
    fluent = t.universe & ~t.static_atoms
    counts: dict[int, int] = {}
    for a in t.actions:
        bits = a.pre & fluent
        while bits:
            low = bits & -bits
            counts[low] = counts.get(low, 0) + 1
            bits ^= low
    always: list[tuple] = []
    table: dict[int, list[tuple]] = {}
    for i, a in enumerate(t.actions):
        row = (i, a.pre, ~a.dele, a.add)
        bits = a.pre & fluent
        if not bits:
            always.append(row)
            continue
        best = None
        while bits:
            low = bits & -bits
            if best is None or counts[low] < counts[best]:
                best = low
            bits ^= low
        table.setdefault(best, []).append(row)
    key_mask = 0
    for k in table:
        key_mask |= k
    return always, table, key_mask


def solve(t: GroundTask, b: SearchBudget | None = None) -> Plan | Unsolvable | BudgetExhausted:
    """A* with f = g + unsatisfied goal atoms.

    Ties on f are broken FIFO; successors are generated in ascending action
    index, so the result is a pure function of the task (up to wall time).
    """
    b = b or SearchBudget()
    goal = t.goal
    if t.init & goal == goal:
        return Plan((), 0)
    always, table, key_mask = _successor_table(t)
    deadline = time.monotonic() + b.max_wall_time
    init = t.init
    g_best = {init: 0}
    parent: dict[int, tuple[int, int]] = {}
    counter = 0
    heap = [((goal & ~init).bit_count(), 0, 0, init)]
    expanded = 0
    push, pop = heapq.heappush, heapq.heappop
    while heap:
        _, _, g, s = pop(heap)
        if g > g_best[s]:
            continue
        if s & goal == goal:
            steps = []
            while s != init:
                s, i = parent[s]
                steps.append(t.actions[i])
            steps.reverse()
            return Plan(tuple(steps), expanded)
        expanded += 1
        if expanded > b.max_expanded_nodes:
            return BudgetExhausted(expanded - 1, "max_expanded_nodes")
        if not expanded & 1023 and time.monotonic() > deadline:
            return BudgetExhausted(expanded, "max_wall_time")
        rows = list(always)
        keys = s & key_mask
        while keys:
            low = keys & -keys
            rows.extend(table[low])
            keys ^= low
        rows.sort()
        ng = g + 1
        for i, pre, keep, add in rows:
            if s & pre == pre:
                n = (s & keep) | add
                old = g_best.get(n)
                if old is None or ng < old:
                    g_best[n] = ng
                    parent[n] = (s, i)
                    counter += 1
                    push(heap, (ng + (goal & ~n).bit_count(), counter, ng, n))
    return Unsolvable(expanded)
