"""Deterministic corruptions of oracle output, for exercising the evaluator."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from ..domains import (
    BlocksState,
    DomainId,
    KitchenState,
    ShoeboxState,
    TileState,
    serialize_state_format,
)
from ..domains.kitchen import CATALOG, catalog_item
from ..pddl import Atom, PddlProblem

# kind -> (domain it applies to or None for any, default stages)
KINDS: dict[str, tuple[DomainId | None, frozenset[int]]] = {
    "drop_item": (DomainId.KITCHEN, frozenset({1, 2})),
    "stove_as_item": (DomainId.KITCHEN, frozenset({2, 3})),
    "relabel": (DomainId.KITCHEN, frozenset({1, 2})),
    "misclassify": (DomainId.KITCHEN, frozenset({1, 2})),
    "misplace": (DomainId.KITCHEN, frozenset({1})),
    "swap_stack_order": (DomainId.BLOCKSWORLD, frozenset({2})),
    "swap_tiles": (DomainId.SLIDING_TILE, frozenset({1})),
    "drop_element": (DomainId.SHOEBOX, frozenset({1})),
    "fence": (None, frozenset({3})),
    "prose_only": (None, frozenset({1, 2, 3})),
}
# Kitchen error categories name the fault that produces them.
ALIASES = {
    "missing_item": "drop_item",
    "stove_error": "stove_as_item",
    "wrong_detail": "relabel",
    "wrong_item": "misclassify",
    "wrong_location": "misplace",
}
PROSE = "I studied the picture carefully. It shows several objects arranged in a scene, as described in the task."

_SPEC = re.compile(r"^\s*([a-z_]+)\s*(?:\(([^)]*)\))?\s*(?:@([123,]+))?\s*(?::\s*([0-9.]+))?\s*$")


class FaultSpecError(ValueError):
    pass


@dataclass(frozen=True)
class FaultSpec:
    kind: str
    arg: str | None = None
    rate: float = 1.0
    stages: frozenset[int] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FaultSpecError(f"unknown fault kind {self.kind!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise FaultSpecError(f"fault rate {self.rate} outside [0, 1]")

    @property
    def domain(self) -> DomainId | None:
        return KINDS[self.kind][0]

    @property
    def active_stages(self) -> frozenset[int]:
        return self.stages if self.stages is not None else KINDS[self.kind][1]

    def __str__(self) -> str:
        text = self.kind + (f"({self.arg})" if self.arg else "")
        if self.stages is not None:
            text += "@" + ",".join(str(s) for s in sorted(self.stages))
        return text + (f":{self.rate:g}" if self.rate != 1.0 else "")


def parse_fault(text: str) -> FaultSpec:
    """Read "kind", "kind(arg)", "kind@1,2" or "kind:rate" (and combinations)."""
    m = _SPEC.match(text.lower())
    if m is None:
        raise FaultSpecError(f"cannot read fault spec {text!r}")
    kind, arg, stages, rate = m.groups()
    kind = ALIASES.get(kind, kind)
    try:
        rate_value = float(rate) if rate is not None else 1.0
    except ValueError as exc:
        raise FaultSpecError(f"bad fault rate {rate!r}") from exc
    stage_set = frozenset(int(s) for s in stages.split(",") if s) if stages else None
    return FaultSpec(kind, (arg or "").strip() or None, rate_value, stage_set)


class Fault:
    """A FaultSpec bound to a seed; decisions depend only on (seed, scenario id)."""

    def __init__(self, spec: FaultSpec, seed: int = 0):
        self.spec = spec
        self.seed = seed

    def _rng(self, scenario_id: str, purpose: str) -> random.Random:
        return random.Random(f"{self.seed}:{scenario_id}:{self.spec.kind}:{purpose}")

    def applies(self, domain: DomainId | str, scenario_id: str) -> bool:
        if self.spec.domain is not None and self.spec.domain != DomainId(domain):
            return False
        return self.spec.rate >= 1.0 or self._rng(scenario_id, "rate").random() < self.spec.rate

    def hits(self, stage: int, domain: DomainId | str, scenario_id: str) -> bool:
        return stage in self.spec.active_stages and self.applies(domain, scenario_id)

    # stage 1/2: state text

    def state_text(self, stage: int, state, scenario_id: str) -> str:
        if not self.hits(stage, state.domain, scenario_id):
            return serialize_state_format(state)
        kind = self.spec.kind
        if kind == "prose_only":
            return PROSE
        if kind == "stove_as_item":
            return serialize_state_format(state) + f"stove (item) at {self._stove_spot(state)}\n"
        rng = self._rng(scenario_id, "target")
        return serialize_state_format(getattr(self, f"_{kind}")(state, rng))

    def problem(self, p: PddlProblem, scenario_id: str, domain: DomainId | str, goal_state=None) -> PddlProblem:
        if not self.hits(3, domain, scenario_id) or self.spec.kind != "stove_as_item":
            return p
        spot = self._stove_spot(goal_state) if goal_state is not None else "counter"
        goal = tuple(sorted(set(p.goal) | {Atom.of("at", "stove", spot)}, key=lambda a: a.key))
        return PddlProblem(p.name, p.domain_name, p.objects, p.init, goal)

    def problem_text(self, text: str, scenario_id: str, domain: DomainId | str) -> str:
        if not self.hits(3, domain, scenario_id):
            return text
        if self.spec.kind == "fence":
            return f"Here is the problem:\n```pddl\n{text.rstrip()}\n```\n"
        if self.spec.kind == "prose_only":
            return PROSE
        return text

    @staticmethod
    def _stove_spot(state) -> str:
        free = state.free_locations if isinstance(state, KitchenState) else ()
        return free[0] if free else "counter"

    # per-kind state corruptions

    def _target(self, state: KitchenState, rng: random.Random) -> str | None:
        names = [it.name for it in state.items]
        if self.spec.arg and "->" not in self.spec.arg and ">" not in self.spec.arg:
            return self.spec.arg if self.spec.arg in names else None
        return rng.choice(names) if names else None

    def _drop_item(self, s: KitchenState, rng: random.Random) -> KitchenState:
        target = self._target(s, rng)
        return KitchenState(tuple(it for it in s.items if it.name != target))

    def _relabel(self, s: KitchenState, rng: random.Random) -> KitchenState:
        present = {it.name for it in s.items}
        if self.spec.arg:
            src, _, dst = self.spec.arg.replace("->", ">").partition(">")
            pairs = [(src.strip(), dst.strip())] if src.strip() in present and dst.strip() not in present else []
        else:
            pairs = [
                (it.name, other)
                for it in s.items
                for other in sorted(CATALOG)
                if other != it.name and other not in present and CATALOG[other][0] == it.type
            ]
        if not pairs:
            return s
        src, dst = rng.choice(pairs)
        return KitchenState(tuple(catalog_item(dst, it.location) if it.name == src else it for it in s.items))

    def _misclassify(self, s: KitchenState, rng: random.Random) -> KitchenState:
        target = self._target(s, rng)
        it = s.item(target) if target else None
        if it is None:
            return s
        present = {x.name for x in s.items}
        options = [n for n in sorted(CATALOG) if CATALOG[n][0] != it.type and n not in present]
        repl = rng.choice(options)
        return KitchenState(tuple(catalog_item(repl, x.location) if x.name == target else x for x in s.items))

    def _misplace(self, s: KitchenState, rng: random.Random) -> KitchenState:
        target = self._target(s, rng)
        if target is None or not s.free_locations:
            return s
        return s.moved(target, rng.choice(s.free_locations))

    def _swap_stack_order(self, s: BlocksState, rng: random.Random) -> BlocksState:
        tallest = max(s.stacks, key=len, default=())
        if len(tallest) < 2:
            return s
        stacks = [st for st in s.stacks if st != tallest] + [tuple(reversed(tallest))]
        return BlocksState(tuple(stacks), s.holding)

    def _swap_tiles(self, s: TileState, rng: random.Random) -> TileState:
        a, b = rng.sample(range(1, s.n_tiles + 1), 2)
        cells = tuple(b if v == a else a if v == b else v for v in s.cells)
        return TileState(s.width, s.height, cells)

    def _drop_element(self, s: ShoeboxState, rng: random.Random) -> ShoeboxState:
        if not s.elements:
            return s
        target = self.spec.arg or rng.choice(s.elements).name
        return ShoeboxState(tuple(e for e in s.elements if e.name != target), s.locations)
