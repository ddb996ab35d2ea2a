"""Blocksworld: stacks of color-named blocks on a table, one arm."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import ClassVar, Iterable

from ..pddl import Atom
from .base import (
    NAME,
    DomainId,
    DomainModel,
    InconsistentState,
    MissingAtoms,
    UniverseMismatch,
    UnparseableState,
    atoms_by_predicate,
    candidate_block,
    expect_arity,
)

COLORS = ("red", "blue", "green", "yellow", "orange", "purple", "cyan")

_LINE = re.compile(r"^(stack|arm)\s*:")
_NAME = re.compile(NAME + "$")


@dataclass(frozen=True)
class BlocksState:
    """Stacks listed bottom-to-top; stack order is not meaningful."""

    stacks: tuple[tuple[str, ...], ...]
    holding: str | None = None
    domain: ClassVar[DomainId] = DomainId.BLOCKSWORLD

    def __post_init__(self):
        stacks = tuple(sorted(tuple(s) for s in self.stacks if s))
        object.__setattr__(self, "stacks", stacks)
        seen = set()
        for b in (*(b for s in stacks for b in s), *([self.holding] if self.holding else [])):
            if b in seen:
                raise InconsistentState(f"block {b} appears twice", "DUPLICATE_BLOCK")
            seen.add(b)

    @property
    def blocks(self) -> tuple[str, ...]:
        names = [b for s in self.stacks for b in s]
        if self.holding:
            names.append(self.holding)
        return tuple(sorted(names))


class BlocksworldModel(DomainModel):
    id = DomainId.BLOCKSWORLD
    asset = "blocksworld.pddl"
    state_type = BlocksState

    def to_predicates(self, s: BlocksState) -> frozenset[Atom]:
        atoms = set()
        for stack in s.stacks:
            atoms.add(Atom.of("ontable", stack[0]))
            for lower, upper in zip(stack, stack[1:]):
                atoms.add(Atom.of("on", upper, lower))
            atoms.add(Atom.of("clear", stack[-1]))
        atoms.add(Atom.of("holding", s.holding) if s.holding else Atom.of("arm-empty"))
        return frozenset(atoms)

    def objects(self, s: BlocksState) -> list[tuple[str, str]]:
        return [(b, "block") for b in s.blocks]

    def goal_atoms(self, s: BlocksState) -> tuple[Atom, ...]:
        atoms = [a for a in self.to_predicates(s) if a.predicate in ("on", "ontable", "holding")]
        return tuple(sorted(atoms, key=lambda a: a.key))

    def from_predicates(self, atoms: Iterable[Atom], objects: dict[str, str] | None = None) -> BlocksState:
        by = atoms_by_predicate(atoms, ("on", "ontable", "clear", "holding", "arm-empty"))
        universe = set(objects) if objects is not None else set()
        below: dict[str, str] = {}
        above: dict[str, str] = {}
        for args in by["on"]:
            expect_arity("on", args, 2)
            x, y = args
            if x == y:
                raise InconsistentState(f"block {x} is on itself", "SELF_SUPPORT")
            if below.get(x, y) != y:
                raise InconsistentState(f"block {x} is on both {below[x]} and {y}", "ON_TWO_BLOCKS")
            if above.get(y, x) != x:
                raise InconsistentState(f"blocks {above[y]} and {x} are both on {y}", "TWO_ON_ONE")
            below[x] = y
            above[y] = x
            universe.update(args)
        table = set()
        for args in by["ontable"]:
            expect_arity("ontable", args, 1)
            (x,) = args
            if x in below:
                raise InconsistentState(f"block {x} is both on the table and on {below[x]}", "ON_TABLE_AND_BLOCK")
            table.add(x)
            universe.add(x)
        held = {args[0] for args in by["holding"] if len(args) == 1}
        if len(held) > 1:
            raise InconsistentState(f"arm holds several blocks: {sorted(held)}", "HOLDING_TWO")
        if held and by["arm-empty"]:
            raise InconsistentState("arm is both empty and holding a block", "ARM_CONFLICT")
        holding = next(iter(held), None)
        if holding is not None:
            if holding in below or holding in table or holding in above:
                raise InconsistentState(f"held block {holding} is also placed", "HELD_AND_PLACED")
            universe.add(holding)
        for args in by["clear"]:
            expect_arity("clear", args, 1)
            universe.add(args[0])
        unplaced = sorted(b for b in universe if b not in below and b not in table and b != holding)
        if unplaced:
            raise MissingAtoms(f"no position for block(s) {', '.join(unplaced)}", "UNPOSITIONED_BLOCK")
        stacks = []
        for bottom in sorted(table):
            stack = [bottom]
            while stack[-1] in above:
                stack.append(above[stack[-1]])
            stacks.append(tuple(stack))
        placed = {b for s in stacks for b in s}
        floating = sorted(b for b in below if b not in placed)
        if floating:
            raise InconsistentState(f"block(s) {', '.join(floating)} are not supported by the table", "CYCLE")
        for args in by["clear"]:
            x = args[0]
            if x in above or x == holding:
                raise InconsistentState(f"block {x} is marked clear but is covered or held", "CLEAR_CONFLICT")
        return BlocksState(tuple(stacks), holding)

    def serialize(self, s: BlocksState) -> str:
        lines = ["stack: " + " ".join(stack) for stack in s.stacks]
        lines.append(f"arm: holding {s.holding}" if s.holding else "arm: empty")
        return "\n".join(lines) + "\n"

    def parse(self, text: str) -> BlocksState:
        block = candidate_block(text, lambda line: bool(_LINE.match(line)))
        stacks = []
        holding = None
        for line in block:
            key, _, rest = line.partition(":")
            tokens = rest.replace(",", " ").split()
            if key.strip() == "stack":
                if not tokens:
                    raise UnparseableState("empty stack line", line=line)
                for tok in tokens:
                    if not _NAME.match(tok):
                        raise UnparseableState(f"bad block name {tok!r}", line=line)
                stacks.append(tuple(tokens))
            elif tokens == ["empty"]:
                holding = None
            elif len(tokens) == 2 and tokens[0] == "holding" and _NAME.match(tokens[1]):
                holding = tokens[1]
            else:
                raise UnparseableState(f"bad arm description {rest.strip()!r}", line=line)
        if not stacks and holding is None:
            raise UnparseableState("state lists no blocks")
        try:
            return BlocksState(tuple(stacks), holding)
        except InconsistentState as exc:
            raise UnparseableState(str(exc)) from exc

    def is_solvable(self, init: BlocksState, goal: BlocksState) -> bool:
        if init.blocks != goal.blocks:
            raise UniverseMismatch(f"blocks differ: {init.blocks} vs {goal.blocks}")
        return True


MODEL = BlocksworldModel()
