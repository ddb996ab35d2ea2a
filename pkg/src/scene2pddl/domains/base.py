"""Shared pieces of the domain models: ids, state errors, model protocol."""

from __future__ import annotations

import re
from enum import Enum
from functools import cached_property
from importlib import resources
from typing import Callable, Iterable

from ..pddl import Atom, PddlDomain, PddlProblem, parse_domain

NAME = r"[a-z][a-z0-9_\-]*"


class DomainId(str, Enum):
    BLOCKSWORLD = "blocksworld"
    SLIDING_TILE = "sliding_tile"
    KITCHEN = "kitchen"
    SHOEBOX = "shoebox"

    def __str__(self) -> str:
        return self.value


class StateError(ValueError):
    code = "STATE_ERROR"

    def __init__(self, message: str, reason: str | None = None, line: str | None = None):
        self.reason = reason or self.code
        self.line = line
        super().__init__(f"{self.code}: {message}" + (f" (line: {line!r})" if line else ""))


class UnparseableState(StateError):
    code = "UNPARSEABLE_STATE"


class InconsistentState(StateError):
    code = "INCONSISTENT_STATE"


class MissingAtoms(StateError):
    code = "MISSING_ATOMS"


class UniverseMismatch(StateError):
    code = "UNIVERSE_MISMATCH"


_FENCE = re.compile(r"^\s*(```|~~~)")


def candidate_block(text: str, is_state_line: Callable[[str], bool]) -> list[str]:
    """Return the first run of consecutive state lines, lowercased.

    Fence lines and prose before/after the run are ignored; blank lines inside
    a run are skipped. Raises UnparseableState if no line qualifies.
    """
    block: list[str] = []
    for raw in text.lower().splitlines():
        line = raw.strip().strip("`").strip()
        if _FENCE.match(raw):
            if block:
                break
            continue
        if not line:
            continue
        if is_state_line(line):
            block.append(line)
        elif block:
            break
    if not block:
        raise UnparseableState("no state block found in text")
    return block


class DomainModel:
    """One planning domain: PDDL text, state codec and predicate mapping."""

    id: DomainId
    asset: str
    static_predicates: frozenset[str] = frozenset()

    @cached_property
    def pddl_text(self) -> str:
        return resources.files("scene2pddl.domains").joinpath("assets", self.asset).read_text(encoding="utf-8")

    @cached_property
    def domain(self) -> PddlDomain:
        return parse_domain(self.pddl_text)

    # Subclasses implement the methods below.
    def to_predicates(self, s) -> frozenset[Atom]:
        raise NotImplementedError

    def objects(self, s) -> list[tuple[str, str]]:
        raise NotImplementedError

    def goal_atoms(self, s) -> tuple[Atom, ...]:
        raise NotImplementedError

    def from_predicates(self, atoms: Iterable[Atom], objects: dict[str, str] | None = None):
        raise NotImplementedError

    def serialize(self, s) -> str:
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def is_solvable(self, init, goal) -> bool:
        raise NotImplementedError

    def build_problem(self, init, goal, name: str) -> PddlProblem:
        objects = dict(self.objects(init))
        objects.update(self.objects(goal))
        return PddlProblem(name, self.domain.name, tuple(objects.items()), self.to_predicates(init), self.goal_atoms(goal))


def atoms_by_predicate(atoms: Iterable[Atom], allowed: Iterable[str]) -> dict[str, list[tuple[str, ...]]]:
    allowed = set(allowed)
    out: dict[str, list[tuple[str, ...]]] = {p: [] for p in allowed}
    for a in atoms:
        pred = a.predicate.lower()
        if pred not in allowed:
            raise InconsistentState(f"predicate {pred} does not belong to this domain", "FOREIGN_PREDICATE")
        out[pred].append(tuple(x.lower() for x in a.args))
    return out


def expect_arity(pred: str, args: tuple[str, ...], n: int) -> None:
    if len(args) != n:
        raise InconsistentState(f"{pred} takes {n} argument(s), got {len(args)}", "ARITY")
