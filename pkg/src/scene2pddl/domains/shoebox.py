"""Shoebox put-in task: elements matched one-to-one with target locations."""

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

KINDS = ("ball", "card", "cube", "peg")
GENERIC_KIND = "element"

_LINE = re.compile(r"^(element|location)\s+")
_ELEMENT = re.compile(rf"^element\s+({NAME})\s*(?:\(\s*({NAME})\s*\))?\s+(?:(?:at|in)\s+({NAME})|(unplaced))\s*\.?$")
_LOCATION = re.compile(rf"^location\s+({NAME})\s*\.?$")


@dataclass(frozen=True, order=True)
class ShoeboxElement:
    name: str
    kind: str
    location: str | None = None


def kind_from_name(name: str) -> str:
    return next((k for k in KINDS if name.startswith(k)), GENERIC_KIND)


@dataclass(frozen=True)
class ShoeboxState:
    elements: tuple[ShoeboxElement, ...]
    locations: tuple[str, ...]
    domain: ClassVar[DomainId] = DomainId.SHOEBOX

    def __post_init__(self):
        elements = tuple(sorted(self.elements, key=lambda e: e.name))
        locations = tuple(sorted(set(self.locations)))
        if len(locations) != len(self.locations):
            raise InconsistentState("location listed twice", "DUPLICATE_LOCATION")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "locations", locations)
        names = set()
        used: dict[str, str] = {}
        for e in elements:
            if e.name in names:
                raise InconsistentState(f"element {e.name} listed twice", "DUPLICATE_ELEMENT")
            if e.name in locations:
                raise InconsistentState(f"{e.name} is both an element and a location", "NAME_CLASH")
            if e.kind not in KINDS and e.kind != GENERIC_KIND:
                raise InconsistentState(f"unknown element kind {e.kind}", "UNKNOWN_KIND")
            if e.location is not None:
                if e.location not in locations:
                    raise InconsistentState(f"{e.name} is at unknown location {e.location}", "UNKNOWN_LOCATION")
                if e.location in used:
                    raise InconsistentState(f"{used[e.location]} and {e.name} share {e.location}", "NOT_ONE_TO_ONE")
                used[e.location] = e.name
            names.add(e.name)

    def element(self, name: str) -> ShoeboxElement | None:
        return next((e for e in self.elements if e.name == name), None)

    @property
    def free_locations(self) -> tuple[str, ...]:
        used = {e.location for e in self.elements}
        return tuple(loc for loc in self.locations if loc not in used)


class ShoeboxModel(DomainModel):
    id = DomainId.SHOEBOX
    asset = "shoebox.pddl"
    state_type = ShoeboxState

    def to_predicates(self, s: ShoeboxState) -> frozenset[Atom]:
        atoms = set()
        for e in s.elements:
            atoms.add(Atom.of("at", e.name, e.location) if e.location else Atom.of("unplaced", e.name))
        atoms.update(Atom.of("clear", loc) for loc in s.free_locations)
        return frozenset(atoms)

    def objects(self, s: ShoeboxState) -> list[tuple[str, str]]:
        return [(e.name, e.kind) for e in s.elements] + [(loc, "location") for loc in s.locations]

    def goal_atoms(self, s: ShoeboxState) -> tuple[Atom, ...]:
        atoms = [a for a in self.to_predicates(s) if a.predicate in ("at", "unplaced")]
        return tuple(sorted(atoms, key=lambda a: a.key))

    def from_predicates(self, atoms: Iterable[Atom], objects: dict[str, str] | None = None) -> ShoeboxState:
        by = atoms_by_predicate(atoms, ("at", "clear", "unplaced"))
        kinds: dict[str, str] = {}
        locations: set[str] = set()
        if objects is not None:
            for name, otype in objects.items():
                if otype == "location":
                    locations.add(name)
                else:
                    kinds[name] = otype
        place: dict[str, str | None] = {}
        for args in by["at"]:
            expect_arity("at", args, 2)
            e, loc = args
            if e in place and place[e] != loc:
                raise InconsistentState(f"element {e} is in two places", "ELEMENT_AT_TWO_LOCATIONS")
            place[e] = loc
            locations.add(loc)
        for args in by["unplaced"]:
            expect_arity("unplaced", args, 1)
            (e,) = args
            if place.get(e) is not None:
                raise InconsistentState(f"element {e} is both placed and unplaced", "PLACED_AND_UNPLACED")
            place[e] = None
        for args in by["clear"]:
            expect_arity("clear", args, 1)
            locations.add(args[0])
        for name in kinds:
            if name not in place:
                raise MissingAtoms(f"element {name} has no position", "UNPOSITIONED_ELEMENT")
        elements = []
        for name, loc in place.items():
            kind = kinds.get(name) or kind_from_name(name)
            if kind not in KINDS and kind != GENERIC_KIND:
                raise InconsistentState(f"{name} is declared as {kind}, not an element kind", "NOT_AN_ELEMENT")
            elements.append(ShoeboxElement(name, kind, loc))
        state = ShoeboxState(tuple(elements), tuple(sorted(locations)))
        for args in by["clear"]:
            if args[0] not in state.free_locations:
                raise InconsistentState(f"{args[0]} is marked clear but is occupied", "CLEAR_CONFLICT")
        return state

    def serialize(self, s: ShoeboxState) -> str:
        lines = [f"location {loc}" for loc in s.locations]
        for e in s.elements:
            where = f"at {e.location}" if e.location else "unplaced"
            lines.append(f"element {e.name} ({e.kind}) {where}")
        return "\n".join(lines) + "\n"

    def parse(self, text: str) -> ShoeboxState:
        block = candidate_block(text, lambda line: bool(_LINE.match(line)))
        locations: list[str] = []
        elements = []
        for line in block:
            if line.startswith("location"):
                m = _LOCATION.match(line)
                if m is None:
                    raise UnparseableState("bad location line", line=line)
                locations.append(m.group(1))
                continue
            m = _ELEMENT.match(line)
            if m is None:
                raise UnparseableState("bad element line", line=line)
            name, kind, loc, _ = m.groups()
            kind = kind or kind_from_name(name)
            if kind not in KINDS and kind != GENERIC_KIND:
                raise UnparseableState(f"unknown element kind {kind!r}", line=line)
            elements.append(ShoeboxElement(name, kind, loc))
            if loc and loc not in locations:
                locations.append(loc)
        try:
            return ShoeboxState(tuple(elements), tuple(dict.fromkeys(locations)))
        except InconsistentState as exc:
            raise UnparseableState(str(exc)) from exc

    def is_solvable(self, init: ShoeboxState, goal: ShoeboxState) -> bool:
        key = lambda s: [(e.name, e.kind) for e in s.elements]  # noqa: E731
        if key(init) != key(goal) or init.locations != goal.locations:
            raise UniverseMismatch("element or location sets differ")
        return True


MODEL = ShoeboxModel()
