"""Kitchen scenes: typed items with a detail (brand/color) at fixed locations."""

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

LOCATIONS = ("counter", "shelf", "sink", "stove")
ITEM_TYPES = ("cutting_board", "fruit", "item", "kettle", "mug", "soda", "wine")

# name -> (type, detail)
CATALOG: dict[str, tuple[str, str]] = {
    "apple": ("fruit", "red"),
    "lemon": ("fruit", "yellow"),
    "cutting_board": ("cutting_board", "wooden"),
    "black_mug": ("mug", "black"),
    "green_mug": ("mug", "green"),
    "kettle": ("kettle", "silver"),
    "wine": ("wine", "red"),
    "cola": ("soda", "cola"),
    "fanta": ("soda", "fanta"),
}

_LINE = re.compile(rf"^[-*\d.\s]*({NAME})\s*\(([^)]*)\)\s*(?:at|on|in)\s+(?:the\s+)?(\S+?)\s*[.;,]?$")


@dataclass(frozen=True, order=True)
class KitchenItem:
    name: str
    type: str
    detail: str
    location: str


@dataclass(frozen=True)
class KitchenState:
    items: tuple[KitchenItem, ...]
    domain: ClassVar[DomainId] = DomainId.KITCHEN

    def __post_init__(self):
        items = tuple(sorted(self.items))
        object.__setattr__(self, "items", items)
        names = set()
        taken: dict[str, str] = {}
        for it in items:
            if it.name in LOCATIONS:
                reason = "STOVE_AS_ITEM" if it.name == "stove" else "LOCATION_AS_ITEM"
                raise InconsistentState(f"{it.name} is a location, not an item", reason)
            if it.name in names:
                raise InconsistentState(f"item {it.name} listed twice", "DUPLICATE_ITEM")
            if it.type not in ITEM_TYPES:
                raise InconsistentState(f"unknown item type {it.type}", "UNKNOWN_TYPE")
            if it.location not in LOCATIONS:
                raise InconsistentState(f"unknown location {it.location}", "UNKNOWN_LOCATION")
            if it.location in taken:
                raise InconsistentState(f"{taken[it.location]} and {it.name} share {it.location}", "LOCATION_OCCUPIED")
            names.add(it.name)
            taken[it.location] = it.name

    def item(self, name: str) -> KitchenItem | None:
        return next((it for it in self.items if it.name == name), None)

    @property
    def free_locations(self) -> tuple[str, ...]:
        used = {it.location for it in self.items}
        return tuple(loc for loc in LOCATIONS if loc not in used)

    def moved(self, name: str, location: str) -> KitchenState:
        return KitchenState(tuple(
            KitchenItem(it.name, it.type, it.detail, location) if it.name == name else it for it in self.items
        ))


def catalog_item(name: str, location: str) -> KitchenItem:
    itype, detail = CATALOG[name]
    return KitchenItem(name, itype, detail, location)


class KitchenModel(DomainModel):
    id = DomainId.KITCHEN
    asset = "kitchen.pddl"
    state_type = KitchenState

    def to_predicates(self, s: KitchenState) -> frozenset[Atom]:
        atoms = {Atom.of("at", it.name, it.location) for it in s.items}
        atoms.update(Atom.of("clear", loc) for loc in s.free_locations)
        return frozenset(atoms)

    def objects(self, s: KitchenState) -> list[tuple[str, str]]:
        return [(it.name, it.type) for it in s.items] + [(loc, "location") for loc in LOCATIONS]

    def goal_atoms(self, s: KitchenState) -> tuple[Atom, ...]:
        return tuple(sorted((Atom.of("at", it.name, it.location) for it in s.items), key=lambda a: a.key))

    def from_predicates(self, atoms: Iterable[Atom], objects: dict[str, str] | None = None) -> KitchenState:
        by = atoms_by_predicate(atoms, ("at", "clear"))
        place: dict[str, str] = {}
        for args in by["at"]:
            expect_arity("at", args, 2)
            name, loc = args
            if name in LOCATIONS:
                reason = "STOVE_AS_ITEM" if name == "stove" else "LOCATION_AS_ITEM"
                raise InconsistentState(f"location {name} used as an item", reason)
            if loc not in LOCATIONS:
                raise InconsistentState(f"{loc} is not a kitchen location", "UNKNOWN_LOCATION")
            if place.get(name, loc) != loc:
                raise InconsistentState(f"item {name} is at {place[name]} and {loc}", "ITEM_AT_TWO_LOCATIONS")
            place[name] = loc
        if objects is not None:
            for name, otype in objects.items():
                if otype in ITEM_TYPES and name not in place:
                    raise MissingAtoms(f"item {name} has no location", "UNPLACED_ITEM")
        items = []
        for name, loc in place.items():
            itype, detail = CATALOG.get(name, ("item", ""))
            if objects is not None and name in objects:
                itype = objects[name]
                if itype not in ITEM_TYPES:
                    raise InconsistentState(f"{name} is declared as {itype}, not an item type", "NOT_AN_ITEM")
            items.append(KitchenItem(name, itype, detail, loc))
        state = KitchenState(tuple(items))
        for args in by["clear"]:
            expect_arity("clear", args, 1)
            if args[0] not in state.free_locations:
                raise InconsistentState(f"{args[0]} is marked clear but is occupied or unknown", "CLEAR_CONFLICT")
        return state

    def serialize(self, s: KitchenState) -> str:
        lines = []
        for it in s.items:
            kind = f"{it.type}, {it.detail}" if it.detail else it.type
            lines.append(f"{it.name} ({kind}) at {it.location}")
        return "\n".join(lines) + "\n"

    def parse(self, text: str) -> KitchenState:
        block = candidate_block(text, lambda line: bool(_LINE.match(line)))
        items = []
        for line in block:
            name, kind, loc = _LINE.match(line).groups()
            parts = [p.strip() for p in kind.split(",")]
            itype = parts[0].replace(" ", "_")
            detail = " ".join(parts[1:]).strip().replace(" ", "_")
            if itype not in ITEM_TYPES:
                raise UnparseableState(f"unknown item type {itype!r}", line=line)
            if loc not in LOCATIONS:
                raise UnparseableState(f"unknown location {loc!r}", line=line)
            items.append(KitchenItem(name, itype, detail, loc))
        try:
            return KitchenState(tuple(items))
        except InconsistentState as exc:
            if exc.reason in ("STOVE_AS_ITEM", "LOCATION_AS_ITEM"):
                raise
            raise UnparseableState(str(exc)) from exc

    def is_solvable(self, init: KitchenState, goal: KitchenState) -> bool:
        key = lambda s: sorted((it.name, it.type, it.detail) for it in s.items)  # noqa: E731
        if key(init) != key(goal):
            raise UniverseMismatch("item sets differ")
        if init.free_locations:
            return True
        return init == goal


MODEL = KitchenModel()
