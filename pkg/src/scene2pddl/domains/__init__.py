"""The closed set of planning domains and their scene-state codecs."""

from __future__ import annotations

from typing import Iterable, Union

from ..pddl import Atom, PddlProblem
from . import blocksworld, kitchen, shoebox, sliding_tile
from .base import (
    DomainId,
    DomainModel,
    InconsistentState,
    MissingAtoms,
    StateError,
    UniverseMismatch,
    UnparseableState,
)
from .blocksworld import COLORS, BlocksState
from .kitchen import CATALOG, ITEM_TYPES, LOCATIONS, KitchenItem, KitchenState
from .shoebox import KINDS, ShoeboxElement, ShoeboxState
from .sliding_tile import TileState

SceneState = Union[BlocksState, TileState, KitchenState, ShoeboxState]

MODELS: dict[DomainId, DomainModel] = {
    DomainId.BLOCKSWORLD: blocksworld.MODEL,
    DomainId.SLIDING_TILE: sliding_tile.MODEL,
    DomainId.KITCHEN: kitchen.MODEL,
    DomainId.SHOEBOX: shoebox.MODEL,
}


def model(domain: DomainId | str) -> DomainModel:
    return MODELS[DomainId(domain)]


def model_for_pddl_name(name: str) -> DomainModel | None:
    return next((m for m in MODELS.values() if m.domain.name == name), None)


def to_predicates(s: SceneState) -> frozenset[Atom]:
    return model(s.domain).to_predicates(s)


def from_predicates(domain: DomainId | str, atoms: Iterable[Atom], objects: dict[str, str] | None = None) -> SceneState:
    return model(domain).from_predicates(atoms, objects)


def parse_state_format(domain: DomainId | str, text: str) -> SceneState:
    return model(domain).parse(text)


def serialize_state_format(s: SceneState) -> str:
    return model(s.domain).serialize(s)


def is_solvable(init: SceneState, goal: SceneState) -> bool:
    if init.domain != goal.domain:
        raise UniverseMismatch(f"states belong to {init.domain} and {goal.domain}")
    return model(init.domain).is_solvable(init, goal)


def build_problem(init: SceneState, goal: SceneState, name: str) -> PddlProblem:
    """The ground-truth PDDL problem for an (init, goal) pair."""
    return model(init.domain).build_problem(init, goal, name)


def state_to_json(s: SceneState) -> dict:
    return {"domain": s.domain.value, "state": serialize_state_format(s)}


def state_from_json(data: dict) -> SceneState:
    return parse_state_format(data["domain"], data["state"])


__all__ = [
    "CATALOG",
    "COLORS",
    "ITEM_TYPES",
    "KINDS",
    "LOCATIONS",
    "MODELS",
    "BlocksState",
    "DomainId",
    "DomainModel",
    "InconsistentState",
    "KitchenItem",
    "KitchenState",
    "MissingAtoms",
    "SceneState",
    "ShoeboxElement",
    "ShoeboxState",
    "StateError",
    "TileState",
    "UniverseMismatch",
    "UnparseableState",
    "build_problem",
    "from_predicates",
    "is_solvable",
    "model",
    "model_for_pddl_name",
    "parse_state_format",
    "serialize_state_format",
    "state_from_json",
    "state_to_json",
]
