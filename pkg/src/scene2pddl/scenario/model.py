"""Scenario and dataset value types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..domains import DomainId, SceneState
from ..pddl import PddlProblem

SCHEMA_VERSION = 1


class Difficulty(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"

    def __str__(self) -> str:
        return self.value


class DatasetError(Exception):
    def __init__(self, code: str, message: str, path: str | None = None):
        self.code = code
        self.path = path
        super().__init__(f"{code}: {message}" + (f" [{path}]" if path else ""))


@dataclass(frozen=True)
class Scenario:
    id: str
    domain: DomainId
    difficulty: Difficulty
    seed: int
    init: SceneState
    goal: SceneState
    goal_text: str
    gt_problem: PddlProblem
    init_image: str | None = None
    goal_image: str | None = None
    # Directory the image paths are relative to; not part of identity.
    base_dir: str | None = field(default=None, compare=False, repr=False)

    @property
    def rel_dir(self) -> str:
        return f"{self.domain.value}/{self.difficulty.value}/{self.id}"


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    domain: DomainId
    difficulty: Difficulty
    seed: int
    path: str


@dataclass(frozen=True)
class DatasetManifest:
    dataset_id: str
    seed: int
    entries: tuple[ManifestEntry, ...]
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "dataset_id": self.dataset_id,
            "seed": self.seed,
            "scenarios": [
                {"id": e.id, "domain": e.domain.value, "difficulty": e.difficulty.value, "seed": e.seed, "path": e.path}
                for e in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> DatasetManifest:
        entries = tuple(
            ManifestEntry(e["id"], DomainId(e["domain"]), Difficulty(e["difficulty"]), int(e["seed"]), e["path"])
            for e in data["scenarios"]
        )
        return cls(data["dataset_id"], int(data["seed"]), entries, int(data["schema_version"]))
