"""Immutable AST for the STRIPS + typing subset of PDDL."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .diagnostics import Issue

ROOT_TYPE = "object"


@dataclass(frozen=True)
class Atom:
    """A predicate applied to arguments (objects, or ``?variables`` in schemas)."""

    predicate: str
    args: tuple[str, ...] = ()
    line: int | None = field(default=None, compare=False, repr=False)
    col: int | None = field(default=None, compare=False, repr=False)

    @property
    def key(self) -> tuple:
        return (self.predicate, self.args)

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate, *self.args)) + ")"

    @classmethod
    def of(cls, predicate: str, *args: str) -> Atom:
        return cls(predicate, tuple(args))


def sorted_atoms(atoms) -> list[Atom]:
    return sorted(atoms, key=lambda a: a.key)


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    params: tuple[tuple[str, str], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[tuple[str, str], ...]
    precondition: tuple[Atom, ...]
    add: tuple[Atom, ...]
    delete: tuple[Atom, ...]


@dataclass(frozen=True)
class PddlDomain:
    name: str
    requirements: tuple[str, ...] = ()
    types: tuple[tuple[str, str], ...] = ()
    predicates: tuple[PredicateSchema, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    @cached_property
    def type_parents(self) -> dict[str, str]:
        return dict(self.types)

    @cached_property
    def predicate_map(self) -> dict[str, PredicateSchema]:
        return {p.name: p for p in self.predicates}

    @cached_property
    def action_map(self) -> dict[str, ActionSchema]:
        return {a.name: a for a in self.actions}

    def has_type(self, name: str) -> bool:
        return name == ROOT_TYPE or name in self.type_parents

    def ancestors(self, name: str) -> list[str]:
        """``name`` followed by its supertypes up to ``object``."""
        chain = [name]
        seen = {name}
        while name != ROOT_TYPE:
            name = self.type_parents.get(name, ROOT_TYPE)
            if name in seen:
                break
            chain.append(name)
            seen.add(name)
        return chain

    def is_subtype(self, sub: str, sup: str) -> bool:
        return sup in self.ancestors(sub)


@dataclass(frozen=True)
class PddlProblem:
    """A problem instance. Objects are kept sorted; init is a set."""

    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...]
    init: frozenset[Atom]
    goal: tuple[Atom, ...]
    warnings: tuple[Issue, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(sorted(self.objects)))
        object.__setattr__(self, "init", frozenset(self.init))
        object.__setattr__(self, "goal", tuple(self.goal))

    @cached_property
    def object_types(self) -> dict[str, str]:
        return dict(self.objects)
