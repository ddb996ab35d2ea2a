"""Grounding of a (domain, problem) pair into a propositional STRIPS task."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ..pddl import Atom, PddlDomain, PddlProblem, validate_problem
from ..pddl.diagnostics import Issue

DEFAULT_ACTION_CAP = 2_000_000


class GroundingError(Exception):
    def __init__(self, code: str, message: str, issues: tuple[Issue, ...] = ()):
        self.code = code
        self.issues = issues
        super().__init__(f"{code}: {message}")


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    pre: int
    add: int
    dele: int

    @property
    def label(self) -> str:
        return "(" + " ".join((self.name, *self.args)) + ")"


@dataclass(frozen=True)
class GroundTask:
    """Atoms are indexed in sorted order; states are int bitsets over them."""

    atoms: tuple[Atom, ...]
    init: int
    goal: int
    actions: tuple[GroundAction, ...]
    static_atoms: int = 0

    @cached_property
    def atom_index(self) -> dict[Atom, int]:
        return {a: i for i, a in enumerate(self.atoms)}

    @cached_property
    def action_index(self) -> dict[str, int]:
        return {a.label: i for i, a in enumerate(self.actions)}

    @property
    def universe(self) -> int:
        return (1 << len(self.atoms)) - 1

    def state_of(self, atoms) -> int:
        idx = self.atom_index
        s = 0
        for a in atoms:
            s |= 1 << idx[a]
        return s

    def atoms_of(self, state: int) -> frozenset[Atom]:
        out = []
        i = 0
        while state:
            if state & 1:
                out.append(self.atoms[i])
            state >>= 1
            i += 1
        return frozenset(out)


def _substitute(atom: Atom, binding: dict[str, str]) -> Atom:
    return Atom(atom.predicate, tuple(binding.get(a, a) for a in atom.args))


def ground(d: PddlDomain, p: PddlProblem, max_actions: int = DEFAULT_ACTION_CAP) -> GroundTask:
    """Instantiate every action schema over type-compatible objects.

    Instantiations whose static preconditions are false in init, or whose add
    and delete lists overlap, are dropped.
    """
    report = validate_problem(d, p)
    if not report.ok:
        raise GroundingError("INVALID_TASK", "problem does not validate against domain", report.errors)

    fluent = {a.predicate for act in d.actions for a in (*act.add, *act.delete)}
    init_keys = {a.key for a in p.init}
    objects_by_type: dict[str, list[str]] = {}
    for name, otype in p.objects:
        for t in d.ancestors(otype):
            objects_by_type.setdefault(t, []).append(name)
    for names in objects_by_type.values():
        names.sort()

    ground_actions: list[tuple[str, tuple[str, ...], list[Atom], list[Atom], list[Atom]]] = []
    for schema in sorted(d.actions, key=lambda a: a.name):
        variables = [v for v, _ in schema.params]
        domains = [objects_by_type.get(t, []) for _, t in schema.params]
        statics = [a for a in schema.precondition if a.predicate not in fluent]
        if any(not a.args and a.key not in init_keys for a in statics):
            continue
        # Each static precondition is checked as soon as its last variable is bound.
        checks: list[list[Atom]] = [[] for _ in variables]
        for atom in statics:
            if atom.args:
                checks[max(variables.index(a) for a in atom.args)].append(atom)
        binding: dict[str, str] = {}

        def extend(i: int) -> None:
            if i == len(variables):
                pre = [_substitute(a, binding) for a in schema.precondition]
                add = [_substitute(a, binding) for a in schema.add]
                dele = [_substitute(a, binding) for a in schema.delete]
                if {a.key for a in add} & {a.key for a in dele}:
                    return
                ground_actions.append((schema.name, tuple(binding[v] for v in variables), pre, add, dele))
                if len(ground_actions) > max_actions:
                    raise GroundingError("GROUNDING_EXPLOSION", f"more than {max_actions} ground actions")
                return
            var = variables[i]
            for obj in domains[i]:
                binding[var] = obj
                if all(_substitute(a, binding).key in init_keys for a in checks[i]):
                    extend(i + 1)
            binding.pop(var, None)

        extend(0)

    atom_set = {a for a in p.init} | set(p.goal)
    for _, _, pre, add, dele in ground_actions:
        atom_set.update(pre)
        atom_set.update(add)
        atom_set.update(dele)
    atoms = tuple(sorted((Atom(a.predicate, a.args) for a in atom_set), key=lambda a: a.key))
    index = {a: i for i, a in enumerate(atoms)}

    def mask(items) -> int:
        m = 0
        for a in items:
            m |= 1 << index[a]
        return m

    actions = tuple(
        GroundAction(name, args, mask(pre), mask(add), mask(dele))
        for name, args, pre, add, dele in sorted(ground_actions, key=lambda g: (g[0], g[1]))
    )
    changed = 0
    for act in actions:
        changed |= act.add | act.dele
    universe = (1 << len(atoms)) - 1
    return GroundTask(atoms, mask(p.init), mask(p.goal), actions, universe & ~changed)


__all__ = ["DEFAULT_ACTION_CAP", "GroundAction", "GroundTask", "GroundingError", "ground"]
