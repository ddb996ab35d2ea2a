"""Syntax, content and kitchen-taxonomy verdicts for generated problems."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..domains import DomainId, StateError, from_predicates, model, to_predicates
from ..domains.kitchen import ITEM_TYPES, LOCATIONS
from ..pddl import Atom, PddlDomain, PddlError, PddlProblem, parse_problem, strip_markup, validate_problem
from ..planner import GroundingError, ground
from ..scenario import Scenario


class EvalError(ValueError):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


@dataclass(frozen=True)
class SyntaxVerdict:
    ok: bool
    failure: str | None = None  # parse_error | validation_error | grounding_error
    diagnostics: tuple[str, ...] = ()
    problem: PddlProblem | None = None


def check_syntax(domain: PddlDomain, problem_text: str) -> SyntaxVerdict:
    """strip_markup, parse, validate and ground; solving is not attempted."""
    try:
        problem = parse_problem(strip_markup(problem_text or ""))
    except PddlError as exc:
        return SyntaxVerdict(False, "parse_error", tuple(i.format("problem") for i in exc.issues))
    report = validate_problem(domain, problem)
    if not report.ok:
        return SyntaxVerdict(False, "validation_error", tuple(i.format("problem") for i in report.errors), problem)
    try:
        ground(domain, problem)
    except GroundingError as exc:
        return SyntaxVerdict(False, "grounding_error", (str(exc),), problem)
    return SyntaxVerdict(True, None, tuple(i.format("problem") for i in report.issues), problem)


@dataclass(frozen=True)
class ContentVerdict:
    init_ok: bool
    goal_ok: bool
    init_missing: frozenset[str] = frozenset()
    init_extra: frozenset[str] = frozenset()
    goal_missing: frozenset[str] = frozenset()
    goal_extra: frozenset[str] = frozenset()

    @property
    def ok(self) -> bool:
        return self.init_ok and self.goal_ok


def _names(atoms) -> frozenset[str]:
    return frozenset(str(a) for a in atoms)


def _lower(atoms) -> set[Atom]:
    return {Atom(a.predicate.lower(), tuple(x.lower() for x in a.args)) for a in atoms}


def check_content(scenario: Scenario, problem: PddlProblem) -> ContentVerdict:
    """Init by exact atom-set comparison, goal by state reconstruction."""
    m = model(scenario.domain)
    static = m.static_predicates
    want_init = {a for a in to_predicates(scenario.init) if a.predicate not in static}
    got_init = {a for a in _lower(problem.init) if a.predicate not in static}
    init_missing, init_extra = want_init - got_init, got_init - want_init

    want_goal = set(m.goal_atoms(scenario.goal))
    got_goal = _lower(problem.goal)
    objects = {name.lower(): otype.lower() for name, otype in problem.objects}
    reason = None
    try:
        goal_ok = from_predicates(scenario.domain, got_goal, _goal_objects(scenario.domain, objects)) == scenario.goal
    except StateError as exc:
        goal_ok, reason = False, exc.reason
    goal_missing, goal_extra = frozenset(), frozenset()
    if not goal_ok:
        goal_missing = _names(want_goal - got_goal)
        goal_extra = _names(got_goal - want_goal)
        if not goal_missing and not goal_extra:
            # Same atoms, yet the declared objects make a different state.
            goal_extra = frozenset({f"<{reason or 'DIFFERENT_STATE'}>"})
    return ContentVerdict(
        not init_missing and not init_extra, goal_ok,
        _names(init_missing), _names(init_extra), goal_missing, goal_extra,
    )


def _goal_objects(domain: DomainId, objects: dict[str, str]) -> dict[str, str] | None:
    """Objects that the goal reconstruction must account for.

    Sliding-tile positions and kitchen locations are fixed furniture, not
    placed objects, so they are left out.
    """
    if domain is DomainId.SLIDING_TILE:
        return {k: v for k, v in objects.items() if v == "tile"}
    if domain is DomainId.KITCHEN:
        return {k: v for k, v in objects.items() if v in ITEM_TYPES}
    return objects


class KitchenErrorCategory(str, Enum):
    STOVE_ERROR = "stove_error"
    MISSING_ITEM = "missing_item"
    WRONG_ITEM = "wrong_item"
    WRONG_DETAIL = "wrong_detail"
    WRONG_LOCATION = "wrong_location"

    def __str__(self) -> str:
        return self.value


def _placements(atoms, objects: dict[str, str]) -> dict[str, tuple[str, str]]:
    """item -> (declared type, location) from the `at` atoms of one state."""
    out = {}
    for a in _lower(atoms):
        if a.predicate == "at" and len(a.args) == 2 and a.args[0] not in LOCATIONS:
            out[a.args[0]] = (objects.get(a.args[0], "item"), a.args[1])
    return out


def classify_kitchen_errors(scenario: Scenario, problem: PddlProblem) -> frozenset[KitchenErrorCategory]:
    if scenario.domain is not DomainId.KITCHEN:
        raise EvalError("NOT_KITCHEN", f"scenario {scenario.id} is a {scenario.domain.value} scenario")
    objects = {n.lower(): t.lower() for n, t in problem.objects}
    found: set[KitchenErrorCategory] = set()
    for a in _lower(problem.init) | _lower(problem.goal):
        if a.predicate == "at" and a.args and a.args[0] == "stove":
            found.add(KitchenErrorCategory.STOVE_ERROR)
    for truth, atoms in ((scenario.init, problem.init), (scenario.goal, problem.goal)):
        got = _placements(atoms, objects)
        gt_names = {it.name for it in truth.items}
        unmatched = {name: v for name, v in got.items() if name not in gt_names}
        for it in truth.items:
            if it.name in got:
                itype, loc = got[it.name]
                if itype != it.type:
                    found.add(KitchenErrorCategory.WRONG_ITEM)
                if loc != it.location:
                    found.add(KitchenErrorCategory.WRONG_LOCATION)
                continue
            stand_in = [t for t, loc in unmatched.values() if loc == it.location]
            if not stand_in:
                found.add(KitchenErrorCategory.MISSING_ITEM)
            elif it.type in stand_in:
                found.add(KitchenErrorCategory.WRONG_DETAIL)
            else:
                found.add(KitchenErrorCategory.WRONG_ITEM)
    return frozenset(found)


@dataclass(frozen=True)
class ScenarioScore:
    scenario_id: str
    domain: DomainId
    difficulty: str
    goal_mode: str
    syntax: SyntaxVerdict
    content: ContentVerdict | None
    kitchen: frozenset[KitchenErrorCategory] = frozenset()

    @property
    def syntax_error(self) -> bool:
        return not self.syntax.ok

    @property
    def content_error(self) -> bool:
        # A problem that fails the syntax check cannot represent the scene.
        return self.content is None or not self.content.ok


def score(scenario: Scenario, goal_mode: str, problem_text: str | None) -> ScenarioScore:
    syntax = check_syntax(model(scenario.domain).domain, problem_text or "")
    content = None
    kitchen: frozenset[KitchenErrorCategory] = frozenset()
    if syntax.ok:
        content = check_content(scenario, syntax.problem)
        if scenario.domain is DomainId.KITCHEN and not content.ok:
            kitchen = classify_kitchen_errors(scenario, syntax.problem)
    return ScenarioScore(scenario.id, scenario.domain, scenario.difficulty.value, goal_mode, syntax, content, kitchen)
