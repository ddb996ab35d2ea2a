"""The three-stage image-to-problem flow."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..domains import DomainId, StateError, parse_state_format, serialize_state_format
from ..pddl import PddlError, PddlProblem, parse_problem, render_problem, strip_markup
from ..scenario import Scenario
from ..vlm import AdapterError, ChatResponse, OracleContext, build_prompt, template_hash
from .shoebox import reconcile_objects

GOAL_MODES = ("image", "text")


class PipelineError(Exception):
    """A precondition or infrastructure failure that aborts a run."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


class StageFailure(Exception):
    """A stage whose output could not be parsed, even after the repair round-trip."""

    def __init__(self, code: str, reason: str, message: str, raw: str, calls: list[ChatResponse]):
        self.code = code
        self.reason = reason
        self.raw = raw
        self.calls = calls
        super().__init__(f"{code}: {message}")


@dataclass(frozen=True)
class GoalInput:
    image: bytes | None = None
    text: str | None = None

    def __post_init__(self):
        if (self.image is None) == (self.text is None):
            raise ValueError("GoalInput holds exactly one of image or text")


@dataclass
class StageRecord:
    raw: str
    calls: int
    latency: float
    prompt_tokens: int
    completion_tokens: int
    error: str | None = None

    @classmethod
    def of(cls, raw: str, calls: list[ChatResponse], error: str | None = None) -> StageRecord:
        return cls(raw, len(calls), sum(c.latency for c in calls), sum(c.prompt_tokens for c in calls),
                   sum(c.completion_tokens for c in calls), error)


@dataclass
class PipelineResult:
    scenario_id: str
    domain: DomainId
    difficulty: str
    goal_mode: str
    adapter: str
    template_hash: str
    stages: dict[int, StageRecord] = field(default_factory=dict)
    parsed_init: object = None
    parsed_goal: object = None
    problem: PddlProblem | None = None
    fault: str | None = None

    @property
    def stage1_text(self) -> str | None:
        return self.stages[1].raw if 1 in self.stages else None

    @property
    def stage2_text(self) -> str | None:
        return self.stages[2].raw if 2 in self.stages else None

    @property
    def stage3_text(self) -> str | None:
        return self.stages[3].raw if 3 in self.stages else None

    @property
    def adapter_calls(self) -> int:
        return sum(r.calls for r in self.stages.values())

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "domain": self.domain.value,
            "difficulty": self.difficulty,
            "goal_mode": self.goal_mode,
            "adapter": self.adapter,
            "template_hash": self.template_hash,
            "fault": self.fault,
            "stages": {str(k): vars(v) for k, v in sorted(self.stages.items())},
            "parsed_init": serialize_state_format(self.parsed_init) if self.parsed_init is not None else None,
            "parsed_goal": serialize_state_format(self.parsed_goal) if self.parsed_goal is not None else None,
            "problem": render_problem(self.problem) if self.problem is not None else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> PipelineResult:
        domain = DomainId(data["domain"])
        r = cls(data["scenario_id"], domain, data["difficulty"], data["goal_mode"], data["adapter"],
                data["template_hash"], fault=data.get("fault"))
        r.stages = {int(k): StageRecord(**v) for k, v in data["stages"].items()}
        if data.get("parsed_init") is not None:
            r.parsed_init = parse_state_format(domain, data["parsed_init"])
        if data.get("parsed_goal") is not None:
            r.parsed_goal = parse_state_format(domain, data["parsed_goal"])
        if data.get("problem") is not None:
            r.problem = parse_problem(data["problem"])
        return r


def _ask(adapter, calls: list[ChatResponse], **prompt) -> str:
    req = build_prompt(**prompt)
    resp = adapter.complete(req)
    calls.append(resp)
    return resp.text


def _state_stage(adapter, stage: int, domain: DomainId, context: OracleContext | None, **inputs):
    calls: list[ChatResponse] = []
    raw = _ask(adapter, calls, stage=stage, domain=domain, context=context, **inputs)
    try:
        return raw, parse_state_format(domain, raw), calls
    except StateError as exc:
        first = exc
    raw = _ask(adapter, calls, stage=stage, domain=domain, context=context, repair=(raw, str(first)), **inputs)
    try:
        return raw, parse_state_format(domain, raw), calls
    except StateError as exc:
        raise StageFailure("UNPARSEABLE_STATE", exc.reason, str(exc), raw, calls) from exc


def translate_initial(adapter, domain: DomainId | str, init_image: bytes, context: OracleContext | None = None):
    """Stage 1: (raw text, SceneState, responses); one repair round-trip on a parse failure."""
    return _state_stage(adapter, 1, DomainId(domain), context, image=init_image)


def translate_goal(adapter, domain: DomainId | str, goal: GoalInput, context: OracleContext | None = None):
    """Stage 2 from a goal image or a goal sentence."""
    return _state_stage(adapter, 2, DomainId(domain), context, image=goal.image, goal_text=goal.text)


def _problem_of(raw: str) -> PddlProblem:
    return parse_problem(strip_markup(raw))


def generate_problem(adapter, domain: DomainId | str, init, goal, name: str = "problem",
                     context: OracleContext | None = None):
    """Stage 3: (raw text, PddlProblem, responses).

    init and goal are scene states, or raw stage texts when an earlier stage
    could not be parsed.
    """
    domain = DomainId(domain)
    init_text = init if isinstance(init, str) else serialize_state_format(init)
    goal_text = goal if isinstance(goal, str) else serialize_state_format(goal)
    inputs = dict(stage=3, domain=domain, init_state=init_text, goal_state=goal_text, problem_name=name, context=context)
    calls: list[ChatResponse] = []
    raw = _ask(adapter, calls, **inputs)
    try:
        return raw, _problem_of(raw), calls
    except PddlError as exc:
        first = exc
    raw = _ask(adapter, calls, repair=(raw, str(first)), **inputs)
    try:
        return raw, _problem_of(raw), calls
    except PddlError as exc:
        raise StageFailure("UNPARSEABLE_PROBLEM", exc.code, str(exc), raw, calls) from exc


def _image(s: Scenario, which: str) -> bytes:
    name = getattr(s, f"{which}_image")
    if name is None:
        raise PipelineError(f"MISSING_{which.upper()}_IMAGE", f"scenario {s.id} has no {which} image")
    path = Path(s.base_dir or ".") / name
    try:
        return path.read_bytes()
    except OSError as exc:
        raise PipelineError("IO", f"cannot read {path}: {exc}") from exc


def run(adapter, scenario: Scenario, goal_mode: str, fault: str | None = None) -> PipelineResult:
    """Run all three stages; parse failures are recorded, not raised."""
    if goal_mode not in GOAL_MODES:
        raise PipelineError("BAD_GOAL_MODE", f"goal mode must be one of {GOAL_MODES}")
    init_image = _image(scenario, "init")
    goal = GoalInput(image=_image(scenario, "goal")) if goal_mode == "image" else GoalInput(text=scenario.goal_text)
    domain = scenario.domain
    ctx = OracleContext(scenario.id, domain.value, scenario.init, scenario.goal, goal_text=scenario.goal_text)
    result = PipelineResult(scenario.id, domain, scenario.difficulty.value, goal_mode, adapter.name, template_hash(),
                            fault=fault)

    def stage(fn, *args):
        try:
            raw, state, calls = fn(adapter, domain, *args, ctx)
            return raw, state, StageRecord.of(raw, calls)
        except StageFailure as exc:
            return exc.raw, None, StageRecord.of(exc.raw, exc.calls, f"{exc.code}:{exc.reason}")

    try:
        # Stages 1 and 2 are independent; the second never sees the first's output.
        with ThreadPoolExecutor(max_workers=2) as pool:
            f1 = pool.submit(stage, translate_initial, init_image)
            f2 = pool.submit(stage, translate_goal, goal)
            raw1, init, result.stages[1] = f1.result()
            raw2, goal_state, result.stages[2] = f2.result()
    except AdapterError as exc:
        raise PipelineError(exc.code, str(exc)) from exc
    if domain is DomainId.SHOEBOX and init is not None and goal_state is not None:
        init = reconcile_objects(init, goal_state)
    result.parsed_init, result.parsed_goal = init, goal_state
    ctx3 = OracleContext(scenario.id, domain.value, scenario.init, scenario.goal, init, goal_state, scenario.goal_text)
    try:
        raw3, problem, calls = generate_problem(adapter, domain, init if init is not None else raw1,
                                                goal_state if goal_state is not None else raw2, scenario.id, ctx3)
        result.stages[3] = StageRecord.of(raw3, calls)
        result.problem = problem
    except StageFailure as exc:
        result.stages[3] = StageRecord.of(exc.raw, exc.calls, f"{exc.code}:{exc.reason}")
    except AdapterError as exc:
        raise PipelineError(exc.code, str(exc)) from exc
    return result


def run_batch(adapter, scenarios: list[Scenario], goal_mode: str, parallel: int = 1,
              fault: str | None = None) -> list[PipelineResult]:
    """Run scenarios concurrently; results keep the input order."""
    if parallel <= 1:
        return [run(adapter, s, goal_mode, fault) for s in scenarios]
    with ThreadPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(lambda s: run(adapter, s, goal_mode, fault), scenarios))


def write_results(out_dir: Path, results: list[PipelineResult], metadata: dict) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for r in results:
        d = out / r.goal_mode
        d.mkdir(exist_ok=True)
        (d / f"{r.scenario_id}.json").write_text(json.dumps(r.to_dict(), indent=2, sort_keys=True) + "\n",
                                                encoding="utf-8")
    (out / "run.json").write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def load_results(run_dir: Path) -> tuple[dict, list[PipelineResult]]:
    run_dir = Path(run_dir)
    meta_path = run_dir / "run.json"
    if not meta_path.exists():
        raise PipelineError("IO", f"{meta_path} not found")
    metadata = json.loads(meta_path.read_text(encoding="utf-8"))
    results = []
    for mode in GOAL_MODES:
        for path in sorted((run_dir / mode).glob("*.json")):
            results.append(PipelineResult.from_dict(json.loads(path.read_text(encoding="utf-8"))))
    return metadata, results
