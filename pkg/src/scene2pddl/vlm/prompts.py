"""Stage prompt assembly from the versioned template assets."""

from __future__ import annotations

import hashlib
from functools import lru_cache
from importlib import resources
from string import Template

from ..domains import DomainId, model, serialize_state_format
from ..pddl import render_problem
from .types import ChatRequest, ImagePart, OracleContext, Part, TextPart

TITLES = {
    DomainId.BLOCKSWORLD: "Blocksworld",
    DomainId.SLIDING_TILE: "sliding-tile puzzle",
    DomainId.KITCHEN: "kitchen",
    DomainId.SHOEBOX: "shoebox put-in task",
}


class PromptError(ValueError):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


def _templates_dir():
    return resources.files("scene2pddl.vlm").joinpath("templates")


@lru_cache(maxsize=None)
def template_text(name: str) -> str:
    return _templates_dir().joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def template_hash() -> str:
    """sha256 over every template file, in name order."""
    h = hashlib.sha256()
    for entry in sorted(_templates_dir().iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".txt"):
            h.update(entry.name.encode() + b"\0" + entry.read_bytes() + b"\0")
    return h.hexdigest()


@lru_cache(maxsize=None)
def example_scenario(domain: DomainId):
    from ..scenario import generate_scenario

    return generate_scenario(domain, "easy", 0, scenario_id="example")


def media_type(data: bytes) -> str:
    if data.startswith(b"\x89PNG"):
        return "image/png"
    if data.startswith(b"\xff\xd8"):
        return "image/jpeg"
    return "application/octet-stream"


def _fill(name: str, **values: str) -> str:
    return Template(template_text(name)).substitute(**values).strip()


def build_prompt(stage: int, domain: DomainId | str, *, image: bytes | None = None, goal_text: str | None = None,
                 init_state: str | None = None, goal_state: str | None = None, problem_name: str = "problem",
                 repair: tuple[str, str] | None = None, context: OracleContext | None = None,
                 temperature: float = 0.0, max_output_tokens: int = 2048) -> ChatRequest:
    """Build the request for one stage.

    Stage 1 needs the initial image; stage 2 exactly one of goal image or
    goal text; stage 3 both state texts. repair is (previous output,
    diagnostic) for the single re-prompt after a failed parse.
    """
    domain = DomainId(domain)
    example = example_scenario(domain)
    common = {
        "domain_title": TITLES[domain],
        "format_guide": template_text(f"format_{domain.value}.txt").strip(),
        "example_init": serialize_state_format(example.init).strip(),
        "example_goal": serialize_state_format(example.goal).strip(),
    }
    parts: list[Part] = []
    if stage == 1:
        if image is None:
            raise PromptError("MISSING_INPUT", "stage 1 needs the initial-state image")
        parts = [TextPart(_fill("stage1.txt", **common)), ImagePart(image, media_type(image))]
    elif stage == 2:
        if (image is None) == (goal_text is None):
            raise PromptError("MISSING_INPUT", "stage 2 needs exactly one of a goal image or a goal text")
        if image is not None:
            parts = [TextPart(_fill("stage2_image.txt", **common)), ImagePart(image, media_type(image))]
        else:
            parts = [TextPart(_fill("stage2_text.txt", goal_text=goal_text.strip(), **common))]
    elif stage == 3:
        if init_state is None or goal_state is None:
            raise PromptError("MISSING_INPUT", "stage 3 needs both state texts")
        m = model(domain)
        text = _fill(
            "stage3.txt",
            domain_pddl=m.pddl_text.strip(),
            example_problem=render_problem(example.gt_problem).strip(),
            init_state=init_state.strip(),
            goal_state=goal_state.strip(),
            problem_name=problem_name,
        )
        parts = [TextPart(text)]
    else:
        raise PromptError("MISSING_INPUT", f"unknown stage {stage}")
    if repair is not None:
        previous, diagnostic = repair
        parts.append(TextPart(_fill("repair.txt", previous=previous.strip(), diagnostic=diagnostic.strip())))
    return ChatRequest(
        system_text=template_text("system.txt").strip(),
        user_parts=tuple(parts),
        temperature=temperature,
        max_output_tokens=max_output_tokens,
        stage=stage,
        repair=repair is not None,
        context=context,
    )
