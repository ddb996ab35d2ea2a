"""Scenario generation, rendering and dataset persistence."""

from .dataset import (
    generate_dataset,
    ingest_kitchen,
    load_dataset,
    load_scenario,
    scenario_to_dict,
    write_dataset,
    write_scenario,
)
from .generate import generate_scenario, generate_scenarios, generate_states, scenario_from_states, sub_seed
from .model import DatasetError, DatasetManifest, Difficulty, ManifestEntry, Scenario
from .render import RenderError, render_image, render_png
from .text import blocks_goal_from_text, goal_text_for

__all__ = [
    "DatasetError",
    "DatasetManifest",
    "Difficulty",
    "ManifestEntry",
    "RenderError",
    "Scenario",
    "blocks_goal_from_text",
    "generate_dataset",
    "generate_scenario",
    "generate_scenarios",
    "generate_states",
    "goal_text_for",
    "ingest_kitchen",
    "load_dataset",
    "load_scenario",
    "render_image",
    "render_png",
    "scenario_from_states",
    "scenario_to_dict",
    "sub_seed",
    "write_dataset",
    "write_scenario",
]
