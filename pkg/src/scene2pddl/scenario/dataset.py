"""On-disk dataset layout: per-scenario directories plus a root manifest."""

from __future__ import annotations

import json
from pathlib import Path

from ..domains import DomainId, StateError, build_problem, is_solvable, parse_state_format, serialize_state_format
from ..pddl import PddlError, parse_problem, render_problem
from .generate import generate_scenarios, scenario_from_states
from .model import SCHEMA_VERSION, DatasetError, DatasetManifest, Difficulty, ManifestEntry, Scenario
from .render import render_png

MANIFEST = "manifest.json"
SCENARIO_FILE = "scenario.json"
RENDERED = (DomainId.BLOCKSWORLD, DomainId.SLIDING_TILE, DomainId.SHOEBOX)


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "id": s.id,
        "domain": s.domain.value,
        "difficulty": s.difficulty.value,
        "seed": s.seed,
        "init": serialize_state_format(s.init),
        "goal": serialize_state_format(s.goal),
        "goal_text": s.goal_text,
        "init_image": s.init_image,
        "goal_image": s.goal_image,
        "gt_problem": "problem_gt.pddl",
    }


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def write_scenario(root: Path, s: Scenario, images: dict[str, bytes] | None = None) -> Scenario:
    """Write one scenario directory; rendered domains get init.png and goal.png."""
    d = Path(root) / s.rel_dir
    d.mkdir(parents=True, exist_ok=True)
    if images is None and s.domain in RENDERED:
        images = {"init.png": render_png(s.init), "goal.png": render_png(s.goal)}
    images = images or {}
    for name, data in images.items():
        (d / name).write_bytes(data)
    s = Scenario(
        s.id, s.domain, s.difficulty, s.seed, s.init, s.goal, s.goal_text, s.gt_problem,
        init_image="init.png" if "init.png" in images else s.init_image,
        goal_image="goal.png" if "goal.png" in images else s.goal_image,
        base_dir=str(d),
    )
    _write_text(d / SCENARIO_FILE, dump_json(scenario_to_dict(s)))
    _write_text(d / "goal.txt", s.goal_text + "\n")
    _write_text(d / "problem_gt.pddl", render_problem(s.gt_problem))
    return s


def read_manifest(root: Path) -> DatasetManifest | None:
    path = Path(root) / MANIFEST
    if not path.exists():
        return None
    try:
        return DatasetManifest.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except (ValueError, KeyError, TypeError) as exc:
        raise DatasetError("BAD_MANIFEST", str(exc), str(path)) from exc


def write_manifest(root: Path, scenarios: list[Scenario], dataset_id: str, seed: int) -> DatasetManifest:
    """Merge entries into root/manifest.json; same ids are replaced."""
    root = Path(root)
    old = read_manifest(root)
    entries = {e.id: e for e in old.entries} if old else {}
    for s in scenarios:
        entries[s.id] = ManifestEntry(s.id, s.domain, s.difficulty, s.seed, s.rel_dir)
    ordered = tuple(sorted(entries.values(), key=lambda e: (e.domain.value, e.difficulty.value, e.id)))
    manifest = DatasetManifest(old.dataset_id if old else dataset_id, old.seed if old else seed, ordered)
    root.mkdir(parents=True, exist_ok=True)
    _write_text(root / MANIFEST, dump_json(manifest.to_dict()))
    return manifest


def write_dataset(root: Path, scenarios: list[Scenario], dataset_id: str = "dataset", seed: int = 0) -> DatasetManifest:
    written = [write_scenario(root, s) for s in scenarios]
    return write_manifest(root, written, dataset_id, seed)


def generate_dataset(root: Path, domain: DomainId | str, difficulty: Difficulty | str, count: int,
                     master_seed: int, dataset_id: str | None = None) -> DatasetManifest:
    scenarios = generate_scenarios(domain, difficulty, count, master_seed)
    return write_dataset(root, scenarios, dataset_id or f"scene2pddl-{master_seed}", master_seed)


def load_scenario(d: Path) -> Scenario:
    d = Path(d)
    path = d / SCENARIO_FILE
    if not path.exists():
        raise DatasetError("MISSING_FILE", "scenario file not found", str(path))
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        if data.get("schema_version") != SCHEMA_VERSION:
            raise DatasetError("SCHEMA_VERSION", f"unsupported schema_version {data.get('schema_version')!r}", str(path))
        domain = DomainId(data["domain"])
        init = parse_state_format(domain, data["init"])
        goal = parse_state_format(domain, data["goal"])
        difficulty = Difficulty(data["difficulty"])
        sid, seed = data["id"], int(data["seed"])
        goal_text = data["goal_text"]
        images = {k: data.get(k) for k in ("init_image", "goal_image")}
        gt_name = data["gt_problem"]
    except DatasetError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise DatasetError("SCHEMA", str(exc), str(path)) from exc
    if init == goal:
        raise DatasetError("INIT_EQUALS_GOAL", "initial and goal states are identical", str(path))
    try:
        solvable = is_solvable(init, goal)
    except StateError as exc:
        raise DatasetError("SCHEMA", str(exc), str(path)) from exc
    if not solvable:
        raise DatasetError("UNSOLVABLE", "goal is not reachable from init", str(path))
    for key, name in images.items():
        if name is not None and not (d / name).exists():
            raise DatasetError("MISSING_FILE", f"{key} not found", str(d / name))
    gt_path = d / gt_name
    if not gt_path.exists():
        raise DatasetError("MISSING_FILE", "ground-truth problem not found", str(gt_path))
    try:
        gt = parse_problem(gt_path.read_text(encoding="utf-8"))
    except PddlError as exc:
        raise DatasetError("GT_UNPARSEABLE", str(exc), str(gt_path)) from exc
    if gt != build_problem(init, goal, sid):
        raise DatasetError("GT_MISMATCH", "problem does not match the scenario states", str(gt_path))
    return Scenario(sid, domain, difficulty, seed, init, goal, goal_text, gt,
                    images["init_image"], images["goal_image"], base_dir=str(d))


def load_dataset(root: Path) -> tuple[DatasetManifest, list[Scenario]]:
    """Load every manifest entry; the first failure aborts the load."""
    root = Path(root)
    manifest = read_manifest(root)
    if manifest is None:
        raise DatasetError("MISSING_FILE", "manifest not found", str(root / MANIFEST))
    scenarios = []
    for e in manifest.entries:
        d = root / e.path
        if not d.is_dir():
            raise DatasetError("MISSING_FILE", f"scenario directory for {e.id} not found", str(d))
        s = load_scenario(d)
        if (s.id, s.domain, s.difficulty) != (e.id, e.domain, e.difficulty):
            raise DatasetError("MANIFEST_MISMATCH", f"manifest entry {e.id} disagrees with scenario file", str(d))
        scenarios.append(s)
    return manifest, scenarios


def ingest_kitchen(source: Path, root: Path, dataset_id: str = "kitchen") -> DatasetManifest:
    """Import externally rendered kitchen scenes.

    Each subdirectory of source holds init.png, optionally goal.png, and a
    scene.json sidecar with "difficulty", "init" and "goal" state texts and
    an optional "goal_text".
    """
    source = Path(source)
    if not source.is_dir():
        raise DatasetError("MISSING_FILE", "ingest source is not a directory", str(source))
    scenarios = []
    for sub in sorted(p for p in source.iterdir() if p.is_dir()):
        sidecar = sub / "scene.json"
        if not sidecar.exists():
            raise DatasetError("MISSING_FILE", "scene.json sidecar not found", str(sidecar))
        if not (sub / "init.png").exists():
            raise DatasetError("MISSING_FILE", "init.png not found", str(sub / "init.png"))
        try:
            data = json.loads(sidecar.read_text(encoding="utf-8"))
            difficulty = Difficulty(data["difficulty"])
            init = parse_state_format(DomainId.KITCHEN, data["init"])
            goal = parse_state_format(DomainId.KITCHEN, data["goal"])
        except (ValueError, KeyError, TypeError) as exc:
            raise DatasetError("SCHEMA", str(exc), str(sidecar)) from exc
        if init == goal:
            raise DatasetError("INIT_EQUALS_GOAL", "initial and goal states are identical", str(sidecar))
        try:
            if not is_solvable(init, goal):
                raise DatasetError("UNSOLVABLE", "goal is not reachable from init", str(sidecar))
        except StateError as exc:
            raise DatasetError("SCHEMA", str(exc), str(sidecar)) from exc
        prefix = f"kitchen-{difficulty.value}-"
        sid = sub.name if sub.name.startswith(prefix) else prefix + sub.name
        s = scenario_from_states(sid, difficulty, int(data.get("seed", 0)), init, goal, data.get("goal_text"))
        images = {name: (sub / name).read_bytes() for name in ("init.png", "goal.png") if (sub / name).exists()}
        scenarios.append(write_scenario(root, s, images))
    if not scenarios:
        raise DatasetError("EMPTY_SOURCE", "no scene directories found", str(source))
    return write_manifest(root, scenarios, dataset_id, 0)
