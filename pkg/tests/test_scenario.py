import hashlib
import io
import json
from dataclasses import replace

import pytest
from PIL import Image

from oracles import write_kitchen_source
from scene2pddl.domains import (
    BlocksState,
    DomainId,
    KitchenItem,
    KitchenState,
    ShoeboxElement,
    ShoeboxState,
    TileState,
    UnparseableState,
    build_problem,
    is_solvable,
    to_predicates,
)
from scene2pddl.pddl import render_problem
from scene2pddl.scenario import (
    DatasetError,
    DatasetManifest,
    generate_dataset,
    generate_scenario,
    generate_scenarios,
    ingest_kitchen,
    load_dataset,
    load_scenario,
    sub_seed,
)
from scene2pddl.scenario.render import BLOCK_COLORS, GLYPHS, RenderError, render_image, render_png, tile_layout
from scene2pddl.scenario.text import blocks_goal_from_text, goal_text_for

LEVELS = ("easy", "medium", "hard")


def test_blocksworld_easy_has_five_blocks():
    s = generate_scenario("blocksworld", "easy", 1)
    assert len(s.init.blocks) == 5 and s.init.blocks == s.goal.blocks


@pytest.mark.parametrize("level,n", [("easy", 5), ("medium", 6), ("hard", 7)])
def test_block_counts(level, n):
    for seed in range(5):
        assert len(generate_scenario("blocksworld", level, seed).init.blocks) == n


@pytest.mark.parametrize("level,size", [("easy", 3), ("medium", 4), ("hard", 5)])
def test_grid_sizes(level, size):
    s = generate_scenario("sliding_tile", level, 42)
    assert (s.init.width, s.init.height) == (size, size)
    assert s.init.n_tiles == size * size - 1
    assert s.init.cells.count(0) == 1


@pytest.mark.parametrize("level,n", [("easy", 1), ("medium", 2), ("hard", 3)])
def test_kitchen_item_counts(level, n):
    for seed in range(10):
        s = generate_scenario("kitchen", level, seed)
        assert len(s.goal.items) == n
        types = [it.type for it in s.goal.items]
        if level == "medium":
            assert len(set(types)) == 2
        if level == "hard":
            assert sorted(types) == ["fruit", "mug", "soda"]


@pytest.mark.parametrize("level,n", [("easy", 3), ("medium", 5), ("hard", 7)])
def test_shoebox_pairs(level, n):
    s = generate_scenario("shoebox", level, 3)
    assert len(s.goal.elements) == n == len(s.goal.locations)
    assert all(e.location for e in s.goal.elements)


@pytest.mark.parametrize("domain", [d.value for d in DomainId])
def test_scenario_invariants(domain):
    for level in LEVELS:
        for seed in range(8):
            s = generate_scenario(domain, level, seed)
            assert s.init != s.goal
            assert is_solvable(s.init, s.goal)
            assert s.gt_problem == build_problem(s.init, s.goal, s.id)
            assert set(s.gt_problem.init) == set(to_predicates(s.init))


def test_generation_deterministic():
    for domain in DomainId:
        a = generate_scenario(domain, "hard", 77)
        b = generate_scenario(domain, "hard", 77)
        assert a == b
        assert render_problem(a.gt_problem) == render_problem(b.gt_problem)


def test_sub_seed_frozen():
    # sha256("0:blocksworld:easy:0")[:8], masked to 63 bits
    digest = hashlib.sha256(b"0:blocksworld:easy:0").digest()[:8]
    assert sub_seed(0, "blocksworld", "easy", 0) == int.from_bytes(digest, "big") & (2**63 - 1)
    assert 0 <= sub_seed(99, "shoebox", "hard", 7) < 2**63


def test_fifty_unique_blocksworld():
    scenarios = generate_scenarios("blocksworld", "easy", 50, 5)
    assert len({(s.init, s.goal) for s in scenarios}) == 50
    assert [s.id for s in scenarios][:2] == ["blocksworld-easy-000", "blocksworld-easy-001"]


def test_count_one_manifest(tmp_path):
    m = generate_dataset(tmp_path, "blocksworld", "easy", 1, 3)
    assert len(m.entries) == 1


def test_shoebox_easy_two_hundred_within_cap():
    scenarios = generate_scenarios("shoebox", "easy", 200, 1)
    assert len({(s.init, s.goal) for s in scenarios}) == 200


def test_kitchen_easy_uniqueness_exhausted():
    with pytest.raises(DatasetError) as exc:
        generate_scenarios("kitchen", "easy", 200, 1)
    assert exc.value.code == "UNIQUENESS_EXHAUSTED"


def test_count_must_be_positive():
    with pytest.raises(ValueError):
        generate_scenarios("blocksworld", "easy", 0, 1)


# rendering

def _read_glyphs(px, ink: set, gx: int, gy: int, scale: int) -> str | None:
    """Find a digit string whose glyphs, drawn at some origin, cover exactly the ink."""
    for n in (1, 2):
        for offx in range(5):
            for offy in range(7):
                ox, oy = gx - offx * scale, gy - offy * scale
                text, covered = "", set()
                for k in range(n):
                    bx = ox + k * 6 * scale
                    rows = tuple("".join("#" if px[bx + i * scale, oy + j * scale] == (0, 0, 0) else "."
                                         for i in range(5)) for j in range(7))
                    match = [d for d, g in GLYPHS.items() if g == rows]
                    if not match:
                        break
                    text += match[0]
                    for j, row in enumerate(rows):
                        for i, bit in enumerate(row):
                            if bit == "#":
                                covered |= {(bx + i * scale + a, oy + j * scale + b)
                                            for a in range(scale) for b in range(scale)}
                if len(text) == n and covered == ink:
                    return text
    return None


def decode_tiles(img: Image.Image, w: int, h: int) -> list[str | None]:
    """Test-side glyph matcher: read each cell's digits back from the pixels."""
    x0, y0, cell, scale = tile_layout(w, h)
    px = img.load()
    out = []
    for r in range(h):
        for c in range(w):
            left, top = x0 + c * cell + 4, y0 + r * cell + 4
            ink = {(x, y) for y in range(top, top + cell - 8) for x in range(left, left + cell - 8)
                   if px[x, y] == (0, 0, 0)}
            if not ink:
                out.append(None)
                continue
            out.append(_read_glyphs(px, ink, min(x for x, _ in ink), min(y for _, y in ink), scale) or "?")
    return out


def test_solved_puzzle_decodes():
    img = render_image(TileState.solved(3))
    cells = decode_tiles(img, 3, 3)
    assert cells == ["1", "2", "3", "4", "5", "6", "7", "8", None]
    assert len({c for c in cells if c}) == 8


def test_fifteen_puzzle_two_digit_glyphs():
    s = TileState(4, 4, (15, 14, 13, 12, 11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0))
    assert decode_tiles(render_image(s), 4, 4) == [str(v) for v in s.cells[:-1]] + [None]


def test_render_deterministic():
    for domain in ("blocksworld", "sliding_tile", "shoebox"):
        s = generate_scenario(domain, "medium", 4)
        assert render_png(s.init) == render_png(s.init)
        assert render_png(s.init) != render_png(s.goal)


def test_blocks_render_uses_block_colors():
    img = render_image(BlocksState((("red", "blue"),)))
    colors = {c for _, c in img.getcolors(1 << 16)}
    assert BLOCK_COLORS["red"] in colors and BLOCK_COLORS["blue"] in colors
    assert BLOCK_COLORS["green"] not in colors


def test_kitchen_not_rendered():
    with pytest.raises(RenderError) as exc:
        render_png(KitchenState((KitchenItem("apple", "fruit", "red", "shelf"),)))
    assert exc.value.code == "UNRENDERABLE_DOMAIN"


def test_png_is_512_square():
    img = Image.open(io.BytesIO(render_png(generate_scenario("shoebox", "easy", 1).init)))
    assert img.size == (512, 512)


# goal text

def test_single_block_goal_text():
    assert goal_text_for(BlocksState((("red",),))) == "red is on the table."


def test_blocks_goal_text():
    text = goal_text_for(BlocksState((("red", "blue"), ("green",))))
    assert text == "Stack the blocks so that: green is on the table; red is on the table; blue is on red."


def test_kitchen_medium_goal_text():
    goal = KitchenState((KitchenItem("apple", "fruit", "red", "shelf"), KitchenItem("black_mug", "mug", "black", "sink")))
    assert goal_text_for(goal) == "Put the red apple on the shelf and the black mug in the sink."


def test_tile_and_shoebox_goal_text():
    assert goal_text_for(TileState.solved(3)) == (
        "Arrange the 3x3 puzzle so that the rows read, from the top: 1 2 3 / 4 5 6 / 7 8 _. "
        "The blank ends in row 3, column 3."
    )
    s = ShoeboxState((ShoeboxElement("ball1", "ball", "bowl1"), ShoeboxElement("cube1", "cube")), ("bowl1", "bowl2"))
    assert goal_text_for(s) == "Place ball1 in bowl1. Leave cube1 out of the bins."


def test_goal_text_deterministic():
    s = generate_scenario("kitchen", "hard", 12)
    assert goal_text_for(s.goal) == goal_text_for(s.goal) == s.goal_text


def test_blocks_goal_from_text():
    init = BlocksState((("red",), ("blue",)))
    assert blocks_goal_from_text("move the red block onto the blue block", init) == BlocksState((("blue", "red"),))
    for seed in range(10):
        s = generate_scenario("blocksworld", "medium", seed)
        assert blocks_goal_from_text(s.goal_text, s.init) == s.goal
    with pytest.raises(UnparseableState):
        blocks_goal_from_text("make it pretty", init)


# dataset files

def test_write_load_round_trip(tmp_path):
    for domain in ("blocksworld", "sliding_tile", "shoebox"):
        generate_dataset(tmp_path, domain, "easy", 3, 11)
    manifest, scenarios = load_dataset(tmp_path)
    assert len(scenarios) == 9 == len(manifest.entries)
    again = {s.id: s for d in ("blocksworld", "sliding_tile", "shoebox") for s in generate_scenarios(d, "easy", 3, 11)}
    for s in scenarios:
        assert replace(s, init_image=None, goal_image=None) == again[s.id]
        assert (tmp_path / s.rel_dir / s.init_image).exists()
    assert DatasetManifest.from_dict(manifest.to_dict()) == manifest


def test_missing_file_names_path(tmp_path):
    generate_dataset(tmp_path, "blocksworld", "easy", 2, 1)
    _, scenarios = load_dataset(tmp_path)
    victim = tmp_path / scenarios[0].rel_dir / scenarios[0].goal_image
    victim.unlink()
    with pytest.raises(DatasetError) as exc:
        load_dataset(tmp_path)
    assert exc.value.code == "MISSING_FILE"
    assert str(victim) in str(exc.value)


def test_init_equals_goal_rejected(tmp_path):
    generate_dataset(tmp_path, "blocksworld", "easy", 1, 1)
    _, (s,) = load_dataset(tmp_path)
    path = tmp_path / s.rel_dir / "scenario.json"
    data = json.loads(path.read_text())
    data["goal"] = data["init"]
    path.write_text(json.dumps(data))
    with pytest.raises(DatasetError) as exc:
        load_scenario(path.parent)
    assert exc.value.code == "INIT_EQUALS_GOAL"


def test_gt_mismatch_rejected(tmp_path):
    generate_dataset(tmp_path, "sliding_tile", "easy", 1, 1)
    _, (s,) = load_dataset(tmp_path)
    other = generate_scenario("sliding_tile", "easy", 999, s.id)
    (tmp_path / s.rel_dir / "problem_gt.pddl").write_text(render_problem(other.gt_problem))
    with pytest.raises(DatasetError) as exc:
        load_scenario(tmp_path / s.rel_dir)
    assert exc.value.code == "GT_MISMATCH"


def test_ingest_kitchen(tmp_path):
    names = write_kitchen_source(tmp_path / "src", 2, levels=("medium",))
    manifest = ingest_kitchen(tmp_path / "src", tmp_path / "ds")
    assert sorted(e.id for e in manifest.entries) == sorted(names)
    _, scenarios = load_dataset(tmp_path / "ds")
    assert all(s.init_image and s.goal_image for s in scenarios)
    assert all(s.domain is DomainId.KITCHEN for s in scenarios)


def test_ingest_requires_init_image(tmp_path):
    write_kitchen_source(tmp_path / "src", 1, levels=("easy",))
    (next((tmp_path / "src").iterdir()) / "init.png").unlink()
    with pytest.raises(DatasetError) as exc:
        ingest_kitchen(tmp_path / "src", tmp_path / "ds")
    assert exc.value.code == "MISSING_FILE" and "init.png" in str(exc.value)
