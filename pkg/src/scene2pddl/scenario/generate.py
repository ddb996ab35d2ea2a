"""Seeded scenario generation by random walks from a sampled initial state."""

from __future__ import annotations

import hashlib
import random

from ..domains import (
    COLORS,
    KINDS,
    BlocksState,
    DomainId,
    KitchenState,
    ShoeboxElement,
    ShoeboxState,
    TileState,
    build_problem,
)
from ..domains.kitchen import CATALOG, LOCATIONS, catalog_item
from .model import DatasetError, Difficulty, Scenario
from .text import goal_text_for

BLOCK_COUNTS = {Difficulty.EASY: 5, Difficulty.MEDIUM: 6, Difficulty.HARD: 7}
GRID_SIZES = {Difficulty.EASY: 3, Difficulty.MEDIUM: 4, Difficulty.HARD: 5}
KITCHEN_ITEMS = {Difficulty.EASY: 1, Difficulty.MEDIUM: 2, Difficulty.HARD: 3}
SHOEBOX_PAIRS = {Difficulty.EASY: 3, Difficulty.MEDIUM: 5, Difficulty.HARD: 7}
# Random-walk length per difficulty.
WALK_LENGTH = {
    DomainId.BLOCKSWORLD: {Difficulty.EASY: 6, Difficulty.MEDIUM: 8, Difficulty.HARD: 10},
    DomainId.SLIDING_TILE: {Difficulty.EASY: 20, Difficulty.MEDIUM: 30, Difficulty.HARD: 40},
    DomainId.KITCHEN: {Difficulty.EASY: 1, Difficulty.MEDIUM: 2, Difficulty.HARD: 3},
    DomainId.SHOEBOX: {Difficulty.EASY: 3, Difficulty.MEDIUM: 5, Difficulty.HARD: 7},
}
HARD_FAMILIES = ("fruit", "mug", "soda")


def _rng(domain: DomainId, difficulty: Difficulty, seed: int) -> random.Random:
    return random.Random(f"{domain.value}:{difficulty.value}:{seed}")


def sub_seed(master_seed: int, domain: DomainId | str, difficulty: Difficulty | str, j: int) -> int:
    """The j-th scenario seed of a dataset, as a non-negative 63-bit integer."""
    key = f"{master_seed}:{DomainId(domain).value}:{Difficulty(difficulty).value}:{j}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") & (2**63 - 1)


# blocksworld


def _blocks_init(rng: random.Random, n: int) -> BlocksState:
    names = rng.sample(COLORS, n)
    stacks: list[list[str]] = [[names[0]]]
    for b in names[1:]:
        if rng.random() < 0.5:
            stacks[-1].append(b)
        else:
            stacks.append([b])
    return BlocksState(tuple(tuple(s) for s in stacks))


def _blocks_move(rng: random.Random, s: BlocksState) -> BlocksState:
    stacks = [list(st) for st in s.stacks]
    moves = []
    for i, src in enumerate(stacks):
        if len(src) > 1:
            moves.append((i, None))
        moves.extend((i, j) for j in range(len(stacks)) if j != i)
    i, j = rng.choice(moves)
    block = stacks[i].pop()
    if j is None:
        stacks.append([block])
    else:
        stacks[j].append(block)
    return BlocksState(tuple(tuple(st) for st in stacks))


# sliding tile


def _tile_init(rng: random.Random, size: int) -> TileState:
    cells = list(range(size * size))
    rng.shuffle(cells)
    return TileState(size, size, tuple(cells))


def _tile_walk(rng: random.Random, s: TileState, k: int) -> TileState:
    previous = None
    for _ in range(k):
        options = [n for n in s.neighbors() if n != previous]
        previous, s = s, rng.choice(options)
    return s


# kitchen


def _kitchen_names(rng: random.Random, n: int) -> list[str]:
    if n == 3:
        return [rng.choice(sorted(k for k, (t, _) in CATALOG.items() if t == fam)) for fam in HARD_FAMILIES]
    by_type: dict[str, list[str]] = {}
    for name, (itype, _) in sorted(CATALOG.items()):
        by_type.setdefault(itype, []).append(name)
    types = rng.sample(sorted(by_type), n)
    return [rng.choice(by_type[t]) for t in types]


def _kitchen_init(rng: random.Random, n: int) -> KitchenState:
    names = _kitchen_names(rng, n)
    places = rng.sample(LOCATIONS, n)
    return KitchenState(tuple(catalog_item(name, loc) for name, loc in zip(names, places)))


def _kitchen_move(rng: random.Random, s: KitchenState) -> KitchenState:
    item = rng.choice(s.items)
    return s.moved(item.name, rng.choice(s.free_locations))


# shoebox


def _shoebox_goal(rng: random.Random, n: int) -> ShoeboxState:
    counts: dict[str, int] = {}
    elements = []
    locations = tuple(f"bowl{i}" for i in range(1, n + 1))
    targets = rng.sample(locations, n)
    for loc in targets:
        kind = rng.choice(KINDS)
        counts[kind] = counts.get(kind, 0) + 1
        elements.append(ShoeboxElement(f"{kind}{counts[kind]}", kind, loc))
    return ShoeboxState(tuple(elements), locations)


def _shoebox_move(rng: random.Random, s: ShoeboxState) -> ShoeboxState:
    """One legal put-in or take-out."""
    free = s.free_locations
    moves: list[tuple[str, str | None]] = []
    for e in s.elements:
        if e.location is not None:
            moves.append((e.name, None))
        else:
            moves.extend((e.name, loc) for loc in free)
    name, loc = rng.choice(moves)
    elements = tuple(ShoeboxElement(e.name, e.kind, loc) if e.name == name else e for e in s.elements)
    return ShoeboxState(elements, s.locations)


def _walk(rng: random.Random, start, step, k: int):
    s = start
    for _ in range(k):
        s = step(rng, s)
    while s == start:
        s = step(rng, s)
    return s


def generate_states(domain: DomainId | str, difficulty: Difficulty | str, seed: int):
    """(init, goal) for a seed; the goal is reached from init by legal moves."""
    domain, difficulty = DomainId(domain), Difficulty(difficulty)
    rng = _rng(domain, difficulty, seed)
    k = WALK_LENGTH[domain][difficulty]
    if domain is DomainId.BLOCKSWORLD:
        init = _blocks_init(rng, BLOCK_COUNTS[difficulty])
        return init, _walk(rng, init, _blocks_move, k)
    if domain is DomainId.SLIDING_TILE:
        init = _tile_init(rng, GRID_SIZES[difficulty])
        goal = _tile_walk(rng, init, k)
        while goal == init:
            goal = _tile_walk(rng, goal, 1)
        return init, goal
    if domain is DomainId.KITCHEN:
        init = _kitchen_init(rng, KITCHEN_ITEMS[difficulty])
        return init, _walk(rng, init, _kitchen_move, k)
    # Shoebox: the goal is a full placement; init is reached by walking
    # backwards from it (moves are reversible, so solvability still holds).
    goal = _shoebox_goal(rng, SHOEBOX_PAIRS[difficulty])
    return _walk(rng, goal, _shoebox_move, k), goal


def scenario_from_states(scenario_id: str, difficulty: Difficulty | str, seed: int, init, goal,
                         goal_text: str | None = None) -> Scenario:
    return Scenario(
        id=scenario_id,
        domain=init.domain,
        difficulty=Difficulty(difficulty),
        seed=seed,
        init=init,
        goal=goal,
        goal_text=goal_text if goal_text is not None else goal_text_for(goal),
        gt_problem=build_problem(init, goal, scenario_id),
    )


def generate_scenario(domain: DomainId | str, difficulty: Difficulty | str, seed: int,
                      scenario_id: str | None = None) -> Scenario:
    domain, difficulty = DomainId(domain), Difficulty(difficulty)
    init, goal = generate_states(domain, difficulty, seed)
    sid = scenario_id or f"{domain.value}-{difficulty.value}-{seed}"
    return scenario_from_states(sid, difficulty, seed, init, goal)


def generate_scenarios(domain: DomainId | str, difficulty: Difficulty | str, count: int,
                       master_seed: int) -> list[Scenario]:
    """count scenarios with pairwise-distinct (init, goal) pairs."""
    if count < 1:
        raise ValueError("count must be >= 1")
    domain, difficulty = DomainId(domain), Difficulty(difficulty)
    seen: set = set()
    out: list[Scenario] = []
    j = 0
    cap = 10 * count
    while len(out) < count:
        if j >= cap:
            raise DatasetError(
                "UNIQUENESS_EXHAUSTED",
                f"only {len(out)} distinct {domain.value}/{difficulty.value} scenarios after {cap} attempts",
            )
        seed = sub_seed(master_seed, domain, difficulty, j)
        j += 1
        init, goal = generate_states(domain, difficulty, seed)
        if (init, goal) in seen:
            continue
        seen.add((init, goal))
        sid = f"{domain.value}-{difficulty.value}-{len(out):03d}"
        out.append(scenario_from_states(sid, difficulty, seed, init, goal))
    return out
