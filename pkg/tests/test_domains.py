import random

import pytest

from oracles import SOLVED_3X3, eight_puzzle_reachable, random_state
from scene2pddl.domains import (
    BlocksState,
    DomainId,
    InconsistentState,
    KitchenItem,
    KitchenState,
    MissingAtoms,
    ShoeboxElement,
    ShoeboxState,
    StateError,
    TileState,
    UniverseMismatch,
    UnparseableState,
    build_problem,
    from_predicates,
    is_solvable,
    model,
    parse_state_format,
    serialize_state_format,
    to_predicates,
)
from scene2pddl.domains.sliding_tile import permutation_parity
from scene2pddl.pddl import Atom
from scene2pddl.planner import Plan, ground, solve, validate_plan

A = Atom.of
DOMAINS = [d.value for d in DomainId]


def test_single_block():
    assert to_predicates(BlocksState((("b1",),))) == {A("ontable", "b1"), A("clear", "b1"), A("arm-empty")}


def test_two_block_stack():
    got = to_predicates(BlocksState((("b1", "b2"),)))
    assert got == {A("ontable", "b1"), A("on", "b2", "b1"), A("clear", "b2"), A("arm-empty")}


def test_blocks_atom_count_formula():
    rng = random.Random(0)
    for _ in range(200):
        s = random_state("blocksworld", rng)
        assert len(to_predicates(s)) == len(s.blocks) + len(s.stacks) + 1


def test_solved_eight_puzzle_atoms():
    atoms = to_predicates(TileState.solved(3))
    by = {}
    for a in atoms:
        by.setdefault(a.predicate, []).append(a)
    assert len(by["at"]) == 8
    assert by["blank"] == [A("blank", "p3", "p3")]
    assert set(by["inc"]) == {A("inc", "p1", "p2"), A("inc", "p2", "p3")}
    assert set(by["dec"]) == {A("dec", "p2", "p1"), A("dec", "p3", "p2")}


@pytest.mark.parametrize("domain", DOMAINS)
def test_predicates_round_trip(domain):
    rng = random.Random(domain)
    for _ in range(1000):
        s = random_state(domain, rng)
        assert from_predicates(domain, to_predicates(s)) == s


@pytest.mark.parametrize("domain", DOMAINS)
def test_state_format_round_trip(domain):
    rng = random.Random("fmt" + domain)
    for _ in range(300):
        s = random_state(domain, rng)
        text = serialize_state_format(s)
        assert parse_state_format(domain, text) == s
        assert parse_state_format(domain, f"Sure! Here it is:\n```\n{text.upper()}```\nDone.") == s


def test_blocks_stack_order_not_semantic():
    a = parse_state_format("blocksworld", "stack: red blue\nstack: green\narm: empty")
    b = parse_state_format("blocksworld", "stack: green\nstack: red blue\narm: empty")
    assert a == b


def test_kitchen_unknown_location_names_token():
    with pytest.raises(UnparseableState) as exc:
        parse_state_format("kitchen", "apple (fruit, red) at table")
    assert "table" in str(exc.value)
    assert exc.value.code == "UNPARSEABLE_STATE"


def test_unparseable_prose():
    for domain in DOMAINS:
        with pytest.raises(UnparseableState):
            parse_state_format(domain, "I see a nice picture.")


def test_on_two_blocks_inconsistent():
    atoms = {A("on", "b1", "b2"), A("on", "b1", "b3"), A("ontable", "b2"), A("ontable", "b3")}
    with pytest.raises(InconsistentState) as exc:
        from_predicates("blocksworld", atoms)
    assert exc.value.code == "INCONSISTENT_STATE"


def test_block_without_position_is_missing():
    with pytest.raises(MissingAtoms):
        from_predicates("blocksworld", {A("ontable", "b1"), A("clear", "b2")})


def test_two_blanks_inconsistent():
    atoms = set(to_predicates(TileState.solved(2))) | {A("blank", "p1", "p1")}
    with pytest.raises(InconsistentState):
        from_predicates("sliding_tile", atoms)


def test_item_at_two_locations():
    with pytest.raises(InconsistentState):
        from_predicates("kitchen", {A("at", "apple", "sink"), A("at", "apple", "shelf")})


def test_stove_as_item():
    with pytest.raises(InconsistentState) as exc:
        from_predicates("kitchen", {A("at", "stove", "counter")})
    assert exc.value.reason == "STOVE_AS_ITEM"


def test_kitchen_state_excludes_stove_item():
    with pytest.raises(StateError) as exc:
        KitchenState((KitchenItem("stove", "item", "", "counter"),))
    assert exc.value.reason == "STOVE_AS_ITEM"


def test_shoebox_one_to_one():
    with pytest.raises(InconsistentState):
        ShoeboxState((ShoeboxElement("ball1", "ball", "bowl1"), ShoeboxElement("cube1", "cube", "bowl1")), ("bowl1",))


def test_tile_invariant():
    with pytest.raises(InconsistentState):
        TileState(3, 3, (1, 1, 2, 3, 4, 5, 6, 7, 0))


def test_is_solvable_identity():
    rng = random.Random(5)
    for domain in DOMAINS:
        s = random_state(domain, rng)
        assert is_solvable(s, s)


def test_swapped_tiles_unsolvable():
    goal = TileState(3, 3, (1, 2, 3, 4, 5, 6, 8, 7, 0))
    assert goal not in {TileState(3, 3, c) for c in eight_puzzle_reachable()}
    assert not is_solvable(TileState.solved(3), goal)


def test_parity_matches_bfs_on_random_sample():
    rng = random.Random(1)
    reachable = eight_puzzle_reachable()
    solved = TileState(3, 3, SOLVED_3X3)
    for _ in range(500):
        cells = tuple(rng.sample(range(9), 9))
        assert is_solvable(TileState(3, 3, cells), solved) == (cells in reachable)


def test_permutation_parity_small():
    assert permutation_parity([0, 1, 2]) == 0
    assert permutation_parity([1, 0, 2]) == 1
    assert permutation_parity([1, 2, 0]) == 0


def test_universe_mismatch():
    with pytest.raises(UniverseMismatch) as exc:
        is_solvable(BlocksState((("red",),)), BlocksState((("blue",),)))
    assert exc.value.code == "UNIVERSE_MISMATCH"


def test_random_blocks_pairs_solve():
    rng = random.Random(9)
    d = model("blocksworld").domain
    for i in range(50):
        init = random_state("blocksworld", rng)
        blocks = list(init.blocks)
        rng.shuffle(blocks)
        cut = rng.randint(1, len(blocks))
        goal = BlocksState((tuple(blocks[:cut]), tuple(blocks[cut:])))
        assert is_solvable(init, goal)
        t = ground(d, build_problem(init, goal, f"p{i}"))
        plan = solve(t)
        assert isinstance(plan, Plan) and validate_plan(t, plan)


def test_serialization_is_canonical():
    s = BlocksState((("red", "blue"), ("green",)))
    assert serialize_state_format(s) == "stack: green\nstack: red blue\narm: empty\n"
    t = TileState(3, 3, SOLVED_3X3)
    assert serialize_state_format(t) == "grid 3x3\n1 2 3\n4 5 6\n7 8 _\n"
    k = KitchenState((KitchenItem("apple", "fruit", "red", "shelf"),))
    assert serialize_state_format(k) == "apple (fruit, red) at shelf\n"
    b = ShoeboxState((ShoeboxElement("ball1", "ball", "bowl1"), ShoeboxElement("cube1", "cube")), ("bowl1", "bowl2"))
    assert serialize_state_format(b) == (
        "location bowl1\nlocation bowl2\nelement ball1 (ball) at bowl1\nelement cube1 (cube) unplaced\n"
    )


@pytest.mark.parametrize("domain", DOMAINS)
def test_static_predicates_only_for_tiles(domain):
    expected = {"inc", "dec"} if domain == "sliding_tile" else set()
    assert set(model(domain).static_predicates) == expected
