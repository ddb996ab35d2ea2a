import random
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import random_state
from scene2pddl.domains import ShoeboxElement, ShoeboxState
from scene2pddl.pipeline import (
    ConflictingIdentity,
    GoalInput,
    PipelineError,
    PipelineResult,
    load_results,
    merge_snapshots,
    reconcile_objects,
    run,
    run_batch,
    translate_initial,
    write_results,
)
from scene2pddl.scenario import generate_dataset, load_dataset
from scene2pddl.vlm import AdapterError, MockOracleAdapter, parse_fault


@pytest.fixture(scope="module")
def scenarios(tmp_path_factory):
    root = tmp_path_factory.mktemp("ds")
    for domain in ("blocksworld", "sliding_tile", "shoebox"):
        for level in ("easy", "hard"):
            generate_dataset(root, domain, level, 2, 21)
    return load_dataset(root)[1]


@pytest.mark.parametrize("mode", ["image", "text"])
def test_oracle_run_reproduces_ground_truth(scenarios, mode):
    oracle = MockOracleAdapter()
    for s in scenarios:
        r = run(oracle, s, mode)
        assert r.parsed_init == s.init and r.parsed_goal == s.goal
        assert r.problem == s.gt_problem
        assert r.adapter_calls == 3
        assert all(rec.error is None for rec in r.stages.values())
    assert oracle.calls == 3 * len(scenarios)


def test_prose_only_bounded_repair(scenarios):
    oracle = MockOracleAdapter(parse_fault("prose_only"))
    r = run(oracle, scenarios[0], "image")
    assert r.stages[1].error.startswith("UNPARSEABLE_STATE")
    assert r.stages[2].error.startswith("UNPARSEABLE_STATE")
    assert r.stages[3].error.startswith("UNPARSEABLE_PROBLEM")
    assert r.problem is None
    assert r.adapter_calls == oracle.calls == 6


def test_single_stage_failure_still_reaches_stage3(scenarios):
    s = scenarios[0]
    r = run(MockOracleAdapter(parse_fault("prose_only@1")), s, "text")
    assert r.parsed_init is None and r.parsed_goal == s.goal
    assert r.problem is not None
    assert r.adapter_calls == 2 + 1 + 1


def test_fence_fault_still_parses(scenarios):
    s = scenarios[-1]
    r = run(MockOracleAdapter(parse_fault("fence")), s, "image")
    assert r.problem == s.gt_problem
    assert r.stage3_text.startswith("Here is")


def test_missing_goal_image_guard(scenarios):
    oracle = MockOracleAdapter()
    s = replace(scenarios[0], goal_image=None)
    with pytest.raises(PipelineError) as exc:
        run(oracle, s, "image")
    assert exc.value.code == "MISSING_GOAL_IMAGE"
    assert oracle.calls == 0
    assert run(oracle, s, "text").problem == s.gt_problem


def test_missing_init_image_guard(scenarios):
    with pytest.raises(PipelineError) as exc:
        run(MockOracleAdapter(), replace(scenarios[0], init_image=None), "text")
    assert exc.value.code == "MISSING_INIT_IMAGE"


def test_bad_goal_mode(scenarios):
    with pytest.raises(PipelineError):
        run(MockOracleAdapter(), scenarios[0], "audio")


def test_goal_input_exclusive():
    with pytest.raises(ValueError):
        GoalInput()
    with pytest.raises(ValueError):
        GoalInput(image=b"x", text="y")


def test_adapter_errors_surface_as_pipeline_errors(scenarios):
    class Broken:
        name = "broken"
        supports_vision = True

        def complete(self, req):
            raise AdapterError("AUTH_FAILED", "no key")

    with pytest.raises(PipelineError) as exc:
        run(Broken(), scenarios[0], "image")
    assert exc.value.code == "AUTH_FAILED"


def test_translate_initial_without_context_fails_cleanly():
    with pytest.raises(AdapterError):
        translate_initial(MockOracleAdapter(), "blocksworld", b"\x89PNG\r\n\x1a\n")


def test_batch_keeps_order_and_matches_sequential(scenarios):
    seq = run_batch(MockOracleAdapter(), scenarios, "text", parallel=1)
    par = run_batch(MockOracleAdapter(), scenarios, "text", parallel=4)
    assert [r.scenario_id for r in par] == [s.id for s in scenarios]
    assert [r.to_dict() for r in seq] == [r.to_dict() for r in par]


def test_results_round_trip(scenarios, tmp_path):
    results = run_batch(MockOracleAdapter(), scenarios, "image") + run_batch(MockOracleAdapter(), scenarios[:2], "text")
    write_results(tmp_path, results, {"adapter": "oracle"})
    meta, loaded = load_results(tmp_path)
    assert meta == {"adapter": "oracle"}
    by_key = {(r.scenario_id, r.goal_mode): r for r in results}
    assert {(r.scenario_id, r.goal_mode) for r in loaded} == set(by_key)
    for r in loaded:
        assert r.to_dict() == by_key[(r.scenario_id, r.goal_mode)].to_dict()
        assert PipelineResult.from_dict(r.to_dict()).problem == r.problem


def test_load_results_missing_run(tmp_path):
    with pytest.raises(PipelineError):
        load_results(tmp_path / "nope")


# shoebox reconciliation

def shoebox_states():
    return st.integers(0, 10_000).map(lambda seed: random_state("shoebox", random.Random(seed)))


@given(shoebox_states(), st.integers(0, 100))
def test_reconcile_restores_hidden_element(goal, pick):
    hidden = goal.elements[pick % len(goal.elements)]
    seen = ShoeboxState(tuple(e for e in goal.elements if e.name != hidden.name), goal.locations)
    fixed = reconcile_objects(seen, goal)
    assert {e.name for e in fixed.elements} == {e.name for e in goal.elements}
    assert fixed.element(hidden.name).location is None
    assert reconcile_objects(fixed, goal) == fixed


@given(shoebox_states())
def test_reconcile_never_removes(goal):
    extra = ShoeboxElement("peg99", "peg", None)
    detected = ShoeboxState(goal.elements + (extra,), goal.locations)
    fixed = reconcile_objects(detected, goal)
    assert set(detected.elements) <= set(fixed.elements)
    assert reconcile_objects(goal, goal) == goal


@given(shoebox_states(), st.integers(0, 2**16))
def test_merge_recovers_universe(full, mask):
    names = [e.name for e in full.elements]
    in_a = {n for i, n in enumerate(names) if mask >> i & 1}
    in_b = set(names) - in_a | ({names[0]} if names else set())
    a = ShoeboxState(tuple(e for e in full.elements if e.name in in_a), full.locations)
    b = ShoeboxState(tuple(e for e in full.elements if e.name in in_b), full.locations)
    merged = merge_snapshots(a, b)
    assert {e.name for e in merged.elements} == set(names)
    for e in a.elements:
        assert merged.element(e.name) == e


def test_merge_conflicting_identity():
    a = ShoeboxState((ShoeboxElement("x1", "ball", "bowl1"),), ("bowl1",))
    b = ShoeboxState((ShoeboxElement("x1", "cube", None),), ("bowl1",))
    with pytest.raises(ConflictingIdentity) as exc:
        merge_snapshots(a, b)
    assert exc.value.code == "CONFLICTING_IDENTITY"


def test_reconcile_rejects_other_domains():
    with pytest.raises(ValueError):
        reconcile_objects(random_state("blocksworld", random.Random(0)), random_state("shoebox", random.Random(0)))


def test_pipeline_reconciles_dropped_element(scenarios):
    shoebox = [s for s in scenarios if s.domain.value == "shoebox"]
    oracle = MockOracleAdapter(parse_fault("drop_element"))
    for s in shoebox:
        r = run(oracle, s, "image")
        assert {e.name for e in r.parsed_init.elements} == {e.name for e in s.init.elements}
