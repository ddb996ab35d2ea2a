import json
import threading
import time

import httpx
import pytest

from scene2pddl.domains import (
    DomainId,
    KitchenState,
    TileState,
    model,
    parse_state_format,
    serialize_state_format,
)
from scene2pddl.pddl import parse_problem, render_problem, strip_markup
from scene2pddl.scenario import generate_scenario
from scene2pddl.vlm import (
    AdapterConfig,
    AdapterError,
    ChatRequest,
    Fault,
    FaultSpecError,
    HttpAdapter,
    ImagePart,
    MockOracleAdapter,
    OracleContext,
    PromptError,
    RetryPolicy,
    TextPart,
    build_prompt,
    parse_fault,
    template_hash,
)

PNG = b"\x89PNG\r\n\x1a\n" + b"\x00" * 16


def text_of(req: ChatRequest) -> str:
    return "\n".join(p.text for p in req.user_parts if isinstance(p, TextPart))


# prompts

def test_stage3_contains_domain_text_verbatim():
    for domain in DomainId:
        req = build_prompt(3, domain, init_state="x", goal_state="y", problem_name="p")
        assert model(domain).pddl_text.strip() in text_of(req)
        assert req.images == ()


def test_stage2_text_mode_has_no_images():
    req = build_prompt(2, "blocksworld", goal_text="red is on the table.")
    assert req.images == ()
    assert "red is on the table." in text_of(req)


def test_image_stages_carry_one_image():
    for stage in (1, 2):
        req = build_prompt(stage, "sliding_tile", image=PNG)
        assert len(req.images) == 1 and req.images[0].media_type == "image/png"


def test_prompt_includes_format_example():
    req = build_prompt(1, "kitchen", image=PNG)
    assert " at " in text_of(req) and "(" in text_of(req)


def test_prompts_are_deterministic():
    a = build_prompt(3, "kitchen", init_state="a", goal_state="b", problem_name="p")
    b = build_prompt(3, "kitchen", init_state="a", goal_state="b", problem_name="p")
    assert a == b
    assert template_hash() == template_hash()
    assert len(template_hash()) == 64


@pytest.mark.parametrize("kwargs", [
    dict(stage=1),
    dict(stage=2),
    dict(stage=2, image=PNG, goal_text="x"),
    dict(stage=3, init_state="x"),
])
def test_missing_input(kwargs):
    with pytest.raises(PromptError) as exc:
        build_prompt(domain="blocksworld", **kwargs)
    assert exc.value.code == "MISSING_INPUT"


def test_repair_prompt_quotes_previous_output():
    req = build_prompt(1, "blocksworld", image=PNG, repair=("garbage out", "UNPARSEABLE_STATE: nope"))
    assert req.repair
    assert "garbage out" in text_of(req) and "UNPARSEABLE_STATE" in text_of(req)


def test_chat_request_validation():
    with pytest.raises(ValueError):
        ChatRequest("s", ())
    with pytest.raises(ValueError):
        ChatRequest("s", (TextPart("x"),), temperature=3.0)


# http adapter

def ok_body(text="hello", prompt=11, completion=3):
    return {"choices": [{"message": {"role": "assistant", "content": text}}],
            "usage": {"prompt_tokens": prompt, "completion_tokens": completion}}


def make_adapter(monkeypatch, handler, **cfg):
    monkeypatch.setenv("TEST_KEY", "sk-test")
    sleeps = []
    config = AdapterConfig(endpoint="https://example.invalid/v1", api_key_env="TEST_KEY", **cfg)
    adapter = HttpAdapter(config, transport=httpx.MockTransport(handler), sleep=sleeps.append)
    return adapter, sleeps


def simple_request():
    return ChatRequest("sys", (TextPart("hi"), ImagePart(PNG)), stage=1)


def test_http_success_and_body(monkeypatch):
    seen = []

    def handler(request):
        seen.append(request)
        return httpx.Response(200, json=ok_body())

    adapter, _ = make_adapter(monkeypatch, handler)
    resp = adapter.complete(simple_request())
    assert (resp.text, resp.prompt_tokens, resp.completion_tokens) == ("hello", 11, 3)
    req = seen[0]
    assert str(req.url) == "https://example.invalid/v1/chat/completions"
    assert req.headers["authorization"] == "Bearer sk-test"
    body = json.loads(req.content)
    assert body["model"] == "gpt-4o" and body["temperature"] == 0
    parts = body["messages"][1]["content"]
    assert parts[1]["image_url"]["url"].startswith("data:image/png;base64,")


def test_http_retries_then_succeeds(monkeypatch):
    statuses = iter([429, 503, 200])

    def handler(request):
        code = next(statuses)
        return httpx.Response(code, json=ok_body() if code == 200 else {"error": "x"})

    adapter, sleeps = make_adapter(monkeypatch, handler, retry=RetryPolicy(3, 0.5))
    assert adapter.complete(simple_request()).text == "hello"
    assert sleeps == [0.5, 1.0]


def test_http_attempt_cap(monkeypatch):
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(500)

    adapter, _ = make_adapter(monkeypatch, handler, retry=RetryPolicy(2, 0.0))
    with pytest.raises(AdapterError) as exc:
        adapter.complete(simple_request())
    assert exc.value.code == "SERVER_ERROR"
    assert len(calls) == 2


def test_http_rate_limited_code(monkeypatch):
    adapter, _ = make_adapter(monkeypatch, lambda r: httpx.Response(429), retry=RetryPolicy(1, 0.0))
    with pytest.raises(AdapterError) as exc:
        adapter.complete(simple_request())
    assert exc.value.code == "RATE_LIMITED"


@pytest.mark.parametrize("status", [401, 403])
def test_http_auth_not_retried(monkeypatch, status):
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(status)

    adapter, _ = make_adapter(monkeypatch, handler)
    with pytest.raises(AdapterError) as exc:
        adapter.complete(simple_request())
    assert exc.value.code == "AUTH_FAILED" and len(calls) == 1


def test_http_missing_key(monkeypatch):
    monkeypatch.delenv("NO_SUCH_KEY", raising=False)
    with pytest.raises(AdapterError) as exc:
        HttpAdapter(AdapterConfig(endpoint="https://x", api_key_env="NO_SUCH_KEY"))
    assert exc.value.code == "AUTH_FAILED"


@pytest.mark.parametrize("body", [{"choices": []}, {"nope": 1}, "not json"])
def test_http_malformed(monkeypatch, body):
    def handler(request):
        if isinstance(body, str):
            return httpx.Response(200, content=body.encode())
        return httpx.Response(200, json=body)

    adapter, _ = make_adapter(monkeypatch, handler)
    with pytest.raises(AdapterError) as exc:
        adapter.complete(simple_request())
    assert exc.value.code == "MALFORMED_RESPONSE"


def test_http_timeout(monkeypatch):
    def handler(request):
        raise httpx.ReadTimeout("slow", request=request)

    adapter, _ = make_adapter(monkeypatch, handler, retry=RetryPolicy(2, 0.0))
    with pytest.raises(AdapterError) as exc:
        adapter.complete(simple_request())
    assert exc.value.code == "TIMEOUT"


def test_http_max_in_flight(monkeypatch):
    active, peak = [0], [0]
    lock = threading.Lock()

    def handler(request):
        with lock:
            active[0] += 1
            peak[0] = max(peak[0], active[0])
        time.sleep(0.02)
        with lock:
            active[0] -= 1
        return httpx.Response(200, json=ok_body())

    adapter, _ = make_adapter(monkeypatch, handler, max_in_flight=2)
    threads = [threading.Thread(target=adapter.complete, args=(simple_request(),)) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert peak[0] <= 2


def test_http_transcript_redacts_images(monkeypatch, tmp_path):
    path = tmp_path / "t.jsonl"
    adapter, _ = make_adapter(monkeypatch, lambda r: httpx.Response(200, json=ok_body()), transcript_path=str(path))
    adapter.complete(simple_request())
    record = json.loads(path.read_text().splitlines()[0])
    url = record["request"]["messages"][1]["content"][1]["image_url"]["url"]
    assert url.startswith("sha256:")


# oracle

def context_for(s, **kw):
    return OracleContext(s.id, s.domain.value, s.init, s.goal, goal_text=s.goal_text, **kw)


def test_oracle_answers_ground_truth():
    oracle = MockOracleAdapter()
    for domain in DomainId:
        s = generate_scenario(domain, "medium", 2)
        ctx = context_for(s)
        r1 = oracle.complete(build_prompt(1, domain, image=PNG, context=ctx))
        r2 = oracle.complete(build_prompt(2, domain, goal_text=s.goal_text, context=ctx))
        assert parse_state_format(domain, r1.text) == s.init
        assert parse_state_format(domain, r2.text) == s.goal
        r3 = oracle.complete(build_prompt(3, domain, init_state=r1.text, goal_state=r2.text, problem_name=s.id,
                                          context=context_for(s, init=s.init, goal=s.goal)))
        assert parse_problem(r3.text) == s.gt_problem
    assert oracle.calls == 12


def test_oracle_needs_context():
    with pytest.raises(AdapterError) as exc:
        MockOracleAdapter().complete(build_prompt(1, "blocksworld", image=PNG))
    assert exc.value.code == "NO_CONTEXT"


def test_oracle_text_only_rejects_images():
    s = generate_scenario("blocksworld", "easy", 0)
    with pytest.raises(AdapterError) as exc:
        MockOracleAdapter(supports_vision=False).complete(build_prompt(1, "blocksworld", image=PNG,
                                                                       context=context_for(s)))
    assert exc.value.code == "UNSUPPORTED_INPUT"


def test_oracle_reads_goal_from_text_when_goal_unknown():
    s = generate_scenario("blocksworld", "hard", 8)
    ctx = OracleContext(s.id, "blocksworld", s.init, None, goal_text=s.goal_text)
    r = MockOracleAdapter().complete(build_prompt(2, "blocksworld", goal_text=s.goal_text, context=ctx))
    assert parse_state_format("blocksworld", r.text) == s.goal


# faults

def test_parse_fault():
    spec = parse_fault("missing_item(apple)@1,2:0.5")
    assert (spec.kind, spec.arg, spec.rate, spec.active_stages) == ("drop_item", "apple", 0.5, frozenset({1, 2}))
    assert parse_fault("swap_tiles").active_stages == frozenset({1})
    assert str(parse_fault("fence@3")) == "fence@3"


@pytest.mark.parametrize("text", ["melt", "fence:2", "!!", "drop_item:-1"])
def test_parse_fault_errors(text):
    with pytest.raises(FaultSpecError):
        parse_fault(text)


def test_fault_rate_is_seeded():
    f = Fault(parse_fault("swap_tiles:0.5"), seed=3)
    hits = [f.applies("sliding_tile", f"s{i}") for i in range(200)]
    assert hits == [Fault(parse_fault("swap_tiles:0.5"), seed=3).applies("sliding_tile", f"s{i}") for i in range(200)]
    assert 60 < sum(hits) < 140
    assert not f.applies("blocksworld", "s0")


def test_swap_tiles_changes_two_cells():
    s = generate_scenario("sliding_tile", "easy", 1)
    text = Fault(parse_fault("swap_tiles"), 0).state_text(1, s.init, s.id)
    got = parse_state_format("sliding_tile", text)
    assert isinstance(got, TileState)
    assert sum(a != b for a, b in zip(got.cells, s.init.cells)) == 2


def test_stove_fault_in_state_and_problem():
    s = generate_scenario("kitchen", "easy", 1)
    f = Fault(parse_fault("stove_as_item"), 0)
    text = f.state_text(2, s.goal, s.id)
    assert "stove (item)" in text
    p = f.problem(s.gt_problem, s.id, "kitchen", s.goal)
    assert any(a.args[0] == "stove" for a in p.goal)


def test_fence_and_prose_problem_text():
    s = generate_scenario("blocksworld", "easy", 1)
    text = render_problem(s.gt_problem)
    fenced = Fault(parse_fault("fence"), 0).problem_text(text, s.id, "blocksworld")
    assert fenced.startswith("Here is") and strip_markup(fenced) == text.strip()
    prose = Fault(parse_fault("prose_only"), 0).problem_text(text, s.id, "blocksworld")
    assert "(define" not in prose


def test_kitchen_faults_keep_state_valid():
    for kind in ("drop_item", "relabel", "misclassify", "misplace"):
        f = Fault(parse_fault(kind), 0)
        for seed in range(10):
            s = generate_scenario("kitchen", "hard", seed)
            out = parse_state_format("kitchen", f.state_text(1, s.init, s.id))
            assert isinstance(out, KitchenState) and out != s.init
            assert serialize_state_format(out)
