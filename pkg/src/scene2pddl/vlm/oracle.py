"""Mock adapter that answers from ground truth carried on the request context."""

from __future__ import annotations

import threading

from ..domains import BlocksState, DomainId, build_problem, serialize_state_format
from ..pddl import render_problem
from .faults import Fault, FaultSpec
from .types import AdapterError, ChatRequest, ChatResponse


class MockOracleAdapter:
    name = "oracle"

    def __init__(self, fault: FaultSpec | None = None, fault_seed: int = 0, supports_vision: bool = True):
        self.fault = Fault(fault, fault_seed) if fault is not None else None
        self.supports_vision = supports_vision
        self.calls = 0
        self._lock = threading.Lock()

    def _goal(self, ctx):
        if ctx.gt_goal is not None:
            return ctx.gt_goal
        if ctx.goal_text and isinstance(ctx.gt_init, BlocksState):
            from ..scenario.text import blocks_goal_from_text

            return blocks_goal_from_text(ctx.goal_text, ctx.gt_init)
        raise AdapterError("NO_CONTEXT", "oracle has no goal state for this request")

    def _state_text(self, stage: int, state, sid: str) -> str:
        if self.fault is None:
            return serialize_state_format(state)
        return self.fault.state_text(stage, state, sid)

    def complete(self, req: ChatRequest) -> ChatResponse:
        with self._lock:
            self.calls += 1
        ctx = req.context
        if ctx is None:
            raise AdapterError("NO_CONTEXT", "oracle requests need a ground-truth context")
        if req.images and not self.supports_vision:
            raise AdapterError("UNSUPPORTED_INPUT", "adapter does not accept images")
        domain = DomainId(ctx.domain)
        if req.stage == 1:
            text = self._state_text(1, ctx.gt_init, ctx.scenario_id)
        elif req.stage == 2:
            text = self._state_text(2, self._goal(ctx), ctx.scenario_id)
        elif req.stage == 3:
            init = ctx.init if ctx.init is not None else ctx.gt_init
            goal = ctx.goal if ctx.goal is not None else self._goal(ctx)
            problem = build_problem(init, goal, ctx.scenario_id)
            if self.fault is not None:
                problem = self.fault.problem(problem, ctx.scenario_id, domain, goal)
            text = render_problem(problem)
            if self.fault is not None:
                text = self.fault.problem_text(text, ctx.scenario_id, domain)
        else:
            raise AdapterError("MALFORMED_RESPONSE", f"unknown stage {req.stage}")
        prompt_tokens = sum(len(getattr(p, "text", "")) for p in req.user_parts) // 4
        return ChatResponse(text, prompt_tokens, len(text) // 4, 0.0)
