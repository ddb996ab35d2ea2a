"""Template English goal descriptions, plus a reader for the blocksworld phrasing."""

from __future__ import annotations

import re

from ..domains import BlocksState, KitchenState, ShoeboxState, TileState, UnparseableState
from ..domains.sliding_tile import BLANK

_PREPOSITION = {"sink": "in"}


def _join(parts: list[str]) -> str:
    if len(parts) == 1:
        return parts[0]
    if len(parts) == 2:
        return f"{parts[0]} and {parts[1]}"
    return ", ".join(parts[:-1]) + f", and {parts[-1]}"


def _blocks_facts(s: BlocksState) -> list[str]:
    facts = []
    for stack in s.stacks:
        facts.append(f"{stack[0]} is on the table")
        facts.extend(f"{upper} is on {lower}" for lower, upper in zip(stack, stack[1:]))
    if s.holding:
        facts.append(f"the arm holds {s.holding}")
    return facts


def kitchen_phrase(name: str, itype: str, detail: str) -> str:
    noun = name.replace("_", " ")
    if detail and detail not in name:
        return f"the {detail.replace('_', ' ')} {noun}"
    if itype not in name and itype != "item":
        return f"the {noun} {itype.replace('_', ' ')}"
    return f"the {noun}"


def goal_text_for(s) -> str:
    if isinstance(s, BlocksState):
        facts = _blocks_facts(s)
        if len(facts) == 1:
            return facts[0] + "."
        return "Stack the blocks so that: " + "; ".join(facts) + "."
    if isinstance(s, TileState):
        rows = [" ".join("_" if v == BLANK else str(v) for v in row) for row in s.rows()]
        bx, by = s.blank
        return (f"Arrange the {s.width}x{s.height} puzzle so that the rows read, from the top: "
                + " / ".join(rows) + f". The blank ends in row {by}, column {bx}.")
    if isinstance(s, KitchenState):
        parts = [
            f"{kitchen_phrase(it.name, it.type, it.detail)} {_PREPOSITION.get(it.location, 'on')} the {it.location}"
            for it in s.items
        ]
        return "Put " + _join(parts) + "."
    if isinstance(s, ShoeboxState):
        parts = [f"{e.name} in {e.location}" for e in s.elements if e.location]
        loose = [e.name for e in s.elements if e.location is None]
        text = "Place " + _join(parts) + "." if parts else "Take every element out."
        if loose:
            text += " Leave " + _join(loose) + " out of the bins."
        return text
    raise TypeError(f"not a scene state: {type(s).__name__}")


_FACT = re.compile(r"^(?:the\s+)?(\w+)(?:\s+block)?\s+is\s+on\s+(?:top\s+of\s+)?(?:the\s+)?(\w+)(?:\s+block)?$")
_HOLD = re.compile(r"^the\s+arm\s+holds\s+(?:the\s+)?(\w+)(?:\s+block)?$")
_MOVE = re.compile(
    r"^(?:move|put|place|stack)\s+(?:the\s+)?(\w+)(?:\s+block)?\s+(?:onto|on\s+top\s+of|on)\s+(?:the\s+)?(\w+)(?:\s+block)?$"
)


def _unstack_above(stacks: list[list[str]], block: str) -> list[str]:
    """Move everything above block to the table; return block's stack."""
    stack = next(s for s in stacks if block in s)
    while stack[-1] != block:
        stacks.append([stack.pop()])
    return stack


def blocks_goal_from_text(text: str, init: BlocksState) -> BlocksState:
    """Read a blocksworld goal sentence against the blocks of init.

    Accepts the generator's "Stack the blocks so that: a; b." form, which
    fixes the whole goal, or move instructions ("move the red block onto
    the blue block") applied to init one clause at a time.
    """
    body = text.strip().lower().rstrip(".")
    if ":" in body:
        body = body.split(":", 1)[1]
    clauses = [c.strip() for c in re.split(r"[;.]|\band then\b|\bthen\b", body) if c.strip()]
    if not clauses:
        raise UnparseableState("empty goal text")
    blocks = set(init.blocks)
    if all(_FACT.match(c) or _HOLD.match(c) for c in clauses):
        below: dict[str, str] = {}
        holding = None
        for c in clauses:
            m = _HOLD.match(c)
            if m:
                holding = m.group(1)
                continue
            upper, lower = _FACT.match(c).groups()
            below[upper] = lower
        unknown = (set(below) | {v for v in below.values() if v != "table"} | ({holding} if holding else set())) - blocks
        if unknown:
            raise UnparseableState(f"goal mentions unknown blocks {sorted(unknown)}")
        stacks = []
        for b in sorted(b for b, lower in below.items() if lower == "table"):
            stack = [b]
            while True:
                nxt = [u for u, lower in below.items() if lower == stack[-1]]
                if len(nxt) != 1:
                    break
                stack.append(nxt[0])
            stacks.append(tuple(stack))
        goal = BlocksState(tuple(stacks), holding)
        if goal.blocks != init.blocks:
            raise UnparseableState("goal does not place every block exactly once")
        return goal
    stacks = [list(s) for s in init.stacks]
    for c in clauses:
        m = _MOVE.match(c)
        if m is None:
            raise UnparseableState(f"cannot read goal clause {c!r}")
        block, dest = m.groups()
        if block not in blocks or (dest != "table" and dest not in blocks) or block == dest:
            raise UnparseableState(f"bad move {c!r}")
        _unstack_above(stacks, block).pop()
        if dest == "table":
            stacks.append([block])
        else:
            _unstack_above(stacks, dest).append(block)
        stacks = [s for s in stacks if s]
    return BlocksState(tuple(tuple(s) for s in stacks))
