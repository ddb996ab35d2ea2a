"""Shoebox object-universe repair for elements hidden in a snapshot."""

from __future__ import annotations

from ..domains import DomainId, ShoeboxElement, ShoeboxState


class ConflictingIdentity(ValueError):
    code = "CONFLICTING_IDENTITY"


def _require_shoebox(*states) -> None:
    for s in states:
        if not isinstance(s, ShoeboxState):
            raise ValueError(f"shoebox state expected, got {DomainId(s.domain).value}")


def reconcile_objects(detected: ShoeboxState, goal: ShoeboxState) -> ShoeboxState:
    """Add goal-required elements and locations missing from the detected state.

    An element placed by the goal takes part in at least one action, so it
    must exist even if it was not seen; it enters as unplaced. Nothing that
    was detected is removed.
    """
    _require_shoebox(detected, goal)
    have = {e.name for e in detected.elements}
    extra = [ShoeboxElement(e.name, e.kind, None) for e in goal.elements if e.name not in have]
    locations = tuple(dict.fromkeys(detected.locations + goal.locations))
    if not extra and locations == detected.locations:
        return detected
    return ShoeboxState(detected.elements + tuple(extra), locations)


def merge_snapshots(obs_a: ShoeboxState, obs_b: ShoeboxState) -> ShoeboxState:
    """Union of two views; placements come from obs_a, b-only elements are unplaced."""
    _require_shoebox(obs_a, obs_b)
    kinds = {e.name: e.kind for e in obs_a.elements}
    extra = []
    for e in obs_b.elements:
        if e.name in kinds:
            if kinds[e.name] != e.kind:
                raise ConflictingIdentity(f"CONFLICTING_IDENTITY: {e.name} is a {kinds[e.name]} and a {e.kind}")
            continue
        extra.append(ShoeboxElement(e.name, e.kind, None))
    locations = tuple(dict.fromkeys(obs_a.locations + obs_b.locations))
    return ShoeboxState(obs_a.elements + tuple(extra), locations)
