"""Construction of a contention-managed cell for a given policy."""

from __future__ import annotations

from .backoff import ConstantBackoffCell, ExpBackoffCell, TimeSliceCell
from .cell import AtomicCell
from .params import PolicyParams, Policy
from .queued import ArrayBasedCell, McsCell
from .registry import ThreadRegistry


def make_cell(policy: Policy, initial=None,
              params: PolicyParams | None = None,
              registry: ThreadRegistry | None = None,
              seed: int | None = None) -> AtomicCell:
    """Build a cell running the requested contention-management policy.

    registry is required by every policy with per-thread state (all but
    native and constant backoff).  seed feeds the time-slice policy's
    per-thread generators and is ignored elsewhere.
    """
    policy = Policy(policy)
    params = params or PolicyParams()
    if policy is Policy.NATIVE:
        return AtomicCell(initial)
    if policy is Policy.CB:
        return ConstantBackoffCell(initial, params)
    if registry is None:
        raise ValueError(f"policy {policy.value} requires a thread registry")
    if policy is Policy.EXP:
        return ExpBackoffCell(initial, params, registry)
    if policy is Policy.TS:
        return TimeSliceCell(initial, params, registry, seed=seed)
    if policy is Policy.MCS:
        return McsCell(initial, params, registry)
    return ArrayBasedCell(initial, params, registry)
