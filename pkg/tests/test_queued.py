"""MCS and array-based policies: mode state machine, signalling, handoff."""

import itertools
import threading

import pytest

from cascm.params import PolicyParams, Policy
from cascm.queued import ArrayBasedCell, McsCell
from cascm.registry import NONE, ThreadRegistry

_STALE = object()  # never installed, so cas against it always fails


def reference_modes(outcomes, contention_threshold, num_ops):
    """Reference per-thread (contention_mode, mode_count) trajectory.

    Low mode counts consecutive cas failures up to the threshold; high mode
    counts cas operations (regardless of outcome) up to num_ops.
    """
    mode, count = False, 0
    states = []
    for success in outcomes:
        if mode:
            count += 1
            if count >= num_ops:
                mode, count = False, 0
        elif success:
            count = 0
        else:
            count += 1
            if count >= contention_threshold:
                mode, count = True, 0
        states.append((mode, count))
    return states


def _drive(cell, tind, outcomes):
    """Apply a success/failure outcome sequence through read+cas pairs and
    record the observed mode state after each cas."""
    states = []
    for success in outcomes:
        observed = cell.read(tind)
        if success:
            assert cell.cas(observed, object(), tind)
        else:
            cell.cas(_STALE, object(), tind)
        states.append(cell.thread_mode(tind))
    return states


@pytest.mark.parametrize("cell_cls", [McsCell, ArrayBasedCell])
@pytest.mark.parametrize("ct,num_ops", [(2, 3), (3, 2)])
def test_mode_machine_exhaustive_short(cell_cls, ct, num_ops):
    params = PolicyParams(contention_threshold=ct, num_ops=num_ops,
                          max_wait_ms=0.05)
    for length in range(1, 8):
        for outcomes in itertools.product([True, False], repeat=length):
            reg = ThreadRegistry(2)
            tind = reg.register(bind=False)
            cell = cell_cls(object(), params, reg)
            assert _drive(cell, tind, outcomes) == \
                reference_modes(outcomes, ct, num_ops)


def test_mode_machine_threshold_boundary():
    # ct-1 failures then a success must stay in low mode with a reset count
    params = PolicyParams(contention_threshold=3, num_ops=5, max_wait_ms=0.05)
    reg = ThreadRegistry(2)
    tind = reg.register(bind=False)
    cell = McsCell(object(), params, reg)
    states = _drive(cell, tind, [False, False, True])
    assert states == [(False, 1), (False, 2), (False, 0)]


def test_mcs_queue_publish_and_notify():
    reg = ThreadRegistry(4)
    a = reg.register(bind=False)
    b = reg.register(bind=False)
    params = PolicyParams(max_wait_ms=0.05)
    cell = McsCell(object(), params, reg)
    cell._record(a).contention_mode = True
    cell._record(b).contention_mode = True

    observed_a = cell.read(a)          # a becomes queue tail, no predecessor
    assert cell._tail.get() == a
    cell.read(b)                       # b queues behind a, expires unnotified
    assert cell._tail.get() == b
    assert cell._record(a).next.get() == b
    assert not cell._record(b).notify.get()

    cell.cas(observed_a, object(), a)  # a retires, signalling its successor
    assert cell._record(b).notify.get()

    cell.cas(cell._get(), object(), b)  # b finishes its pair; queue drains
    assert cell._tail.get() == NONE


def test_mcs_retire_without_successor_resets_tail():
    reg = ThreadRegistry(2)
    tind = reg.register(bind=False)
    cell = McsCell(object(), PolicyParams(max_wait_ms=0.05), reg)
    cell._record(tind).contention_mode = True
    observed = cell.read(tind)
    assert cell._tail.get() == tind
    assert cell.cas(observed, object(), tind)
    assert cell._tail.get() == NONE


def _ab_with_owner(owner, waiters, num_ops=4, literal=False):
    reg = ThreadRegistry(16)
    params = PolicyParams(contention_threshold=2, num_ops=num_ops,
                          max_wait_ms=0.05)
    cell = ArrayBasedCell(object(), params, reg, literal_handoff=literal)
    rec = cell._record(owner)
    rec.contention_mode = True
    rec.mode_count = num_ops - 1  # next cas retires the owner
    cell._owner.set(owner)
    for w in waiters:
        cell._record(w).request.set(True)
    return cell


def test_ab_handoff_scans_past_own_slot():
    # waiters at 3 and 7 around owner 5: the circular scan starting at 6
    # must admit 7, not 3
    cell = _ab_with_owner(5, [3, 7])
    observed = cell.read(5)
    cell.cas(observed, object(), 5)
    assert cell._owner.get() == 7
    assert not cell._record(7).request.get()   # admitted waiter is released
    assert cell._record(3).request.get()       # the other keeps waiting
    assert cell.thread_mode(5) == (False, 0)


def test_ab_handoff_wraps_around():
    cell = _ab_with_owner(5, [3])
    observed = cell.read(5)
    cell.cas(observed, object(), 5)
    assert cell._owner.get() == 3
    assert not cell._record(3).request.get()


def test_ab_retire_without_waiters_frees_ownership():
    cell = _ab_with_owner(5, [])
    observed = cell.read(5)
    cell.cas(observed, object(), 5)
    assert cell._owner.get() == NONE


def test_ab_literal_handoff_leaves_waiter_flag_set():
    cell = _ab_with_owner(5, [7], literal=True)
    cell._record(5).request.set(True)  # observe which flag the handoff clears
    observed = cell.read(5)
    cell.cas(observed, object(), 5)
    assert cell._owner.get() == 7
    assert cell._record(7).request.get()       # transcribed form: not cleared
    assert not cell._record(5).request.get()   # owner cleared its own flag


def test_ab_waiter_acquires_free_ownership():
    reg = ThreadRegistry(4)
    tind = reg.register(bind=False)
    cell = ArrayBasedCell(object(), PolicyParams(max_wait_ms=0.5), reg)
    cell._record(tind).contention_mode = True
    cell.read(tind)  # ownership is free, so the waiter claims it at once
    assert cell._owner.get() == tind
    assert not cell._record(tind).request.get()


@pytest.mark.parametrize("cell_cls", [McsCell, ArrayBasedCell])
def test_concurrent_counter_is_exact(cell_cls):
    class Box:
        __slots__ = ("v",)

        def __init__(self, v):
            self.v = v

    reg = ThreadRegistry(8)
    # low threshold and short bursts exercise both modes under contention
    params = PolicyParams(contention_threshold=2, num_ops=50, max_wait_ms=0.2)
    cell = cell_cls(Box(0), params, reg)
    per_thread = 2000
    n = 4
    barrier = threading.Barrier(n)

    def bump():
        with reg.registered() as tind:
            barrier.wait()
            done = 0
            while done < per_thread:
                box = cell.read(tind)
                if cell.cas(box, Box(box.v + 1), tind):
                    done += 1

    threads = [threading.Thread(target=bump) for _ in range(n)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert cell._get().v == n * per_thread
