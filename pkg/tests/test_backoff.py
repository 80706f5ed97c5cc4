"""Constant, exponential, and time-slice policy behavior."""

import time

import pytest

from cascm.backoff import (ConstantBackoffCell, ExpBackoffCell, TimeSliceCell,
                           backoff_exponent)
from cascm.params import PolicyParams, Policy
from cascm.registry import ThreadRegistry


def _timed_cas(cell, old, new, tind=None):
    t0 = time.perf_counter()
    ok = cell.cas(old, new, tind)
    return ok, (time.perf_counter() - t0) * 1e3  # ms


def test_backoff_exponent_capped():
    assert backoff_exponent(8, 24, 0) == 0
    assert backoff_exponent(8, 24, 2) == 16
    assert backoff_exponent(8, 24, 3) == 24
    assert backoff_exponent(8, 24, 100) == 24
    assert backoff_exponent(1, 15, 7) == 7


def test_constant_backoff_outcomes_unchanged():
    a, b = object(), object()
    cell = ConstantBackoffCell(a, PolicyParams(waiting_time_ms=0.01))
    assert cell.policy is Policy.CB
    assert cell.cas(a, b)
    assert cell.read() is b
    assert not cell.cas(a, b)


def test_constant_backoff_waits_only_on_failure():
    a, b = object(), object()
    cell = ConstantBackoffCell(a, PolicyParams(waiting_time_ms=2.0))
    ok, ms = _timed_cas(cell, a, b)
    assert ok and ms < 1.0
    ok, ms = _timed_cas(cell, a, b)
    assert not ok and ms > 0.5


def test_exp_backoff_failure_statistic():
    reg = ThreadRegistry(4)
    tind = reg.register(bind=False)
    a, b = object(), object()
    # tiny waits: exponents of at most 2**5 ns
    params = PolicyParams(exp_threshold=2, c=1, m=5)
    cell = ExpBackoffCell(a, params, reg)
    assert cell.policy is Policy.EXP
    assert cell.failures_of(tind) == 0
    for expected in (1, 2, 3):
        assert not cell.cas(b, a, tind)
        assert cell.failures_of(tind) == expected
    assert cell.cas(a, b, tind)  # success decays the statistic by one
    assert cell.failures_of(tind) == 2
    assert cell.cas(b, a, tind)
    assert cell.cas(a, b, tind)
    assert cell.failures_of(tind) == 0
    assert cell.cas(b, a, tind)  # success at zero stays at zero
    assert cell.failures_of(tind) == 0
    reg.deregister(tind)


def test_exp_backoff_counters_are_per_thread():
    reg = ThreadRegistry(4)
    t0 = reg.register(bind=False)
    t1 = reg.register(bind=False)
    a = object()
    cell = ExpBackoffCell(a, PolicyParams(c=1, m=3), reg)
    cell.cas(object(), a, t0)
    cell.cas(object(), a, t0)
    assert cell.failures_of(t0) == 2
    assert cell.failures_of(t1) == 0
    reg.deregister(t0)
    reg.deregister(t1)


def test_exp_backoff_waits_past_threshold():
    reg = ThreadRegistry(2)
    tind = reg.register(bind=False)
    a = object()
    # once f exceeds the threshold the wait is 2**min(21*f, 21) ns ~ 2 ms
    params = PolicyParams(exp_threshold=2, c=21, m=21)
    cell = ExpBackoffCell(a, params, reg)
    for _ in range(3):
        ok, ms = _timed_cas(cell, object(), a, tind)
        assert not ok and ms < 1.0  # f in {0,1,2}: at or below threshold
    ok, ms = _timed_cas(cell, object(), a, tind)
    assert not ok and ms > 0.5  # f was 3 > threshold
    reg.deregister(tind)


def test_exp_backoff_uses_bound_index():
    reg = ThreadRegistry(2)
    a = object()
    cell = ExpBackoffCell(a, PolicyParams(c=1, m=3), reg)
    with reg.registered() as tind:
        assert not cell.cas(object(), a)  # implicit thread-local lookup
        assert cell.failures_of(tind) == 1


def test_time_slice_below_conc_never_waits():
    reg = ThreadRegistry(8)
    slots = [reg.register(bind=False) for _ in range(2)]
    a = object()
    cell = TimeSliceCell(a, PolicyParams(conc=2, slice=30), reg, seed=9)
    assert cell.policy is Policy.TS
    ok, ms = _timed_cas(cell, object(), a, slots[0])
    assert not ok and ms < 1.0  # reg_n == conc: the limiter stays out
    for s in slots:
        reg.deregister(s)


def test_time_slice_waits_and_returns_failure():
    reg = ThreadRegistry(8)
    slots = [reg.register(bind=False) for _ in range(4)]
    a, b = object(), object()
    # 4 threads over conc=1: 4 slices of 2**14 ns; worst wait ~ 66 us
    cell = TimeSliceCell(a, PolicyParams(conc=1, slice=14), reg, seed=9)
    assert not cell.cas(b, a, slots[0])
    assert cell.cas(a, b, slots[0])  # success path skips the limiter
    for s in slots:
        reg.deregister(s)


def test_time_slice_rng_is_deterministic_per_seed():
    reg = ThreadRegistry(8)
    params = PolicyParams(conc=1, slice=14)
    c1 = TimeSliceCell(None, params, reg, seed=42)
    c2 = TimeSliceCell(None, params, reg, seed=42)
    c3 = TimeSliceCell(None, params, reg, seed=43)
    draws1 = [c1._rng(t).randrange(1000) for t in (0, 1) for _ in range(5)]
    draws2 = [c2._rng(t).randrange(1000) for t in (0, 1) for _ in range(5)]
    draws3 = [c3._rng(t).randrange(1000) for t in (0, 1) for _ in range(5)]
    assert draws1 == draws2
    assert draws1 != draws3
    assert [c1._rng(0).randrange(1000) for _ in range(3)] != \
        [c1._rng(1).randrange(1000) for _ in range(3)]


def test_unregistered_failure_raises_for_stateful_policies():
    from cascm.registry import RegistrationError
    reg = ThreadRegistry(2)
    a = object()
    exp = ExpBackoffCell(a, PolicyParams(), reg)
    with pytest.raises(RegistrationError):
        exp.cas(object(), a)
