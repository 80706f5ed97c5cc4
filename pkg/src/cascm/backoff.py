"""Lightweight contention-management policies: constant backoff,
exponential backoff, and time-slice concurrency limiting.

All three return exactly what the underlying native cas returned; waiting
only delays the caller, it never changes the outcome.  read delegates to
the native load in every policy here.
"""

from __future__ import annotations

import random
from math import ceil

from .cell import AtomicCell
from .params import PolicyParams, Policy
from .registry import ThreadRegistry
from .timing import calibrated_wait, monotonic_ns


def backoff_exponent(c: int, m: int, failures: int) -> int:
    """Capped exponent min(c * failures, m) of the exponential scheme."""
    return min(c * failures, m)


class ConstantBackoffCell(AtomicCell):
    """On cas failure, spin for a fixed platform-tuned time, then report
    the failure.  No per-thread state."""

    __slots__ = ("_wait_ms",)

    policy = Policy.CB

    def __init__(self, initial=None, params: PolicyParams = PolicyParams()):
        super().__init__(initial)
        self._wait_ms = params.waiting_time_ms

    def cas(self, old, new, tind: int | None = None) -> bool:
        if self._compare_and_set(old, new):
            return True
        calibrated_wait(self._wait_ms)
        return False


class ExpBackoffCell(AtomicCell):
    """Backoff that grows exponentially with consecutive cas failures.

    Each registered thread keeps a failure statistic in its own slot of a
    fixed per-cell array; the slot is single-writer, so no atomicity is
    needed on the counter itself.  A failure past the threshold waits
    2**min(c*f, m) nanoseconds; a success decays the statistic by one.
    """

    __slots__ = ("_registry", "_params", "_failures")

    policy = Policy.EXP

    def __init__(self, initial=None, params: PolicyParams = PolicyParams(),
                 registry: ThreadRegistry | None = None):
        super().__init__(initial)
        self._registry = registry or ThreadRegistry()
        self._params = params
        self._failures = [0] * self._registry.max_threads

    def failures_of(self, tind: int) -> int:
        """Current consecutive-failure statistic for a thread slot."""
        return self._failures[tind]

    def cas(self, old, new, tind: int | None = None) -> bool:
        if tind is None:
            tind = self._registry.current_index()
        if self._compare_and_set(old, new):
            if self._failures[tind] > 0:
                self._failures[tind] -= 1
            return True
        p = self._params
        f = self._failures[tind]
        self._failures[tind] = f + 1
        if f > p.exp_threshold:
            # exponent in nanoseconds, mapped through the ms-calibrated spin
            calibrated_wait((1 << backoff_exponent(p.c, p.m, f)) * 1e-6)
        return False


class TimeSliceCell(AtomicCell):
    """Concurrency limiter: after a failed cas with more than conc threads
    registered, wait out rotating time slices until a randomly drawn slice
    number comes around, admitting roughly conc threads per slice.

    Slice length is 2**slice nanoseconds on the monotonic clock.  Each
    thread slot draws from its own deterministic generator seeded from
    (cell seed, slot index).
    """

    __slots__ = ("_registry", "_conc", "_shift", "_seed", "_rngs")

    policy = Policy.TS

    def __init__(self, initial=None, params: PolicyParams = PolicyParams(),
                 registry: ThreadRegistry | None = None,
                 seed: int | None = None):
        super().__init__(initial)
        self._registry = registry or ThreadRegistry()
        self._conc = params.conc
        self._shift = params.slice
        self._seed = seed if seed is not None else random.getrandbits(63)
        self._rngs: list[random.Random | None] = [None] * self._registry.max_threads

    def _rng(self, tind: int) -> random.Random:
        rng = self._rngs[tind]
        if rng is None:
            rng = random.Random((self._seed * 0x9E3779B97F4A7C15 + tind) & ((1 << 64) - 1))
            self._rngs[tind] = rng
        return rng

    def cas(self, old, new, tind: int | None = None) -> bool:
        if self._compare_and_set(old, new):
            return True
        if tind is None:
            tind = self._registry.current_index()
        reg_n = self._registry.reg_n  # sampled once per invocation
        if reg_n > self._conc:
            slices = ceil(reg_n / self._conc)
            slice_num = self._rng(tind).randrange(slices)
            shift = self._shift
            while True:
                current = (monotonic_ns() >> shift) % slices
                if current == slice_num:
                    break
        return False
