"""Heavyweight contention-management policies that serialize read/cas pairs
under high contention.

Both policies run each thread in one of two per-cell modes.  In
low-contention mode, read and cas pass straight through to the native cell;
hitting contention_threshold consecutive cas failures flips the thread into
high-contention mode for this cell.  In high-contention mode the threads
coordinate -- through a queue of waiters (mcs) or an ownership token with an
array scan (array-based) -- so that read/cas pairs mostly run uninterrupted,
and after num_ops cas operations the thread drops back to low-contention
mode.

Every wait is bounded by max_wait_ms on the monotonic clock, so neither
policy ever introduces a blocking dependency: a parked peer costs at most
the expiry time.
"""

from __future__ import annotations

import time

from .cell import AtomicBool, AtomicCell, AtomicInt
from .params import PolicyParams, Policy
from .registry import NONE, ThreadRegistry


class _McsRecord:
    """Per-thread queue state for one mcs-managed cell."""

    __slots__ = ("mode_count", "contention_mode", "next", "notify")

    def __init__(self):
        self.mode_count = 0
        self.contention_mode = False
        self.next = AtomicInt(NONE)      # successor's slot index
        self.notify = AtomicBool(False)  # set by the predecessor


class _AbRecord:
    """Per-thread signalling state for one array-based-managed cell."""

    __slots__ = ("mode_count", "contention_mode", "request")

    def __init__(self):
        self.mode_count = 0
        self.contention_mode = False
        self.request = AtomicBool(False)  # true while waiting to be admitted


class _QueuedCellBase(AtomicCell):
    """Shared plumbing: lazy per-thread records and mode bookkeeping."""

    __slots__ = ("_registry", "_records", "_max_wait_ns",
                 "_num_ops", "_contention_threshold")

    _record_cls: type

    def __init__(self, initial=None, params: PolicyParams = PolicyParams(),
                 registry: ThreadRegistry | None = None):
        super().__init__(initial)
        self._registry = registry or ThreadRegistry()
        self._records = [None] * self._registry.max_threads
        self._max_wait_ns = int(params.max_wait_ms * 1e6)
        self._num_ops = params.num_ops
        self._contention_threshold = params.contention_threshold

    def _record(self, tind: int):
        rec = self._records[tind]
        if rec is None:
            rec = self._record_cls()
            self._records[tind] = rec
        return rec

    def thread_mode(self, tind: int) -> tuple[bool, int]:
        """(contention_mode, mode_count) for a thread slot, for inspection."""
        rec = self._record(tind)
        return rec.contention_mode, rec.mode_count


class McsCell(_QueuedCellBase):
    """Queue-based serialization of read/cas pairs.

    A thread entering its read in high-contention mode swaps itself in as
    queue tail and, if it had a predecessor, publishes its index into the
    predecessor's successor field and waits (bounded) to be notified.  The
    matching cas either hands the notification to a published successor or
    retires from the queue.
    """

    __slots__ = ("_tail",)

    policy = Policy.MCS
    _record_cls = _McsRecord

    def __init__(self, initial=None, params: PolicyParams = PolicyParams(),
                 registry: ThreadRegistry | None = None):
        super().__init__(initial, params, registry)
        self._tail = AtomicInt(NONE)

    def read(self, tind: int | None = None):
        if tind is None:
            tind = self._registry.current_index()
        r = self._record(tind)
        if r.contention_mode:
            r.next.set(NONE)
            pred = self._tail.get_and_set(tind)
            if pred != NONE:
                self._record(pred).next.set(tind)
                notify = r.notify
                notify.set(False)
                deadline = time.perf_counter_ns() + self._max_wait_ns
                while not notify.get() and time.perf_counter_ns() < deadline:
                    pass
        return self._value

    def cas(self, old, new, tind: int | None = None) -> bool:
        ret = self._compare_and_set(old, new)
        if tind is None:
            tind = self._registry.current_index()
        r = self._record(tind)
        if r.contention_mode:
            nxt = r.next
            if nxt.get() == NONE:
                if not self._tail.compare_and_set(tind, NONE):
                    # a successor is joining; give it bounded time to appear
                    deadline = time.perf_counter_ns() + self._max_wait_ns
                    while nxt.get() == NONE and time.perf_counter_ns() < deadline:
                        pass
                    successor = nxt.get()
                    if successor != NONE:
                        self._record(successor).notify.set(True)
            else:
                successor = nxt.get()
                self._record(successor).notify.set(True)
            r.mode_count += 1
            if r.mode_count == self._num_ops:
                r.mode_count = 0
                r.contention_mode = False
        elif ret:
            r.mode_count = 0
        else:
            r.mode_count += 1
            if r.mode_count == self._contention_threshold:
                r.contention_mode = True
                r.mode_count = 0
        return ret


class ArrayBasedCell(_QueuedCellBase):
    """Ownership token with an array-scan handoff.

    At most one high-contention thread at a time owns the cell and runs its
    read/cas pairs without waiting.  Non-owners raise a request flag and
    wait (bounded) until an outgoing owner hands them the token or the
    ownership slot frees up.  An owner retiring after num_ops operations
    scans the record array circularly, starting past its own slot, and
    admits the first requester it finds.

    literal_handoff=True reproduces the handoff exactly as transcribed
    (clearing the outgoing owner's own request flag instead of the admitted
    waiter's), which never wakes the waiter before its expiry; it exists for
    study only.
    """

    __slots__ = ("_owner", "_literal_handoff")

    policy = Policy.AB
    _record_cls = _AbRecord

    def __init__(self, initial=None, params: PolicyParams = PolicyParams(),
                 registry: ThreadRegistry | None = None,
                 literal_handoff: bool = False):
        super().__init__(initial, params, registry)
        self._owner = AtomicInt(NONE)
        self._literal_handoff = literal_handoff

    def read(self, tind: int | None = None):
        if tind is None:
            tind = self._registry.current_index()
        r = self._record(tind)
        owner = self._owner
        if r.contention_mode and owner.get() != tind:
            request = r.request
            request.set(True)
            deadline = time.perf_counter_ns() + self._max_wait_ns
            while request.get() and time.perf_counter_ns() < deadline:
                if owner.get() == NONE and owner.compare_and_set(NONE, tind):
                    request.set(False)
                    break
            if request.get():
                request.set(False)
        return self._value

    def cas(self, old, new, tind: int | None = None) -> bool:
        ret = self._compare_and_set(old, new)
        if tind is None:
            tind = self._registry.current_index()
        r = self._record(tind)
        if r.contention_mode:
            r.mode_count += 1
            if r.mode_count >= self._num_ops:
                r.mode_count = 0
                r.contention_mode = False
                records = self._records
                n = len(records)
                i = (tind + 1) % n
                while i != tind:
                    rec = records[i]
                    if rec is not None and rec.request.get():
                        self._owner.set(i)
                        if self._literal_handoff:
                            r.request.set(False)
                        else:
                            rec.request.set(False)
                        return ret
                    i = (i + 1) % n
                self._owner.set(NONE)
        elif ret:
            r.mode_count = 0
        else:
            r.mode_count += 1
            if r.mode_count >= self._contention_threshold:
                r.mode_count = 0
                r.contention_mode = True
        return ret
