"""Thread registration.

Policies that keep per-thread state index it through a small integer slot
obtained by registering with a ThreadRegistry.  The slot index is stored in
thread-local storage so policy code can pick it up implicitly, and every
policy operation also accepts the index as an explicit argument for callers
that want to skip the thread-local lookup in hot loops.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager

#: Sentinel slot value meaning "no thread".
NONE = -1

DEFAULT_MAX_THREADS = 128


class RegistryError(Exception):
    """Base class for registration misuse."""


class RegistryFullError(RegistryError):
    """All registry slots are occupied."""


class RegistrationError(RegistryError):
    """Double registration, unregistered access, or foreign deregistration."""


class ThreadRegistry:
    """Fixed-capacity allocator of per-thread slot indices.

    Safe under arbitrary concurrent register/deregister calls.  A freed slot
    may be re-issued to any thread.
    """

    def __init__(self, max_threads: int = DEFAULT_MAX_THREADS):
        if max_threads < 1:
            raise ValueError("max_threads must be >= 1")
        self.max_threads = max_threads
        self._slots = [False] * max_threads
        self._reg_n = 0
        self._lock = threading.Lock()
        self._local = threading.local()

    @property
    def reg_n(self) -> int:
        """Number of currently registered threads."""
        return self._reg_n

    def register(self, bind: bool = True) -> int:
        """Claim a free slot and return its index.

        With bind=True (the default) the index is also recorded in
        thread-local storage and the calling thread must not already be
        registered.  bind=False claims a raw slot without touching
        thread-local state; harnesses use it to drive several logical
        threads from one OS thread.
        """
        if bind and getattr(self._local, "index", None) is not None:
            raise RegistrationError("calling thread is already registered")
        with self._lock:
            for i, taken in enumerate(self._slots):
                if not taken:
                    self._slots[i] = True
                    self._reg_n += 1
                    break
            else:
                raise RegistryFullError(
                    f"all {self.max_threads} registry slots are in use"
                )
        if bind:
            self._local.index = i
        return i

    def deregister(self, index: int | None = None) -> None:
        """Release a slot.

        Without an explicit index, releases the calling thread's bound slot
        and clears its thread-local binding.  With an explicit index,
        releases that slot (harness use, paired with register(bind=False)).
        """
        bound = getattr(self._local, "index", None)
        if index is None:
            if bound is None:
                raise RegistrationError("calling thread is not registered")
            index = bound
        if not (0 <= index < self.max_threads):
            raise RegistrationError(f"slot {index} out of range")
        with self._lock:
            if not self._slots[index]:
                raise RegistrationError(f"slot {index} is not registered")
            self._slots[index] = False
            self._reg_n -= 1
        if bound == index:
            self._local.index = None

    def current_index(self) -> int:
        """Return the calling thread's bound slot index."""
        index = getattr(self._local, "index", None)
        if index is None:
            raise RegistrationError("calling thread is not registered")
        return index

    @contextmanager
    def registered(self):
        """Context manager form: register on entry, deregister on exit."""
        index = self.register()
        try:
            yield index
        finally:
            self.deregister(index)

    def live_indices(self) -> list[int]:
        """Indices of occupied slots (quiescent diagnostic)."""
        with self._lock:
            return [i for i, taken in enumerate(self._slots) if taken]
