"""Atomic primitives and the native contention-managed cell.

The cell stores an opaque reference supplied by the caller and never looks
inside it.  Comparison is by identity, matching reference-CAS semantics.
A successful cas is a full barrier (lock-protected read-modify-write);
read is a plain load, which under the runtime's memory model observes all
writes published by the preceding successful cas.
"""

from __future__ import annotations

import threading

from .params import Policy
from .registry import NONE


class AtomicInt:
    """Lock-backed atomic integer with exchange and compare-and-set."""

    __slots__ = ("_value", "_lock")

    def __init__(self, value: int = 0):
        self._value = value
        self._lock = threading.Lock()

    def get(self) -> int:
        return self._value

    def set(self, value: int) -> None:
        self._value = value

    def get_and_set(self, value: int) -> int:
        with self._lock:
            old = self._value
            self._value = value
            return old

    def compare_and_set(self, expect: int, update: int) -> bool:
        with self._lock:
            if self._value == expect:
                self._value = update
                return True
            return False


class AtomicBool:
    """Atomic boolean flag; plain loads/stores are atomic in this runtime."""

    __slots__ = ("_value",)

    def __init__(self, value: bool = False):
        self._value = value

    def get(self) -> bool:
        return self._value

    def set(self, value: bool) -> None:
        self._value = value


class AtomicCell:
    """Atomically updatable reference cell: the native (unmanaged) policy.

    Policy cells subclass this and wrap read/cas with waiting logic; the
    underlying primitives stay available as _get / _compare_and_set.
    """

    __slots__ = ("_value", "_lock")

    policy = Policy.NATIVE

    def __init__(self, initial=None):
        self._value = initial
        self._lock = threading.Lock()

    def _get(self):
        return self._value

    def _compare_and_set(self, old, new) -> bool:
        with self._lock:
            if self._value is old:
                self._value = new
                return True
            return False

    def read(self, tind: int | None = None):
        """Current cell value.  tind is accepted for interface uniformity."""
        return self._value

    def cas(self, old, new, tind: int | None = None) -> bool:
        """Install new iff the cell still holds old (identity comparison)."""
        return self._compare_and_set(old, new)


__all__ = ["AtomicInt", "AtomicBool", "AtomicCell", "NONE"]
