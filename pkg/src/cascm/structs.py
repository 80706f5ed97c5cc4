"""Lock-free stack and FIFO queue over contention-managed cells.

Every cas target -- the stack's top, the queue's head and tail, and (by
default) each queue node's next link -- goes through a cell of the policy
chosen at construction, so the structures are policy-independent in
behavior and differ only in how failed cas attempts back off.

Nodes are never recycled within a run; a retired node stays valid for any
thread still holding a reference to it (the runtime reclaims it only once
unreachable), which rules out the ABA hazard by construction.  The arena
tracks allocations and enforces an optional capacity.
"""

from __future__ import annotations

import itertools

from .cell import AtomicCell
from .factory import make_cell
from .params import PolicyParams, Policy
from .registry import ThreadRegistry


class ArenaExhaustedError(Exception):
    """Node allocation exceeded the arena capacity."""


class _Marker:
    __slots__ = ("_name",)

    def __init__(self, name):
        self._name = name

    def __repr__(self):
        return self._name


#: Returned by pop/dequeue when the structure was observed empty.
EMPTY = _Marker("EMPTY")

#: Installed into retired nodes in debug mode to trip on reuse.
POISON = _Marker("POISON")


class NodeArena:
    """Bump allocation accounting with a hard capacity.

    Only ids are handed out; node objects themselves are ordinary heap
    allocations that are never reused while reachable.
    """

    __slots__ = ("_ids", "_capacity")

    def __init__(self, capacity: int | None = None):
        self._ids = itertools.count()
        self._capacity = capacity

    def alloc_id(self) -> int:
        i = next(self._ids)  # atomic at the runtime level
        if self._capacity is not None and i >= self._capacity:
            raise ArenaExhaustedError(
                f"arena capacity {self._capacity} exhausted"
            )
        return i


class StackNode:
    __slots__ = ("item", "next")

    def __init__(self, item):
        self.item = item
        self.next = None


class TreiberStack:
    """Lock-free LIFO stack: push/pop cas the top reference."""

    def __init__(self, registry: ThreadRegistry | None = None,
                 policy: Policy = Policy.NATIVE,
                 params: PolicyParams | None = None,
                 seed: int | None = None,
                 capacity: int | None = None,
                 debug_poison: bool = False):
        self._arena = NodeArena(capacity)
        self._top = make_cell(policy, None, params, registry, seed)
        self._debug_poison = debug_poison

    def push(self, item, tind: int | None = None) -> None:
        self._arena.alloc_id()
        node = StackNode(item)
        top = self._top
        while True:
            observed = top.read(tind)
            node.next = observed
            if top.cas(observed, node, tind):
                return

    def pop(self, tind: int | None = None):
        """Remove and return the top item, or EMPTY."""
        top = self._top
        while True:
            observed = top.read(tind)
            if observed is None:
                return EMPTY
            successor = observed.next
            if top.cas(observed, successor, tind):
                if successor is POISON:
                    raise RuntimeError("stack top pointed at a retired node")
                if self._debug_poison:
                    observed.next = POISON
                return observed.item

    def snapshot_items(self) -> list:
        """Top-to-bottom items; only meaningful at a quiescent point."""
        items = []
        node = self._top._get()
        while node is not None:
            items.append(node.item)
            node = node.next
        return items

    def __len__(self) -> int:
        return len(self.snapshot_items())


class QueueNode:
    __slots__ = ("item", "next")

    def __init__(self, item, next_cell: AtomicCell):
        self.item = item
        self.next = next_cell


class MSQueue:
    """Lock-free FIFO queue with head/tail references and tail helping.

    wrap_next=False routes node next-link cas through native cells while
    keeping head and tail contention-managed, for experimentation.
    """

    def __init__(self, registry: ThreadRegistry | None = None,
                 policy: Policy = Policy.NATIVE,
                 params: PolicyParams | None = None,
                 seed: int | None = None,
                 capacity: int | None = None,
                 wrap_next: bool = True):
        self._registry = registry
        self._policy = Policy(policy)
        self._params = params
        self._seed = seed
        self._arena = NodeArena(capacity)
        self._next_policy = self._policy if wrap_next else Policy.NATIVE
        sentinel = self._new_node(None)
        self._head = make_cell(self._policy, sentinel, params, registry, seed)
        self._tail = make_cell(self._policy, sentinel, params, registry, seed)

    def _new_node(self, item) -> QueueNode:
        self._arena.alloc_id()
        next_cell = make_cell(self._next_policy, None, self._params,
                              self._registry, self._seed)
        return QueueNode(item, next_cell)

    def enqueue(self, item, tind: int | None = None) -> None:
        node = self._new_node(item)
        tail = self._tail
        while True:
            last = tail.read(tind)
            successor = last.next.read(tind)
            if last is tail.read(tind):
                if successor is None:
                    if last.next.cas(None, node, tind):
                        tail.cas(last, node, tind)
                        return
                else:
                    # help a lagging enqueuer advance the tail
                    tail.cas(last, successor, tind)

    def dequeue(self, tind: int | None = None):
        """Remove and return the oldest item, or EMPTY."""
        head = self._head
        tail = self._tail
        while True:
            first = head.read(tind)
            last = tail.read(tind)
            successor = first.next.read(tind)
            if first is head.read(tind):
                if first is last:
                    if successor is None:
                        return EMPTY
                    tail.cas(last, successor, tind)
                else:
                    value = successor.item
                    if head.cas(first, successor, tind):
                        return value

    def snapshot_items(self) -> list:
        """Front-to-back items; only meaningful at a quiescent point."""
        items = []
        node = self._head._get().next._get()
        while node is not None:
            items.append(node.item)
            node = node.next._get()
        return items

    def check_structure(self) -> None:
        """Quiescent structural invariants: tail reachable from head and
        lagging the last node by at most one link."""
        node = self._head._get()
        last = self._tail._get()
        seen_tail = False
        while node is not None:
            if node is last:
                seen_tail = True
                behind = node.next._get()
                if behind is not None and behind.next._get() is not None:
                    raise AssertionError("tail lags by more than one link")
            node = node.next._get()
        if not seen_tail:
            raise AssertionError("tail not reachable from head")

    def __len__(self) -> int:
        return len(self.snapshot_items())
