"""Calibrated busy-waiting.

All contention-management policies express their waiting times in
milliseconds, but waiting itself is done by running a plain CPU-bound spin
loop for a number of iterations.  The iteration count per millisecond is
measured once per process against the monotonic clock, which makes the
millisecond-denominated parameter presets portable across machines.

Nothing here blocks in the scheduler sense or touches shared state.
"""

from __future__ import annotations

import threading
import time

# iterations of _spin() per millisecond; None until calibrated
_iters_per_ms: float | None = None
_calibration_lock = threading.Lock()

# spin length used while measuring; long enough to dominate timer overhead
_CALIBRATION_ITERS = 2_000_000
_MIN_CALIBRATION_MS = 5.0


def _spin(n: int) -> None:
    """Burn CPU for n loop iterations."""
    while n > 0:
        n -= 1


def calibrate(force: bool = False) -> float:
    """Measure and cache the spin rate, returning iterations per millisecond.

    Runs at most once per process unless force is set.  Thread-safe.
    """
    global _iters_per_ms
    if _iters_per_ms is not None and not force:
        return _iters_per_ms
    with _calibration_lock:
        if _iters_per_ms is not None and not force:
            return _iters_per_ms
        iters = _CALIBRATION_ITERS
        while True:
            start = time.perf_counter()
            _spin(iters)
            elapsed_ms = (time.perf_counter() - start) * 1e3
            if elapsed_ms >= _MIN_CALIBRATION_MS:
                break
            iters *= 2
        # re-measure a few warm passes and keep the median rate
        rates = []
        sample_iters = max(1, int(iters * _MIN_CALIBRATION_MS / elapsed_ms))
        for _ in range(5):
            start = time.perf_counter()
            _spin(sample_iters)
            rates.append(sample_iters / ((time.perf_counter() - start) * 1e3))
        rates.sort()
        _iters_per_ms = rates[len(rates) // 2]
        return _iters_per_ms


def spin_iters(amount_ms: float) -> int:
    """Convert a millisecond amount into an equivalent spin iteration count."""
    if amount_ms <= 0:
        return 0
    return int(amount_ms * calibrate())


def calibrated_wait(amount_ms: float) -> None:
    """Busy-wait for approximately amount_ms milliseconds.

    Pure spin: no locks, no syscalls, no scheduler blocking.  A zero or
    negative amount returns immediately.
    """
    if amount_ms <= 0:
        return
    _spin(int(amount_ms * calibrate()))


def monotonic_ns() -> int:
    """Monotonic nanosecond clock used for time-slice arithmetic."""
    return time.monotonic_ns()
