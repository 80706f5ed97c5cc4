import pytest

from cascm.timing import calibrate


@pytest.fixture(scope="session", autouse=True)
def _calibrated():
    # warm the spin calibration once so timing assertions are stable
    calibrate()
