"""The eight acceptance criteria at full size; one PASS/FAIL line each."""

import pytest

from frobsplit.acceptance import AcceptanceConfig, CRITERIA, run_criterion

RUNTIME_LIMITS = {1: 60.0, 5: 600.0, 8: 60.0}


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number, capsys):
    result = run_criterion(number, AcceptanceConfig())
    with capsys.disabled():
        print(f"\n{result.line()}")
    assert result.passed, result.details
    if number in RUNTIME_LIMITS:
        assert result.seconds < RUNTIME_LIMITS[number]
