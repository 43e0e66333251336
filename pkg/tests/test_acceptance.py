"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import pytest

from catswap.acceptance import CRITERIA

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion):
    result = criterion()
    line = f"[{'PASS' if result.passed else 'FAIL'}] {result.number}. {result.title}: {result.detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.passed, line
