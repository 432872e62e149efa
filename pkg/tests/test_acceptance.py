"""One test per acceptance criterion; each records a PASS/FAIL line for the run summary."""

import pytest

from lsistab import acceptance

CRITERIA = acceptance.criteria()


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number, acceptance_lines):
    result = CRITERIA[number - 1]()
    print(result.line())
    acceptance_lines.append(result.line())
    assert result.number == number
    assert result.passed, result.line()
