"""One test per acceptance criterion; each prints its pass/fail line."""

import pytest

from renyi_bounds.acceptance import CRITERIA


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"{c.number:02d}" for c in CRITERIA])
def test_criterion(criterion, capsys):
    result = criterion()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
