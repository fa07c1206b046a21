"""Every acceptance criterion at its pinned tolerance.

Criteria 1, 4 and 7 are expected to fail; the reasons are recorded alongside
the measured values in the decisions ledger.
"""

import pytest

from anharmonic.verify import CHECKS, run_check
from conftest import ACCEPTANCE_LINES

# wall-clock budgets in seconds
BUDGET = {1: 1, 2: 10, 3: 60, 4: 300, 5: 1, 6: 1, 7: 10, 8: 1, 9: 1, 10: 30}


@pytest.mark.parametrize("number", range(1, len(CHECKS) + 1))
def test_criterion(number):
    result = run_check(number)
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.seconds < BUDGET[number], f"over the {BUDGET[number]} s budget"
    assert result.passed, result.detail
