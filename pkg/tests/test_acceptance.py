"""Acceptance gate: every verification criterion must pass at its stated
tolerance and runtime budget.

Each criterion prints one ``[PASS]``/``[FAIL]`` line (run pytest with ``-s``
or ``-v`` to see them live); the same checks back the ``decaylab verify``
subcommand.  Expensive bundles (the long nonlinear runs) are computed once
and shared across the criteria that consume them.
"""

import pytest

from decaylab.verification import criterion_names, run_criterion


@pytest.mark.parametrize("name", criterion_names())
def test_acceptance_criterion(name):
    result = run_criterion(name)
    print(result.line())
    assert result.passed, result.line()
