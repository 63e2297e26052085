"""Acceptance suite: every verification check must pass.

Each test runs one numbered check from spqm.verify at its stated
parameters and tolerances and reports the one-line detail.  The same
checks back the `spqm verify` CLI subcommand.
"""

import pytest

from spqm import verify

_IDS = [f"{number:02d}-{name}" for number, name, _ in verify.CHECKS]


@pytest.mark.parametrize("number,name",
                         [(number, name) for number, name, _ in verify.CHECKS],
                         ids=_IDS)
def test_criterion(number, name):
    result = verify.run_check(number)
    status = "PASS" if result.passed else "FAIL"
    line = f"[{status}] {number:2d} {name}: {result.detail}"
    print(line)
    assert result.passed, line
