"""Release gate: runs every acceptance criterion at its pinned tolerance."""

import pytest

from gromon.acceptance import CRITERIA


@pytest.mark.parametrize("label,criterion", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(label, criterion):
    result = criterion()
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] {label}: {result.detail} ({result.seconds:.2f}s)")
    assert result.passed, f"{label}: {result.detail}"
