import math

import numpy as np
import pytest

from projcons import build_laplacian
from projcons.invariants import match_multisets, run_checks


def test_match_multisets():
    assert match_multisets([1, 2, 2j], [2j + 1e-9, 1, 2]) < 1e-8
    assert match_multisets([1, 1], [1, 2]) == pytest.approx(1.0)
    assert math.isinf(match_multisets([1], [1, 2]))


@pytest.mark.parametrize("A", [
    [[0, 1], [1, 0]],
    [[0, 1], [0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 2, 0], [0, 0, 1], [1, 0, 0]],
])
def test_small_graphs_pass_every_check(A):
    checks = run_checks(build_laplacian(np.array(A)))
    assert [c.name for c in checks if not c.passed] == []


def test_seven_exact_and_float(seven, seven_float):
    for sys in (seven, seven_float):
        failed = [c.name for c in run_checks(sys) if not c.passed]
        assert failed == []
