import math

import numpy as np
import pytest
from scipy.special import sici

from pvlab.special import si


def test_matches_scipy_on_wide_range():
    x = np.concatenate([np.linspace(-50, 50, 20001), np.geomspace(1e-8, 1e7, 2000)])
    assert np.max(np.abs(si(x) - sici(x)[0])) < 1e-13


def test_branch_boundary_continuity():
    x = np.array([4.0 - 1e-12, 4.0, 4.0 + 1e-12])
    v = si(x)
    assert np.max(np.abs(np.diff(v))) < 1e-11


def test_scalar_and_odd():
    assert isinstance(si(1.0), float)
    assert si(0.0) == 0.0
    assert si(-2.5) == -si(2.5)
    assert si(1e9) == pytest.approx(math.pi / 2, abs=1e-9)
