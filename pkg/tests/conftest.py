import sys
from pathlib import Path

SRC_DIR = Path(__file__).resolve().parents[1] / "src"
if str(SRC_DIR) not in sys.path:
    sys.path.insert(0, str(SRC_DIR))

import numpy as np
import pytest

from tovkit import IntegrationOptions


@pytest.fixture
def fast_opts():
    """Looser tolerance and a coarse grid for tests that only need M and R."""
    return IntegrationOptions(rtol=1e-8, grid_points=128)


def nonuniform_derivative(x, y):
    """Three-point central differences on a nonuniform grid (interior only)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x[1:-1] - x[:-2]
    D = x[2:] - x[1:-1]
    return (y[2:] * d**2 - y[:-2] * D**2 + y[1:-1] * (D**2 - d**2)) / (d * D * (d + D))


def loglog_slope(x, y):
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    design = np.column_stack([np.ones_like(lx), lx])
    coeffs, *_ = np.linalg.lstsq(design, ly, rcond=None)
    return float(coeffs[1])
