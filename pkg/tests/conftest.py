"""Shared fixtures: small random fields and a tiny synthetic series."""

import numpy as np
import pytest

from tvex.field import FieldSeries, ScalarField3D
from tvex.morse import CriticalPoint


def random_field(rng, dims, time_index=0):
    n = dims[0] * dims[1] * dims[2]
    return ScalarField3D(
        dims=dims,
        origin=np.zeros(3),
        spacing=np.ones(3),
        values=rng.uniform(0.0, 1.0, n),
        time_index=time_index,
    )


def random_maxima(rng, n, t):
    """Synthetic maxima with plausible attribute ranges."""
    out = []
    for i in range(n):
        out.append(
            CriticalPoint(
                id=(t << 32) | i,
                index=3,
                coords=rng.uniform(-1.0, 1.0, 3),
                value=float(rng.uniform(0.5, 2.0)),
                pers=float(rng.uniform(0.05, 1.0)),
                eta=float(rng.uniform(0.1, 3.0)),
                vertex=i,
                t=t,
            )
        )
    return out


def two_blob_series(steps=4, dims=(12, 12, 12)):
    """Two Gaussian blobs drifting toward each other; used for smoke tests."""
    nx, ny, nz = dims
    origin = np.array([-1.0, -1.0, -1.0])
    spacing = np.array([2.0 / (nx - 1), 2.0 / (ny - 1), 2.0 / (nz - 1)])
    xs = origin[0] + spacing[0] * np.arange(nx)
    ys = origin[1] + spacing[1] * np.arange(ny)
    zs = origin[2] + spacing[2] * np.arange(nz)
    Z, Y, X = np.meshgrid(zs, ys, xs, indexing="ij")
    fields = []
    for t in range(1, steps + 1):
        sep = 0.6 - 0.1 * (t - 1)
        vals = np.zeros_like(X)
        for cy in (-sep, sep):
            d2 = X**2 + (Y - cy) ** 2 + Z**2
            vals += np.exp(-d2 / (2 * 0.25**2))
        fields.append(
            ScalarField3D(
                dims=dims,
                origin=origin,
                spacing=spacing,
                values=vals.ravel(),
                time_index=t,
            )
        )
    return FieldSeries(fields=fields)


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance-criterion lines at the end of the run."""
    try:
        import test_acceptance
    except ImportError:
        return
    lines = getattr(test_acceptance, "CRITERION_LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)


@pytest.fixture(scope="session")
def small_series():
    return two_blob_series()
