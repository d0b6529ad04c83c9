"""Shared helpers: deterministic smooth random fields and states."""

import numpy as np
import pytest

from radhydro.spectral import Grid, SpectralField, VectorField


def smooth_field(grid, rng, kmax=3, amp=0.1):
    """Band-limited random field: a handful of low modes, fixed by rng."""
    coords = grid.coordinates()
    vals = np.zeros(grid.shape)
    for _ in range(4):
        k = rng.integers(-kmax, kmax + 1, grid.n_dims)
        phase = sum(ki * xi for ki, xi in zip(k, coords))
        vals += amp * (rng.normal() * np.sin(phase) + rng.normal() * np.cos(phase))
    return SpectralField.from_values(grid, vals)


def smooth_vector(grid, rng, kmax=3, amp=0.1):
    return VectorField([smooth_field(grid, rng, kmax, amp) for _ in range(grid.n_dims)])


@pytest.fixture
def grid1d():
    return Grid(n_dims=1, points_per_dim=64)


@pytest.fixture
def grid2d():
    return Grid(n_dims=2, points_per_dim=32)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
