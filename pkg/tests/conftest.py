#!/usr/bin/env python3
"""
Shared pytest fixtures for the chodim test suite
"""

import os
import sys

import numpy as np
import pytest

# Add the parent directory to Python path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


@pytest.fixture
def rng():
    """Seeded generator so every test run draws the same numbers"""
    return np.random.default_rng(20240917)


@pytest.fixture
def small_grid():
    """1D grid small enough for exhaustive stepping in tests"""
    from chodim.services.cho_model import GridSpec
    return GridSpec(n=1, N=16, ell=2.0)


@pytest.fixture
def free_params(small_grid):
    """f = 0, g = 0, alpha = 1: every mode is a damped oscillator"""
    from chodim.services.cho_model import Nonlinearity, NonlinearitySpec, PhysParams, SpectralField
    return PhysParams(
        alpha=1.0,
        nonlinearity=Nonlinearity.linear(0.0),
        g=SpectralField.zeros(small_grid),
        nonlinearity_spec=NonlinearitySpec(family="linear", lam=0.0),
    )


@pytest.fixture
def cubic_params(small_grid):
    """f = u^3 with a single cosine force"""
    from chodim.services.cho_model import ForcingMode, ForcingSpec, NonlinearitySpec, build_phys_params
    forcing = ForcingSpec(modes=[ForcingMode(k=[1], amplitude=0.5, phase="cos")])
    return build_phys_params(small_grid, 0.5, NonlinearitySpec(family="cubic"), forcing)
