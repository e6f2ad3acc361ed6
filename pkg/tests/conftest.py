"""Shared fixtures and analytic oracles."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from toa import asymptotics
from toa.oscquad import choose_grid
from toa.packets import (
    Direction,
    GaussianComponent,
    PhysicalConstants,
    WavePacketSpec,
    build_amplitude,
)

# canonical single Gaussian
P0, DP, X0 = 1.0, 0.05, -10.0


def gaussian_psi_p(p, p0=P0, dp=DP, x0=X0, hbar=1.0):
    """Analytic momentum amplitude of a free Gaussian with origin ``x0``."""
    p = np.asarray(p, dtype=float)
    env = (2 * math.pi * dp**2) ** -0.25 * np.exp(-((p - p0) ** 2) / (4 * dp**2))
    return env * np.exp(-1j * p * x0 / hbar)


def gaussian_psi_x(x, tau, p0=P0, dp=DP, x0=X0, hbar=1.0, m=1.0):
    """Closed-form free evolution of the same Gaussian in position space."""
    A = 1 / (4 * dp**2) + 1j * tau / (2 * m * hbar)
    B = p0 / (2 * dp**2) + 1j * (x - x0) / hbar
    C = -(p0**2) / (4 * dp**2)
    pre = (2 * math.pi * dp**2) ** -0.25 * (2 * math.pi * hbar) ** -0.5
    return pre * cmath.sqrt(math.pi / A) * cmath.exp(B * B / (4 * A) + C)


def gaussian_spec(p0=P0, dp=DP, x0=X0, direction=Direction.PLUS) -> WavePacketSpec:
    return WavePacketSpec((GaussianComponent(1.0, p0, dp, x0),), direction)


def amplitude_for(spec, tau_max, X, c=None):
    c = c or PhysicalConstants()
    return build_amplitude(spec, choose_grid(spec, tau_max, X, c), c)


@pytest.fixture(scope="session")
def constants():
    return PhysicalConstants()


@pytest.fixture(scope="session")
def canonical_spec():
    return gaussian_spec()


@pytest.fixture(scope="session")
def canonical(canonical_spec):
    """Canonical Gaussian on a grid good for |tau| <= 120 at |X| <= 5."""
    return amplitude_for(canonical_spec, 120.0, 5.0)


@pytest.fixture(scope="session")
def demo_params():
    return asymptotics.TwoPacketParams.from_ratio(3.0, 1.0, 10.0, 0.1)


@pytest.fixture(scope="session")
def interference(demo_params):
    return amplitude_for(demo_params.spec(), 60.0, 5.0)
