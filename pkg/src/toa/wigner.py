"""Wigner function of a pure state and the phase-space route to the current.

The Wigner function is built from the position-space wavefunction,

    W(x, p) = 1/(pi hbar) int dy conj(psi(x + y)) psi(x - y) exp(2 i p y / hbar),

so the flux moment ``int W(X, p) p/m dp`` is an independent check on the
momentum-space current formula.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ComputationError, SupportCoverageError
from .observables import position_moments, position_wavefunction
from .packets import MomentumAmplitude

# half-width of the correlation window, in position standard deviations
CORRELATION_SIGMAS = 12.0
# x-grid must reach this many standard deviations either side of the mean
COVERAGE_SIGMAS = 6.0
_IMAG_REL = 1e-10


def _physical_momenta(a: MomentumAmplitude) -> np.ndarray:
    return a.sign * a.nodes


def _wigner_rows(a: MomentumAmplitude, xs: np.ndarray, p_nodes: np.ndarray, tau: float) -> np.ndarray:
    c = a.constants
    mean, sigma = position_moments(a, tau)
    y_max = CORRELATION_SIGMAS * max(sigma, c.hbar / (a.grid.p_max - a.grid.p_min))
    p_top = max(float(np.max(np.abs(p_nodes))), a.grid.p_max)
    dy = math.pi * c.hbar / (2 * p_top)
    if xs.size > 1:
        dx = np.diff(xs)
        if not np.allclose(dx, dx[0], rtol=1e-9, atol=0):
            raise ValueError("x_nodes must be uniformly spaced")
        ratio = math.ceil(dx[0] / dy)
        dy = dx[0] / ratio
    else:
        ratio = 0
    k_max = math.ceil(y_max / dy)
    ks = np.arange(-k_max, k_max + 1)
    lattice = xs[0] + dy * np.arange(-k_max, (xs.size - 1) * ratio + k_max + 1)
    psi = position_wavefunction(a, lattice, tau)

    centers = k_max + ratio * np.arange(xs.size)
    corr = np.conj(psi[centers[:, None] + ks[None, :]]) * psi[centers[:, None] - ks[None, :]]
    wts = np.full(ks.size, dy)
    wts[0] = wts[-1] = 0.5 * dy
    kernel = np.exp(2j * np.outer(ks * dy, p_nodes) / c.hbar) * wts[:, None]
    w = corr @ kernel / (math.pi * c.hbar)
    scale = max(float(np.max(np.abs(w))), np.finfo(float).tiny)
    residue = float(np.max(np.abs(w.imag)))
    if residue > _IMAG_REL * scale:
        raise ComputationError(f"Wigner function has imaginary residue {residue:.2e}")
    return w.real


def wigner_function(
    a: MomentumAmplitude, x_nodes, p_nodes, tau: float = 0.0
) -> np.ndarray:
    """Wigner function on the ``x_nodes`` by ``p_nodes`` grid at time ``tau``.

    ``p_nodes`` are physical momenta (negative for a left-moving state) and
    ``x_nodes`` must be uniform. Returns an array of shape
    ``(len(x_nodes), len(p_nodes))``.

    Raises
    ------
    SupportCoverageError
        If either grid misses part of the state's phase-space support.
    """
    xs = np.atleast_1d(np.asarray(x_nodes, dtype=float))
    ps = np.atleast_1d(np.asarray(p_nodes, dtype=float))
    mean, sigma = position_moments(a, tau)
    if xs[0] > mean - COVERAGE_SIGMAS * sigma or xs[-1] < mean + COVERAGE_SIGMAS * sigma:
        raise SupportCoverageError(
            f"x grid [{xs[0]:g}, {xs[-1]:g}] misses the packet at "
            f"{mean:g} +- {COVERAGE_SIGMAS:g} * {sigma:g}"
        )
    dens = np.abs(a.values) ** 2
    held = _physical_momenta(a)[dens > 1e-12 * dens.max()]
    if ps.min() > held.min() or ps.max() < held.max():
        raise SupportCoverageError(
            f"p grid [{ps.min():g}, {ps.max():g}] misses momenta in [{held.min():g}, {held.max():g}]"
        )
    return _wigner_rows(a, xs, ps, tau)


def wigner_current_check(a: MomentumAmplitude, tau: float, X: float) -> float:
    """Flux moment of the Wigner function at ``X``, times the direction sign.

    Comparable directly with :func:`toa.observables.current_expectation`.
    """
    if not np.any(a.values):
        return 0.0
    p = _physical_momenta(a)
    order = np.argsort(p)
    p = p[order]
    w = _wigner_rows(a, np.array([float(X)]), p, tau)[0]
    flux = np.trapezoid(p / a.constants.mass * w, p)
    return float(a.sign * flux)
