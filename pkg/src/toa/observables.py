"""Arrival-time observables built on the oscillatory momentum functional.

For a directed state the arrival amplitude at the detector X is

    Psi(tau; X) = (m h)^(-1/2) I[sqrt(p)](tau, X)

and its squared modulus is the expectation value of the positive current
``sqrt(|P|/m) delta(X - x) sqrt(|P|/m)``. The ordinary symmetrized current
is ``Re(conj(I[p]) I[1]) / (m h)``. Both are tabulated over uniform tau grids
and integrated with the trapezoid rule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceGuardError, WindowInadequateError
from .oscquad import WeightKind, functional_table
from .packets import Direction, MomentumAmplitude, PhysicalConstants, WavePacketSpec

P_TOL = 1e-3
DIVERGENCE_GUARD = 1e-8
IMAG_RESIDUE_TOL = 1e-6

_CURRENT_KINDS = (WeightKind.SQRT_P, WeightKind.LINEAR_P, WeightKind.UNITY)


@dataclass(frozen=True, eq=False)
class ArrivalDistribution:
    tau_nodes: np.ndarray
    amplitudes: np.ndarray
    densities: np.ndarray
    X: float
    direction: Direction = Direction.PLUS

    @property
    def integral(self) -> float:
        return float(np.trapezoid(self.densities, self.tau_nodes))

    @property
    def tail(self) -> float:
        """Probability missing from the window, ``1 - integral``."""
        return 1.0 - self.integral


@dataclass(frozen=True, eq=False)
class CurrentSeries:
    """Ordinary current (times the direction sign) and positive current over tau."""

    tau_nodes: np.ndarray
    j_values: np.ndarray
    jplus_values: np.ndarray
    X: float


@dataclass(frozen=True)
class OperatorMean:
    value: float
    imag_residue: float


def tau_grid(tau_window: tuple[float, float], n_tau: int) -> np.ndarray:
    lo, hi = map(float, tau_window)
    if not n_tau >= 2:
        raise ValueError(f"n_tau must be >= 2, got {n_tau}")
    if not hi > lo:
        raise WindowInadequateError(f"empty time window [{lo:g}, {hi:g}]")
    return np.linspace(lo, hi, int(n_tau))


def suggest_tau_window(
    spec: WavePacketSpec, X: float, c: PhysicalConstants | None = None, sigmas: float = 10.0
) -> tuple[float, float]:
    """Time window holding the arrivals of every component of ``spec``.

    Each component is centred on its classical arrival time with a width
    combining the initial position spread and the momentum spread.
    """
    c = c or PhysicalConstants()
    eps = int(spec.direction)
    lo, hi = math.inf, -math.inf
    for comp in spec.components:
        dist = eps * (X - comp.origin)
        t_c = c.mass * dist / comp.center
        sx = c.hbar / (2 * comp.spread)
        sig = math.hypot(c.mass * sx / comp.center, c.mass * dist * comp.spread / comp.center**2)
        lo, hi = min(lo, t_c - sigmas * sig), max(hi, t_c + sigmas * sig)
    return lo, hi


def _amp_prefactor(a: MomentumAmplitude) -> float:
    return 1.0 / math.sqrt(a.constants.mass * a.constants.h)


def arrival_amplitudes(a: MomentumAmplitude, taus, X: float, *, workers: int = 1) -> np.ndarray:
    table = functional_table(a, [WeightKind.SQRT_P], taus, X, workers=workers)
    return _amp_prefactor(a) * table[0]


def arrival_amplitude(a: MomentumAmplitude, tau: float, X: float) -> complex:
    """Probability amplitude for arriving at ``X`` at time ``tau``."""
    return complex(arrival_amplitudes(a, [tau], X)[0])


def arrival_distribution(
    a: MomentumAmplitude,
    tau_window: tuple[float, float],
    n_tau: int,
    X: float,
    *,
    workers: int = 1,
) -> ArrivalDistribution:
    taus = tau_grid(tau_window, n_tau)
    amps = arrival_amplitudes(a, taus, X, workers=workers)
    return ArrivalDistribution(taus, amps, np.abs(amps) ** 2, float(X), a.direction)


def current_series(a: MomentumAmplitude, taus, X: float, *, workers: int = 1) -> CurrentSeries:
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    i_sqrt, i_p, i_one = functional_table(a, _CURRENT_KINDS, taus, X, workers=workers)
    scale = 1.0 / (a.constants.mass * a.constants.h)
    j = scale * np.real(np.conj(i_p) * i_one)
    jplus = scale * np.abs(i_sqrt) ** 2
    return CurrentSeries(taus, j, jplus, float(X))


def current_expectation(a: MomentumAmplitude, tau: float, X: float) -> float:
    """Ordinary probability current at ``X`` (times the direction sign); may be negative."""
    return float(current_series(a, [tau], X).j_values[0])


def positive_current_expectation(a: MomentumAmplitude, tau: float, X: float) -> float:
    return float(current_series(a, [tau], X).jplus_values[0])


def _check_window(total: float, p_tol: float, what: str) -> None:
    if abs(1.0 - total) > p_tol:
        raise WindowInadequateError(
            f"{what} integrates to {total:.6g} over the window (tolerance {p_tol:g}); "
            "widen the time window"
        )


def mean_time_spectral(d: ArrivalDistribution, p_tol: float = P_TOL) -> float:
    """Mean of the arrival-time density, normalized by its window integral."""
    _check_window(d.integral, p_tol, "arrival density")
    num = np.trapezoid(d.tau_nodes * d.densities, d.tau_nodes)
    return float(num / d.integral)


def mean_time_current(
    a: MomentumAmplitude,
    tau_window: tuple[float, float],
    n_tau: int,
    X: float,
    p_tol: float = P_TOL,
    *,
    workers: int = 1,
) -> float:
    """Mean arrival time with the ordinary current as the weight."""
    taus = tau_grid(tau_window, n_tau)
    j = current_series(a, taus, X, workers=workers).j_values
    total = float(np.trapezoid(j, taus))
    _check_window(total, p_tol, "current")
    return float(np.trapezoid(taus * j, taus) / total)


def total_arrival_probability(
    a: MomentumAmplitude,
    tau_window: tuple[float, float],
    n_tau: int,
    X: float,
    p_tol: float = P_TOL,
    *,
    require_full: bool = True,
    workers: int = 1,
) -> tuple[float, float]:
    """Window integrals of the positive current and of the ordinary current.

    With ``require_full`` the window must hold all but ``p_tol`` of the
    probability; pass ``require_full=False`` to integrate partial windows.
    """
    taus = tau_grid(tau_window, n_tau)
    s = current_series(a, taus, X, workers=workers)
    jplus_total = float(np.trapezoid(s.jplus_values, taus))
    j_total = float(np.trapezoid(s.j_values, taus))
    if require_full:
        _check_window(jplus_total, p_tol, "positive current")
    return jplus_total, j_total


def d_dp(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative on a uniform grid.

    Centered five-point stencil inside, one-sided five-point stencils at the
    two nodes nearest each edge.
    """
    f = np.asarray(values)
    n = f.size
    if n < 5:
        raise ValueError("need at least 5 nodes for a fourth-order derivative")
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
    out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h)
    out[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * h)
    out[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * h)
    return out


def apply_position(a: MomentumAmplitude, values: np.ndarray) -> np.ndarray:
    """Position operator in the stored representation: ``eps * i hbar d/dp``."""
    return a.sign * 1j * a.constants.hbar * d_dp(values, a.grid.spacing)


def _guard_small_p(a: MomentumAmplitude) -> None:
    p_min = a.grid.p_min
    risk = abs(a.values[0]) ** 2 * a.constants.mass / p_min * a.grid.spacing
    if risk > DIVERGENCE_GUARD:
        raise DivergenceGuardError(
            f"|psi(p_min)|^2 m/p_min dp = {risk:.3e} exceeds {DIVERGENCE_GUARD:g}: "
            "the amplitude does not vanish fast enough as p -> 0"
        )


def _expect(a: MomentumAmplitude, op_values: np.ndarray) -> complex:
    return complex(np.sum(np.conj(a.values) * op_values * a.grid.weights))


def _report(value: complex, what: str) -> OperatorMean:
    residue = abs(value.imag)
    if residue > IMAG_RESIDUE_TOL:
        warnings.warn(
            f"{what}: imaginary residue {residue:.2e} signals a discretization problem",
            RuntimeWarning,
            stacklevel=3,
        )
    return OperatorMean(value.real, residue)


def ab_operator_mean(a: MomentumAmplitude, X: float) -> OperatorMean:
    """``<(1/2)[(X - x) m/P + (m/P)(X - x)]>`` with both products applied right to left."""
    _guard_small_p(a)
    inv_p = a.sign * a.constants.mass / a.nodes
    psi = a.values

    def shifted(v):
        return X * v - apply_position(a, v)

    sym = 0.5 * (shifted(inv_p * psi) + inv_p * shifted(psi))
    return _report(_expect(a, sym), "Aharonov-Bohm ordering")


def grt_operator_mean(a: MomentumAmplitude, X: float) -> OperatorMean:
    """``<sqrt(m/P) (X - x) sqrt(m/P)>``; for P < 0 the two imaginary roots give a sign."""
    _guard_small_p(a)
    root = np.sqrt(a.constants.mass / a.nodes)
    inner = root * a.values
    out = a.sign * root * (X * inner - apply_position(a, inner))
    return _report(_expect(a, out), "Grot-Rovelli-Tate ordering")


def mean_time_ab_operator(a: MomentumAmplitude, X: float) -> float:
    return ab_operator_mean(a, X).value


def mean_time_grt_operator(a: MomentumAmplitude, X: float) -> float:
    return grt_operator_mean(a, X).value


def inverse_momentum_mean(a: MomentumAmplitude) -> float:
    """``<1/|p|>`` by trapezoid quadrature over ``|psi|^2``."""
    dens = np.abs(a.values) ** 2 * a.grid.weights
    return float(np.sum(dens / a.nodes) / np.sum(dens))


def position_wavefunction(a: MomentumAmplitude, x, tau: float = 0.0) -> np.ndarray:
    """``<x|psi(tau)>`` at the given positions, by direct momentum quadrature."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    c = a.constants
    p = a.nodes
    weighted = a.values * a.grid.weights * np.exp(-1j * p * p * tau / (2 * c.mass * c.hbar))
    out = np.empty(x.size, dtype=complex)
    block = max(1, (1 << 21) // p.size)
    for s in range(0, x.size, block):
        kernel = np.exp(1j * a.sign * np.outer(x[s : s + block], p) / c.hbar)
        out[s : s + block] = kernel @ weighted
    return out / math.sqrt(c.h)


def position_moments(a: MomentumAmplitude, tau: float = 0.0) -> tuple[float, float]:
    """Mean and standard deviation of position at time ``tau``.

    Uses the free-evolution relations for the first two moments so only the
    tau = 0 amplitude has to be differentiated.
    """
    c = a.constants
    psi = a.values
    norm = a.norm
    xpsi = apply_position(a, psi)
    mom = a.sign * a.nodes
    x1 = _expect(a, xpsi).real / norm
    x2 = _expect(a, apply_position(a, xpsi)).real / norm
    xp = _expect(a, apply_position(a, mom * psi) + mom * xpsi).real / (2 * norm)
    p1 = _expect(a, mom * psi).real / norm
    p2 = _expect(a, mom**2 * psi).real / norm
    v = tau / c.mass
    mean = x1 + v * p1
    second = x2 + 2 * v * xp + v * v * p2
    return mean, math.sqrt(max(second - mean * mean, 0.0))
