"""Oscillatory momentum integrals and their stationary-phase asymptotics.

The central object is the functional

    I[f](tau, X) = int_0^inf dp f(p) <eps p|psi> exp(-i (p^2 tau / 2m - eps p X) / hbar)

evaluated by the trapezoid rule on a uniform grid. Grids are required to
sample the integrand well below its Nyquist limit; a grid that cannot is
refused instead of being allowed to alias.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateStationaryPointError,
    DirectionMismatchError,
    GridCapError,
    NoStationaryPointError,
    NyquistError,
    PhaseUndefinedError,
)
from .packets import (
    DEFAULT_GRID_NODES,
    UNDERFLOW,
    Direction,
    MomentumAmplitude,
    MomentumGrid,
    PhysicalConstants,
    WavePacketSpec,
)

# phase advance per node that choose_grid aims for
TARGET_PHASE_STEP = math.pi / 4
# phase advance per node above which evaluation is refused
MAX_PHASE_STEP = math.pi / 2
N_MAX = 2**22
# complex entries per block when tabulating many tau values at once
_BLOCK_ELEMS = 1 << 21
# relative modulus above which a node's phase increment counts toward the Nyquist estimate
_PHASE_PROBE_REL = 1e-8


class WeightKind(Enum):
    UNITY = "1"
    SQRT_P = "sqrt(p)"
    LINEAR_P = "p"

    def __call__(self, p):
        if self is WeightKind.UNITY:
            return np.ones_like(p, dtype=float)
        if self is WeightKind.SQRT_P:
            return np.sqrt(p)
        return np.asarray(p, dtype=float)


@dataclass(frozen=True)
class PhaseContext:
    tau: float
    X: float
    direction: Direction = Direction.PLUS
    constants: PhysicalConstants = PhysicalConstants()

    @classmethod
    def for_amplitude(cls, a: MomentumAmplitude, tau: float, X: float) -> PhaseContext:
        return cls(float(tau), float(X), a.direction, a.constants)


@dataclass(frozen=True)
class StationaryPhaseResult:
    p0: float
    chi_at_p0: float
    chi_second: float
    value: complex


def own_phase_slope(a: MomentumAmplitude) -> float:
    """Largest |d(phase)/dp| of the amplitude itself, in action per momentum.

    Estimated from adjacent-node phase increments where the modulus is
    significant, so an amplitude that is itself undersampled cannot be
    detected here. A running median over three increments discards the
    isolated jump of pi where the amplitude changes sign between two nodes.
    """
    v = a.values
    mod = np.abs(v)
    peak = mod.max()
    if peak == 0:
        return 0.0
    keep = (mod[1:] > _PHASE_PROBE_REL * peak) & (mod[:-1] > _PHASE_PROBE_REL * peak)
    if not keep.any():
        return 0.0
    steps = np.where(keep, np.abs(np.angle(v[1:] * np.conj(v[:-1]))), 0.0)
    if steps.size >= 3:
        steps = np.median(np.stack([steps[:-2], steps[1:-1], steps[2:]]), axis=0)
    return float(steps.max() * a.constants.hbar / a.grid.spacing)


def phase_step(a: MomentumAmplitude, tau_max: float, X: float) -> float:
    """Upper bound on the integrand's phase advance per node, in radians."""
    c = a.constants
    slope = own_phase_slope(a) + a.grid.p_max * abs(tau_max) / c.mass + abs(X)
    return slope * a.grid.spacing / c.hbar


def check_nyquist(a: MomentumAmplitude, tau_max: float, X: float) -> None:
    step = phase_step(a, tau_max, X)
    if step > MAX_PHASE_STEP:
        raise NyquistError(
            f"grid spacing {a.grid.spacing:.3e} gives a phase step of {step:.3f} rad "
            f"(limit {MAX_PHASE_STEP:.3f}) at |tau| = {abs(tau_max):g}, X = {X:g}; "
            "refine the momentum grid"
        )


def choose_grid(
    spec: WavePacketSpec,
    tau_max: float,
    X: float,
    c: PhysicalConstants | None = None,
    n_min: int = DEFAULT_GRID_NODES,
    n_max: int = N_MAX,
) -> MomentumGrid:
    """Smallest uniform grid over the packet window that samples the phase finely.

    The spacing is bounded by ``(pi hbar / 4) / S`` with the slope bound
    ``S = p_max tau_max / m + |X| + max |origin|``.
    """
    if tau_max < 0:
        raise ValueError("tau_max must be >= 0")
    c = c or PhysicalConstants()
    lo, hi = spec.support_window()
    slope = hi * tau_max / c.mass + abs(X) + max(abs(comp.origin) for comp in spec.components)
    n = n_min
    if slope > 0:
        max_spacing = TARGET_PHASE_STEP * c.hbar / slope
        n = max(n_min, math.ceil((hi - lo) / max_spacing) + 1)
    if n > n_max:
        raise GridCapError(
            f"scenario needs {n} momentum nodes (cap {n_max}); shrink the time window "
            "or move the detector closer to the packet origin"
        )
    return MomentumGrid(lo, hi, n)


_STRIDE = 32


def _kinematic_phase(p: np.ndarray, taus: np.ndarray, X: float, sign: int, c: PhysicalConstants):
    """``exp(-i (p^2 tau/2m - sign p X)/hbar)`` for each tau (rows) and p (columns).

    On uniformly spaced taus only every ``_STRIDE``-th row is exponentiated;
    the rows in between are anchor rows times precomputed step factors, so
    each entry is the product of two correctly rounded exponentials.
    """
    energy = p * p / (2 * c.mass * c.hbar)
    steps = np.diff(taus)
    if taus.size <= 2 * _STRIDE:
        return np.exp(-1j * (np.outer(taus, energy) - sign * p * X / c.hbar))
    dt = (taus[-1] - taus[0]) / (taus.size - 1)
    # linspace steps wobble by a few ulps of |tau|, far below any phase that matters
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-9 * dt:
        return np.exp(-1j * (np.outer(taus, energy) - sign * p * X / c.hbar))
    anchors = taus[::_STRIDE]
    base = np.exp(-1j * (np.outer(anchors, energy) - sign * p * X / c.hbar))
    step = np.exp(-1j * np.outer(dt * np.arange(_STRIDE), energy))
    full = (base[:, None, :] * step[None, :, :]).reshape(-1, p.size)
    return full[: taus.size]


def functional_table(
    a: MomentumAmplitude,
    kinds: Sequence[WeightKind],
    taus,
    X: float,
    *,
    workers: int = 1,
    check: bool = True,
) -> np.ndarray:
    """``I[f](tau, X)`` for every weight in ``kinds`` and every tau.

    Returns a complex array of shape ``(len(kinds), len(taus))``. The tau
    values are processed in blocks; with ``workers > 1`` the blocks are
    spread over a thread pool and reassembled in order.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if check and taus.size:
        check_nyquist(a, float(np.max(np.abs(taus))), X)
    p = a.nodes
    # weights times amplitude times quadrature weights, one row per kind
    rows = np.array([k(p) * a.values * a.grid.weights for k in kinds])
    block = max(1, _BLOCK_ELEMS // a.grid.n)
    starts = range(0, taus.size, block)

    def run(start: int) -> np.ndarray:
        phase = _kinematic_phase(p, taus[start : start + block], X, a.sign, a.constants)
        return rows @ phase.T

    if workers > 1 and taus.size > block:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    if not parts:
        return np.zeros((len(kinds), 0), dtype=complex)
    return np.concatenate(parts, axis=1)


def eval_functional(a: MomentumAmplitude, f: WeightKind, ctx: PhaseContext) -> complex:
    """Trapezoid value of the oscillatory functional at one ``(tau, X)``."""
    if ctx.direction != a.direction:
        raise DirectionMismatchError(
            f"context direction {ctx.direction.name} != amplitude direction {a.direction.name}"
        )
    return complex(functional_table(a, [f], [ctx.tau], ctx.X)[0, 0])


def _phase_window(a: MomentumAmplitude) -> tuple[slice, np.ndarray, np.ndarray]:
    """Contiguous non-underflowed region with its modulus and unwrapped phase."""
    mod = np.abs(a.values)
    ok = np.nonzero(mod > UNDERFLOW)[0]
    if ok.size < 4:
        raise PhaseUndefinedError("amplitude has fewer than 4 non-vanishing nodes")
    sl = slice(int(ok[0]), int(ok[-1]) + 1)
    if np.any(mod[sl] <= UNDERFLOW):
        raise PhaseUndefinedError("modulus underflows inside the amplitude's support")
    phase = a.constants.hbar * np.unwrap(np.angle(a.values[sl]))
    return sl, mod[sl], phase


def _local_cubic(x: np.ndarray, y: np.ndarray, i: int) -> Callable[[float], float]:
    """Cubic through the four nodes around the interval ``[x[i], x[i+1]]``."""
    j = min(max(i - 1, 0), len(x) - 4)
    xs, ys = x[j : j + 4], y[j : j + 4]
    origin, scale = xs[0], xs[-1] - xs[0]
    coef = np.polyfit((xs - origin) / scale, ys, 3)
    return lambda t: float(np.polyval(coef, (t - origin) / scale))


def _bisect_secant(fn: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    flo, fhi = fn(lo), fn(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    for _ in range(200):
        # secant guess, falling back to bisection when it leaves the bracket
        mid = hi - fhi * (hi - lo) / (fhi - flo)
        if not lo < mid < hi:
            mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if abs(fmid) < tol:
            return mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
        # guard against one-sided secant stalls
        half = 0.5 * (lo + hi)
        fhalf = fn(half)
        if abs(fhalf) < tol:
            return half
        if (fhalf < 0) == (flo < 0):
            lo, flo = half, fhalf
        else:
            hi, fhi = half, fhalf
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class _PhaseDerivs:
    p: np.ndarray
    modulus: np.ndarray
    phase: np.ndarray
    chi1: np.ndarray
    chi2: np.ndarray


def _phase_derivatives(a: MomentumAmplitude, ctx: PhaseContext) -> _PhaseDerivs:
    sl, mod, phase = _phase_window(a)
    p = a.nodes[sl]
    dp = a.grid.spacing
    m = ctx.constants.mass
    dphi = np.gradient(phase, dp)
    d2phi = np.empty_like(phase)
    d2phi[1:-1] = (phase[2:] - 2 * phase[1:-1] + phase[:-2]) / dp**2
    d2phi[0], d2phi[-1] = d2phi[1], d2phi[-2]
    chi1 = dphi - p * ctx.tau / m + a.sign * ctx.X
    chi2 = d2phi - ctx.tau / m
    return _PhaseDerivs(p, mod, phase, chi1, chi2)


def _locate(a: MomentumAmplitude, ctx: PhaseContext) -> tuple[float, int, _PhaseDerivs]:
    if ctx.tau == 0:
        raise NoStationaryPointError("tau = 0: the stationary-point condition is degenerate")
    if ctx.direction != a.direction:
        raise DirectionMismatchError("context and amplitude directions differ")
    d = _phase_derivatives(a, ctx)
    s = np.sign(d.chi1)
    idx = np.nonzero(s[:-1] * s[1:] <= 0)[0]
    if idx.size == 0:
        raise NoStationaryPointError(
            f"phase derivative keeps one sign on the grid: no classical arrival at "
            f"X = {ctx.X:g}, tau = {ctx.tau:g}"
        )
    # several crossings: take the one carrying the most amplitude
    i = int(idx[np.argmax(d.modulus[idx] + d.modulus[idx + 1])])
    fn = _local_cubic(d.p, d.chi1, i)
    tol = ctx.constants.hbar * 1e-10 / a.grid.spacing
    p0 = _bisect_secant(fn, float(d.p[i]), float(d.p[i + 1]), tol)
    return p0, i, d


def find_stationary_point(a: MomentumAmplitude, ctx: PhaseContext) -> float:
    """Momentum where ``chi'(p) = phi'(p) - p tau/m + eps X`` vanishes."""
    return _locate(a, ctx)[0]


def stationary_phase_value(
    a: MomentumAmplitude, f: WeightKind, ctx: PhaseContext
) -> StationaryPhaseResult:
    """Leading-order stationary-phase approximation of the functional."""
    p0, i, d = _locate(a, ctx)
    c = ctx.constants
    chi2 = _local_cubic(d.p, d.chi2, i)(p0)
    window = a.grid.p_max - a.grid.p_min
    if abs(chi2) < 1e-12 * c.hbar / window**2:
        raise DegenerateStationaryPointError(f"chi''(p0) = {chi2:.3e} at p0 = {p0:.6g}")
    phi0 = _local_cubic(d.p, d.phase, i)(p0)
    chi0 = phi0 - p0**2 * ctx.tau / (2 * c.mass) + a.sign * p0 * ctx.X
    mod0 = max(_local_cubic(d.p, d.modulus, i)(p0), 0.0)
    value = (
        np.exp(1j * (math.pi / 4) * np.sign(chi2))
        * np.exp(1j * chi0 / c.hbar)
        * float(f(np.array([p0]))[0])
        * mod0
        * math.sqrt(c.h / abs(chi2))
    )
    return StationaryPhaseResult(p0, chi0, chi2, complex(value))
