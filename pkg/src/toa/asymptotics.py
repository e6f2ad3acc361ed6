"""Closed-form asymptotics for two-packet superpositions and the semiclassical scan.

The two-packet formulas hold to leading order in the momentum spread and
describe a right-moving state only; the mirrored direction follows from
the packet-level symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ComputationError, ConditionNotSatisfiedError
from .observables import arrival_amplitude
from .oscquad import PhaseContext, find_stationary_point, stationary_phase_value, WeightKind
from .packets import (
    Direction,
    GaussianComponent,
    MomentumAmplitude,
    PhysicalConstants,
    WavePacketSpec,
    polar_decompose,
)

NEGATIVE_FLUX_MARGIN = 3.0


@dataclass(frozen=True)
class TwoPacketParams:
    alpha1: float
    alpha2: float
    p1: float
    p2: float
    delta_p: float
    x0: float = 0.0
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self) -> None:
        if not self.p2 > self.p1 > 0:
            raise ValueError(f"need p2 > p1 > 0, got p1={self.p1}, p2={self.p2}")
        if not self.delta_p > 0:
            raise ValueError("delta_p must be positive")
        if self.delta_p > (self.p2 - self.p1) / 10:
            raise ValueError(
                f"delta_p = {self.delta_p} is not small against p2 - p1 = {self.p2 - self.p1} "
                "(need delta_p <= (p2 - p1)/10)"
            )
        if abs(self.alpha1**2 + self.alpha2**2 - 1.0) > 1e-12:
            raise ValueError("alpha1^2 + alpha2^2 must equal 1")

    @classmethod
    def from_ratio(cls, ratio: float, p1: float, p2: float, delta_p: float, x0: float = 0.0,
                   constants: PhysicalConstants | None = None) -> TwoPacketParams:
        """Weights with ``alpha1 / alpha2 = ratio`` and unit total weight."""
        alpha2 = 1.0 / math.sqrt(1.0 + ratio * ratio)
        return cls(ratio * alpha2, alpha2, p1, p2, delta_p, x0, constants or PhysicalConstants())

    @property
    def prefactor(self) -> float:
        c = self.constants
        return 2 * math.sqrt(2 * math.pi) * self.delta_p / (c.mass * c.h)

    @property
    def period(self) -> float:
        """tau-period of the interference term, ``4 pi m hbar / (p2^2 - p1^2)``."""
        c = self.constants
        return 4 * math.pi * c.mass * c.hbar / (self.p2**2 - self.p1**2)

    def spec(self) -> WavePacketSpec:
        return WavePacketSpec(
            (
                GaussianComponent(self.alpha1, self.p1, self.delta_p, self.x0),
                GaussianComponent(self.alpha2, self.p2, self.delta_p, self.x0),
            ),
            Direction.PLUS,
        )

    def _beat(self, tau, X):
        c = self.constants
        arg = ((self.p2**2 - self.p1**2) * np.asarray(tau) / (2 * c.mass)
               + (self.p2 - self.p1) * (self.x0 - X)) / c.hbar
        return np.cos(arg)


def asym_current(params: TwoPacketParams, tau, X: float):
    """Leading-order ordinary current of the two-packet state."""
    a1, a2, p1, p2 = params.alpha1, params.alpha2, params.p1, params.p2
    return params.prefactor * (
        a1**2 * p1 + a2**2 * p2 + a1 * a2 * (p1 + p2) * params._beat(tau, X)
    )


def asym_positive_current(params: TwoPacketParams, tau, X: float):
    """Leading-order positive current; the beat weight is ``sqrt(p1 p2)`` instead of ``p1 + p2``."""
    a1, a2, p1, p2 = params.alpha1, params.alpha2, params.p1, params.p2
    return params.prefactor * (
        a1**2 * p1 + a2**2 * p2 + a1 * a2 * math.sqrt(p1 * p2) * params._beat(tau, X)
    )


@dataclass(frozen=True)
class NegativeFluxDiagnostics:
    ratio1: float
    ratio2: float
    satisfied: bool
    min_current_estimate: float


def negative_flux_condition(
    params: TwoPacketParams, margin: float = NEGATIVE_FLUX_MARGIN
) -> NegativeFluxDiagnostics:
    """Check ``1 << alpha1/alpha2 << p2/p1`` with ``<<`` read as a factor ``margin``.

    ``min_current_estimate`` is the exact minimum over tau of the
    leading-order current, whatever the verdict.
    """
    if params.alpha2 == 0:
        raise ComputationError("alpha2 = 0: there is no interference term")
    ratio1 = params.alpha1 / params.alpha2
    ratio2 = params.p2 / params.p1
    satisfied = ratio1 >= margin and ratio2 / ratio1 >= margin
    a1, a2, p1, p2 = params.alpha1, params.alpha2, params.p1, params.p2
    floor = params.prefactor * (a1**2 * p1 + a2**2 * p2 - abs(a1 * a2) * (p1 + p2))
    return NegativeFluxDiagnostics(ratio1, ratio2, satisfied, floor)


def asym_interference_current(
    params: TwoPacketParams, tau, X: float, margin: float = NEGATIVE_FLUX_MARGIN
):
    """Interference-dominated approximation of the current.

    Only meaningful inside the negative-flux regime; raises otherwise.
    """
    diag = negative_flux_condition(params, margin)
    if not diag.satisfied:
        raise ConditionNotSatisfiedError(
            f"alpha1/alpha2 = {diag.ratio1:.3g} and p2/p1 = {diag.ratio2:.3g} are outside "
            f"the interference-dominated regime (margin {margin:g})"
        )
    c = params.constants
    arg = (params.p2**2 * np.asarray(tau) / (2 * c.mass) + params.p2 * (params.x0 - X)) / c.hbar
    return params.prefactor * params.alpha1 * params.alpha2 * params.p2 * np.cos(arg)


def rescale_hbar(a: MomentumAmplitude, scale: float) -> MomentumAmplitude:
    """Same modulus and phase function, with hbar multiplied by ``scale``.

    The amplitude keeps ``|psi(p)|`` and the action-valued phase ``phi(p)``
    fixed; only the ``1/hbar`` in every exponent changes.
    """
    if not scale > 0:
        raise ValueError("hbar scale must be positive")
    modulus, phase = polar_decompose(a)
    c = PhysicalConstants(a.constants.hbar * scale, a.constants.mass)
    values = modulus * np.exp(1j * phase / c.hbar)
    return MomentumAmplitude(a.grid, values, a.direction, c)


@dataclass(frozen=True)
class ScanRow:
    scale: float
    exact_density: float
    asym_density: float
    abs_error: float
    error: str | None = None


def semiclassical_scan(a: MomentumAmplitude, tau: float, X: float, scales) -> list[ScanRow]:
    """Exact arrival density against its leading semiclassical value for each hbar scale.

    The asymptotic density is ``(p0/m) |psi(p0)|^2 / |chi''(p0)|`` and does
    not depend on the scale. A scale whose grid fails the Nyquist check is
    reported with ``error`` set and NaN values; the scan carries on.
    """
    ctx = PhaseContext.for_amplitude(a, tau, X)
    p0 = find_stationary_point(a, ctx)
    sp = stationary_phase_value(a, WeightKind.UNITY, ctx)
    modulus0 = abs(sp.value) / math.sqrt(a.constants.h / abs(sp.chi_second))
    asym = p0 / a.constants.mass * modulus0**2 / abs(sp.chi_second)
    rows = []
    for s in scales:
        try:
            scaled = rescale_hbar(a, float(s))
            exact = abs(arrival_amplitude(scaled, tau, X)) ** 2
        except ComputationError as exc:
            rows.append(ScanRow(float(s), math.nan, asym, math.nan, str(exc)))
            continue
        rows.append(ScanRow(float(s), exact, asym, abs(exact - asym)))
    return rows
