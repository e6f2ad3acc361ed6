"""Closed-form transmission amplitudes and the renormalized transmitted state."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ComputationError, NormUnderflowError
from .packets import UNDERFLOW, Direction, MomentumAmplitude, PhysicalConstants


class BarrierKind(Enum):
    FREE = "free"
    DELTA = "delta"
    RECTANGULAR = "rectangular"


@dataclass(frozen=True)
class TransmissionModel:
    """Transmission and reflection amplitudes of a barrier, as functions of p > 0.

    The rectangular barrier occupies ``0 <= x <= L``; its transmission
    amplitude carries the factor ``exp(-i p L / hbar)`` so that a vanishing
    barrier gives ``T = 1``.
    """

    kind: BarrierKind
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    strength: float = 0.0
    height: float = 0.0
    width: float = 0.0

    def transmission(self, p) -> np.ndarray:
        return self.amplitudes(p)[0]

    def reflection(self, p) -> np.ndarray:
        return self.amplitudes(p)[1]

    def amplitudes(self, p) -> tuple[np.ndarray, np.ndarray]:
        p = np.asarray(p, dtype=float)
        if np.any(p <= 0):
            raise ValueError("transmission amplitudes are defined for p > 0 only")
        if self.kind is BarrierKind.FREE:
            return np.ones(p.shape, dtype=complex), np.zeros(p.shape, dtype=complex)
        if self.kind is BarrierKind.DELTA:
            beta = self.constants.mass * self.strength / (self.constants.hbar * p)
            t = 1.0 / (1.0 + 1j * beta)
            return t, t - 1.0
        return _rectangular(p, self.height, self.width, self.constants)


def free() -> TransmissionModel:
    return TransmissionModel(BarrierKind.FREE)


def delta_barrier(strength: float, c: PhysicalConstants | None = None) -> TransmissionModel:
    """Point barrier ``V(x) = strength * delta(x)``: ``T = 1 / (1 + i m strength / (hbar p))``."""
    if not strength >= 0:
        raise ValueError(f"delta barrier strength must be >= 0, got {strength}")
    return TransmissionModel(BarrierKind.DELTA, c or PhysicalConstants(), strength=float(strength))


def rectangular_barrier(V0: float, L: float, c: PhysicalConstants | None = None) -> TransmissionModel:
    if not (V0 > 0 and L > 0):
        raise ValueError(f"rectangular barrier needs V0 > 0 and L > 0, got V0={V0}, L={L}")
    return TransmissionModel(
        BarrierKind.RECTANGULAR, c or PhysicalConstants(), height=float(V0), width=float(L)
    )


def _rectangular(p: np.ndarray, V0: float, L: float, c: PhysicalConstants):
    hbar, m = c.hbar, c.mass
    k = p / hbar
    t = np.empty(p.shape, dtype=complex)
    r = np.empty(p.shape, dtype=complex)
    excess = p * p / (2 * m) - V0
    above = excess >= 0
    below = ~above

    # E >= V0: sin(qL)/q written through sinc, finite at q = 0
    if above.any():
        ka = k[above]
        q = np.sqrt(2 * m * excess[above]) / hbar
        sin_over_q = L * np.sinc(q * L / math.pi)
        denom = np.cos(q * L) - 0.5j * (ka * ka + q * q) / ka * sin_over_q
        t[above] = np.exp(-1j * ka * L) / denom
        r[above] = 0.5j * (q * q - ka * ka) / ka * sin_over_q / denom

    # E < V0: cosh and sinh scaled by exp(-kappa L) to stay finite for opaque barriers
    if below.any():
        kb = k[below]
        kappa = np.sqrt(-2 * m * excess[below]) / hbar
        x = kappa * L
        decay = np.exp(-x)
        cosh_s = 0.5 * (1 + decay * decay)
        sinh_over_kappa_s = -0.5 * np.expm1(-2 * x) / kappa
        denom = cosh_s + 0.5j * (kappa * kappa - kb * kb) / kb * sinh_over_kappa_s
        t[below] = np.exp(-1j * kb * L) * decay / denom
        r[below] = -0.5j * (kb * kb + kappa * kappa) / kb * sinh_over_kappa_s / denom
    return t, r


@dataclass(frozen=True, eq=False)
class Transmitted:
    amplitude: MomentumAmplitude
    transmitted_norm: float


def transmit(a_in: MomentumAmplitude, model: TransmissionModel) -> Transmitted:
    """Multiply by T(p) and renormalize.

    The norm before renormalization is the total transmission probability.
    """
    if a_in.direction is not Direction.PLUS:
        raise ComputationError("transmission is defined for left-incident (direction +1) states")
    product = a_in.with_values(model.transmission(a_in.nodes) * a_in.values)
    norm = product.norm
    if norm <= UNDERFLOW:
        raise NormUnderflowError("transmitted norm underflows: the barrier is opaque to this packet")
    return Transmitted(product.normalized(), norm)
