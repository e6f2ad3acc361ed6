"""Momentum-space wave packets for directed (one-sided momentum) states.

A state moving to the right (``Direction.PLUS``) is stored as its momentum
amplitude ``<p|psi>`` on a grid of positive momenta; a state moving to the
left (``Direction.MINUS``) is stored as ``<-p|psi>`` on the same kind of grid.
All downstream code works with the positive half-line only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import IntEnum
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    GridCoverageError,
    NormUnderflowError,
    PhaseUndefinedError,
    ToaError,
)

DEFAULT_GRID_NODES = 4096
WINDOW_SIGMAS = 8.0
TAIL_TOL = 1e-8
NORM_TOL = 1e-6
EDGE_TOL = 1e-12

# |value| at or below this is treated as an underflowed amplitude.
UNDERFLOW = 1e-290
# nodes whose modulus exceeds SUPPORT_REL * max delimit the support window
SUPPORT_REL = 1e-10
# rescaling is skipped when the norm is already 1 to rounding
_RENORM_SKIP = 1e-14


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self) -> None:
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be positive, got {self.mass}")

    @property
    def h(self) -> float:
        """Planck's constant, ``2*pi*hbar``."""
        return 2.0 * math.pi * self.hbar


class Direction(IntEnum):
    """Sign of the momenta supporting the state.

    ``PLUS`` means arrival from the left (p > 0), ``MINUS`` arrival from the
    right (p < 0).
    """

    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class GaussianComponent:
    """One minimum-uncertainty Gaussian term of a packet.

    ``center`` and ``spread`` are the mean and standard deviation of the
    momentum magnitude; ``origin`` is the position of the packet at t = 0.
    """

    weight: float
    center: float
    spread: float
    origin: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.weight):
            raise ValueError("component weight must be a finite real number")
        if not self.center > 0:
            raise ValueError(f"component center must be > 0, got {self.center}")
        if not self.spread > 0:
            raise ValueError(f"component spread must be > 0, got {self.spread}")
        if not math.isfinite(self.origin):
            raise ValueError("component origin must be finite")


def gaussian_tail_weight(center: float, spread: float) -> float:
    """Probability a Gaussian momentum distribution puts on the wrong side of 0."""
    return 0.5 * math.erfc(center / (math.sqrt(2.0) * spread))


def wrong_sign_tail_weight(components: WavePacketSpec | Iterable[GaussianComponent]) -> float:
    """Fraction of probability that leaks onto the wrong-sign momentum half-line.

    Cross terms between components are neglected, so for overlapping
    components this is a heuristic rather than an exact value. For the
    well-separated superpositions this package targets it is an upper bound
    to within rounding.
    """
    comps = components.components if isinstance(components, WavePacketSpec) else tuple(components)
    total = sum(c.weight**2 for c in comps)
    if total == 0:
        return 0.0
    leak = sum(c.weight**2 * gaussian_tail_weight(c.center, c.spread) for c in comps)
    return leak / total


@dataclass(frozen=True)
class WavePacketSpec:
    components: tuple[GaussianComponent, ...]
    direction: Direction = Direction.PLUS
    tail_tol: float = TAIL_TOL

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "direction", Direction(self.direction))
        if not self.components:
            raise ValueError("a packet needs at least one component")
        leak = wrong_sign_tail_weight(self.components)
        if leak >= self.tail_tol:
            raise ValueError(
                f"wrong-sign momentum weight {leak:.3e} exceeds tail_tol {self.tail_tol:.1e}"
            )

    def mirrored(self) -> WavePacketSpec:
        """Same parameters, opposite direction of motion."""
        return replace(self, direction=Direction(-int(self.direction)))

    def support_window(self) -> tuple[float, float]:
        lo = min(c.center - WINDOW_SIGMAS * c.spread for c in self.components)
        lo = max(1e-6 * min(c.center for c in self.components), lo)
        hi = max(c.center + WINDOW_SIGMAS * c.spread for c in self.components)
        return lo, hi


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform grid on ``[p_min, p_max]`` with ``n`` nodes."""

    p_min: float
    p_max: float
    n: int = DEFAULT_GRID_NODES

    def __post_init__(self) -> None:
        if not (0 < self.p_min < self.p_max):
            raise ValueError(f"need 0 < p_min < p_max, got [{self.p_min}, {self.p_max}]")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid needs at least 2 nodes, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def covering(cls, spec: WavePacketSpec, n: int = DEFAULT_GRID_NODES) -> MomentumGrid:
        lo, hi = spec.support_window()
        return cls(lo, hi, n)

    @property
    def spacing(self) -> float:
        return (self.p_max - self.p_min) / (self.n - 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.linspace(self.p_min, self.p_max, self.n)
        nodes.flags.writeable = False
        return nodes

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights."""
        w = np.full(self.n, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        w.flags.writeable = False
        return w

    def refined(self, factor: int = 2) -> MomentumGrid:
        """Same window with the spacing divided by ``factor``."""
        return MomentumGrid(self.p_min, self.p_max, (self.n - 1) * factor + 1)


@dataclass(frozen=True, eq=False)
class MomentumAmplitude:
    """Sampled ``<eps*p|psi>`` for p on ``grid``, eps the direction sign.

    The builder always returns a unit-norm amplitude; arbitrary sampled
    values are accepted so that tests can feed non-Gaussian states.
    """

    grid: MomentumGrid
    values: np.ndarray
    direction: Direction = Direction.PLUS
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("amplitude values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "direction", Direction(self.direction))

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def sign(self) -> int:
        return int(self.direction)

    @property
    def norm(self) -> float:
        """Trapezoid discrete norm ``sum |psi|^2 dp``."""
        return float(np.sum(np.abs(self.values) ** 2 * self.grid.weights))

    @property
    def edge_ratio(self) -> float:
        """Largest endpoint ``|psi|^2`` relative to the peak."""
        dens = np.abs(self.values) ** 2
        peak = dens.max()
        if peak == 0:
            return 0.0
        return float(max(dens[0], dens[-1]) / peak)

    def with_values(self, values: np.ndarray) -> MomentumAmplitude:
        return replace(self, values=values)

    def normalized(self) -> MomentumAmplitude:
        norm = self.norm
        if not norm > UNDERFLOW:
            raise NormUnderflowError("cannot normalize an amplitude with vanishing norm")
        if abs(norm - 1.0) <= _RENORM_SKIP:
            return self
        return self.with_values(self.values / math.sqrt(norm))

    def check(self, norm_tol: float = NORM_TOL, edge_tol: float = EDGE_TOL) -> None:
        """Raise if the unit-norm or endpoint-decay invariants fail."""
        if abs(self.norm - 1.0) > norm_tol:
            raise ToaError(f"discrete norm {self.norm:.12g} is not 1 within {norm_tol:g}")
        if self.edge_ratio >= edge_tol:
            raise ToaError(
                f"amplitude does not decay at the grid edges (ratio {self.edge_ratio:.3e})"
            )


def build_amplitude(
    spec: WavePacketSpec,
    grid: MomentumGrid | None = None,
    c: PhysicalConstants | None = None,
) -> MomentumAmplitude:
    """Sample the Gaussian superposition on ``grid`` and normalize it.

    Each component contributes

        weight * (2 pi spread^2)^(-1/4) * exp(-((p - center)/(2 spread))^2 - i eps p origin/hbar)

    where eps is the direction sign, so ``origin`` is the actual position of
    the component for either direction of motion.
    """
    c = c or PhysicalConstants()
    grid = grid or MomentumGrid.covering(spec)
    lo, hi = spec.support_window()
    rtol = 1e-12
    if grid.p_min > lo * (1 + rtol) or grid.p_max < hi * (1 - rtol):
        raise GridCoverageError(
            f"grid [{grid.p_min:g}, {grid.p_max:g}] does not cover the packet "
            f"window [{lo:g}, {hi:g}]"
        )
    p = grid.nodes
    eps = int(spec.direction)
    values = np.zeros(grid.n, dtype=complex)
    for comp in spec.components:
        envelope = (2 * math.pi * comp.spread**2) ** -0.25 * np.exp(
            -(((p - comp.center) / (2 * comp.spread)) ** 2)
        )
        values += comp.weight * envelope * np.exp(-1j * eps * p * comp.origin / c.hbar)
    amp = MomentumAmplitude(grid, values, spec.direction, c)
    return amp.normalized()


def support_slice(modulus: np.ndarray, rel: float = SUPPORT_REL) -> slice:
    """Index range between the first and last node above ``rel * max``."""
    above = np.nonzero(modulus > rel * modulus.max())[0]
    if above.size == 0:
        return slice(0, 0)
    return slice(int(above[0]), int(above[-1]) + 1)


def polar_decompose(a: MomentumAmplitude) -> tuple[np.ndarray, np.ndarray]:
    """Split the amplitude as ``modulus * exp(i phase / hbar)``.

    The phase is unwrapped along the grid so that adjacent nodes never
    differ by more than ``pi * hbar``.

    Raises
    ------
    PhaseUndefinedError
        If the modulus underflows somewhere inside the support window.
    """
    modulus = np.abs(a.values)
    if modulus.max() <= UNDERFLOW:
        raise PhaseUndefinedError("amplitude vanishes everywhere; phase undefined")
    sl = support_slice(modulus)
    inner = modulus[sl]
    if np.any(inner <= UNDERFLOW):
        bad = sl.start + int(np.argmax(inner <= UNDERFLOW))
        raise PhaseUndefinedError(
            f"modulus underflows at p = {a.nodes[bad]:.6g} inside the support window"
        )
    phase = a.constants.hbar * np.unwrap(np.angle(a.values))
    return modulus, phase


def superpose(amplitudes: Sequence[MomentumAmplitude], coeffs: Sequence[complex]) -> MomentumAmplitude:
    """Linear combination on a shared grid, without renormalization."""
    first = amplitudes[0]
    for other in amplitudes[1:]:
        if other.grid != first.grid or other.direction != first.direction:
            raise ValueError("superposition needs a shared grid and direction")
    values = sum(cf * amp.values for cf, amp in zip(coeffs, amplitudes))
    return first.with_values(values)
