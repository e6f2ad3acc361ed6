import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toa.errors import GridCoverageError, PhaseUndefinedError
from toa.packets import (
    Direction,
    GaussianComponent,
    MomentumAmplitude,
    MomentumGrid,
    PhysicalConstants,
    WavePacketSpec,
    build_amplitude,
    gaussian_tail_weight,
    polar_decompose,
    superpose,
    wrong_sign_tail_weight,
)

from conftest import gaussian_psi_p, gaussian_spec


def test_canonical_norm_matches_analytic(canonical_spec):
    a = build_amplitude(canonical_spec)
    assert abs(a.norm - 1.0) < 1e-6
    assert a.nodes[np.argmax(np.abs(a.values))] == pytest.approx(1.0, abs=a.grid.spacing)
    # the analytic Gaussian is already unit-norm, so no rescaling may be visible
    ref = gaussian_psi_p(a.nodes)
    assert np.max(np.abs(a.values - ref)) < 1e-6 * np.max(np.abs(ref))
    a.check()


def test_equal_components_match_single_component():
    single = build_amplitude(gaussian_spec())
    comp = GaussianComponent(0.7, 1.0, 0.05, -10.0)
    double = build_amplitude(WavePacketSpec((comp, comp), Direction.PLUS), single.grid)
    np.testing.assert_allclose(double.values, single.values, rtol=0, atol=1e-14)


def test_grid_not_covering_support_is_refused():
    spec = gaussian_spec()
    with pytest.raises(GridCoverageError):
        build_amplitude(spec, MomentumGrid(0.5, 1.2, 512))


@pytest.mark.parametrize("ratio", [20.0, 25.0, 40.0])
def test_tail_weight_erfc_oracle(ratio):
    w = gaussian_tail_weight(ratio, 1.0)
    assert w < 1e-20
    assert w == pytest.approx(0.5 * math.erfc(ratio / math.sqrt(2)), rel=1e-12)


def test_tail_weight_symmetric_at_zero_center():
    assert gaussian_tail_weight(0.0, 1.0) == 0.5


def test_tail_weight_two_components():
    comps = [GaussianComponent(1.0, 2.0, 0.1), GaussianComponent(0.5, 5.0, 0.2)]
    assert wrong_sign_tail_weight(comps) < 1e-20


def test_leaky_packet_is_rejected():
    with pytest.raises(ValueError):
        WavePacketSpec((GaussianComponent(1.0, 0.1, 0.1),), Direction.PLUS)


def test_polar_phase_is_linear_with_slope_minus_origin(canonical):
    modulus, phase = polar_decompose(canonical)
    core = modulus > 1e-3 * modulus.max()
    slope = np.gradient(phase, canonical.grid.spacing)[core]
    assert np.max(np.abs(slope - 10.0)) < 1e-6


def test_real_positive_amplitude_has_zero_phase():
    grid = MomentumGrid(0.5, 1.5, 201)
    a = MomentumAmplitude(grid, np.exp(-((grid.nodes - 1) ** 2) / 0.01) + 0j, Direction.PLUS,
                          PhysicalConstants())
    _, phase = polar_decompose(a)
    assert np.all(phase == 0.0)


def test_global_phase_shifts_phase_by_hbar_theta():
    c = PhysicalConstants(hbar=0.7)
    a = build_amplitude(gaussian_spec(x0=-2.0), c=c)
    theta = 0.4
    m0, ph0 = polar_decompose(a)
    m1, ph1 = polar_decompose(a.with_values(a.values * np.exp(1j * theta)))
    np.testing.assert_allclose(m1, m0, rtol=1e-14)
    support = m0 > 1e-8 * m0.max()
    shift = (ph1 - ph0)[support]
    # unwrap may land on a different sheet: compare modulo h
    shift = np.mod(shift - c.hbar * theta + c.h / 2, c.h) - c.h / 2
    assert np.max(np.abs(shift)) < 1e-9


def test_zero_amplitude_has_no_phase():
    grid = MomentumGrid(0.5, 1.5, 64)
    a = MomentumAmplitude(grid, np.zeros(64, complex), Direction.PLUS, PhysicalConstants())
    with pytest.raises(PhaseUndefinedError):
        polar_decompose(a)


def test_polar_reconstruction(canonical):
    modulus, phase = polar_decompose(canonical)
    rebuilt = modulus * np.exp(1j * phase / canonical.constants.hbar)
    np.testing.assert_allclose(rebuilt, canonical.values, rtol=0, atol=1e-12)


def test_normalization_is_bitwise_idempotent(canonical):
    once = canonical.normalized()
    assert np.array_equal(once.normalized().values, once.values)


def test_mirrored_packet_has_same_modulus():
    spec = gaussian_spec()
    plus = build_amplitude(spec)
    minus = build_amplitude(spec.mirrored(), plus.grid)
    assert minus.direction is Direction.MINUS
    np.testing.assert_array_equal(np.abs(minus.values), np.abs(plus.values))


def test_superpose_is_linear(canonical):
    other = canonical.with_values(canonical.values * np.exp(1j * canonical.nodes))
    s = superpose([canonical, other], [2.0, -1j])
    np.testing.assert_allclose(s.values, 2 * canonical.values - 1j * other.values, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(
    p0=st.floats(0.5, 5.0),
    rel=st.floats(0.01, 0.05),
    x0=st.floats(-20.0, 20.0),
)
def test_built_amplitudes_are_normalized(p0, rel, x0):
    a = build_amplitude(gaussian_spec(p0=p0, dp=rel * p0, x0=x0))
    assert abs(a.norm - 1.0) < 1e-12
    assert a.edge_ratio < 1e-12
