import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csltrap.core import barium_ion, build_porphyrin_barrel
from csltrap.errors import RadialUnconfinedError
from csltrap.trap import (MathieuPoint, StabilityReason, TrapConfig, axial_frequency,
                          epsilon_squared, in_mathieu_zone, ion_stable, mathieu_integrate,
                          mathieu_integrate_grid, mathieu_params, mathieu_trajectory,
                          secular_frequencies, stability_boundaries, stability_classify)

TWO_PI = 2 * math.pi


def test_reference_barium_frequencies(trap):
    wz, wr = secular_frequencies(barium_ion(), trap)
    assert wz / TWO_PI == pytest.approx(100e3, rel=0.01)
    assert wr / TWO_PI == pytest.approx(242e3, rel=0.01)


def test_reference_mathieu_values(trap):
    p = mathieu_params(barium_ion(), trap)
    assert p.a == pytest.approx(-7.378723479292959e-4, rel=1e-12)
    assert p.q == pytest.approx(0.13642940614257565, rel=1e-12)


def test_radial_frequency_from_mathieu(trap):
    ion = barium_ion()
    p = mathieu_params(ion, trap)
    wr = secular_frequencies(ion, trap)[1]
    assert wr == pytest.approx(0.5 * trap.omega_rf * math.sqrt(p.q**2 / 2 + p.a), rel=1e-14)


def test_epsilon_squared_is_q2_over_4a(trap):
    for ion in (barium_ion(), build_porphyrin_barrel(2)):
        p = mathieu_params(ion, trap)
        assert epsilon_squared(ion, trap) == pytest.approx(p.q**2 / (4 * abs(p.a)), rel=1e-13)
        wz, wr = secular_frequencies(ion, trap)
        assert wr**2 == pytest.approx((epsilon_squared(ion, trap) - 0.5) * wz**2, rel=1e-12)


def test_radially_unconfined_raises(trap):
    weak = trap.with_voltages(v_rf=1.0)
    with pytest.raises(RadialUnconfinedError):
        secular_frequencies(barium_ion(), weak)


def test_boundaries_at_zero():
    a0, b1 = stability_boundaries(0.0)
    assert a0 == 0.0 and b1 == 1.0


def test_boundaries_vectorised():
    q = np.linspace(0, 0.9, 7)
    a0, b1 = stability_boundaries(q)
    assert a0.shape == (7,) and np.all(a0 < b1)


@pytest.mark.parametrize("a, q, reason", [
    (0.0, 0.3, StabilityReason.A_NONNEGATIVE),
    (0.01, 0.3, StabilityReason.A_NONNEGATIVE),
    (-0.2, 0.3, StabilityReason.BELOW_A0),
    (-0.01, 0.3, StabilityReason.OK),
])
def test_classify_reasons(a, q, reason):
    v = stability_classify(MathieuPoint(a, q))
    assert v.reason is reason
    assert bool(v) is (reason is StabilityReason.OK)


def test_classify_above_b1():
    # b1 drops below zero past q ~ 0.91
    a0, b1 = stability_boundaries(0.95)
    assert b1 < 0
    assert stability_classify(MathieuPoint(b1 + 1e-3, 0.95)).reason is StabilityReason.ABOVE_B1


def test_reference_ions_stable(trap):
    assert ion_stable(barium_ion(), trap)
    assert ion_stable(build_porphyrin_barrel(2), trap)


def test_integrate_bounded_and_unbounded():
    assert mathieu_integrate(MathieuPoint(-0.001, 0.2))[0]
    assert not mathieu_integrate(MathieuPoint(-0.1, 0.2))[0]


def test_integrate_zero_q_is_cosine():
    tau, rho = mathieu_trajectory(MathieuPoint(0.25, 0.0), n_periods=4)
    np.testing.assert_allclose(rho, np.cos(0.5 * tau), atol=1e-9)


def test_grid_matches_scalar():
    a = np.array([-0.01, -0.2, 0.02])
    q = np.array([0.3, 0.3, 0.1])
    bounded, peaks = mathieu_integrate_grid(a, q, n_periods=100)
    for i in range(3):
        b, pk = mathieu_integrate(MathieuPoint(a[i], q[i]), n_periods=100)
        assert b == bounded[i]
        assert pk == peaks[i]


def _zero_crossing_frequency(p, n_periods=400):
    tau, rho = mathieu_trajectory(p, n_periods)
    s = np.sign(rho)
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    t0 = tau[idx] - rho[idx] * (tau[idx + 1] - tau[idx]) / (rho[idx + 1] - rho[idx])
    half_periods = (t0[-1] - t0[0]) / (len(t0) - 1)
    return math.pi / half_periods  # angular frequency in tau units


@pytest.mark.parametrize("a, q", [(-0.0007, 0.136), (-0.001, 0.05), (0.0, 0.2)])
def test_secular_frequency_from_trajectory(a, q):
    # tau = Omega t / 2, so omega_sec / Omega = nu / 2 with nu = sqrt(a + q^2/2)
    nu = _zero_crossing_frequency(MathieuPoint(a, q))
    assert nu == pytest.approx(math.sqrt(q**2 / 2 + a), rel=0.02)


@given(st.floats(-0.3, -1e-4), st.floats(0.0, 0.9))
@settings(max_examples=200, deadline=None)
def test_classifier_is_zone_and_negative_a(a, q):
    v = stability_classify(MathieuPoint(a, q))
    assert v.stable == bool(in_mathieu_zone(a, q))


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.5))
@settings(max_examples=100, deadline=None)
def test_nonnegative_a_rejected(a, q):
    assert not stability_classify(MathieuPoint(a, q)).stable


@given(st.floats(1.0, 30.0), st.floats(100.0, 2000.0))
@settings(max_examples=50, deadline=None)
def test_axial_frequency_scaling(v_end, v_rf):
    base = TrapConfig(v_end=1.0, v_rf=v_rf)
    t = base.with_voltages(v_end=v_end)
    ion = barium_ion()
    assert axial_frequency(ion, t) == pytest.approx(axial_frequency(ion, base) * math.sqrt(v_end),
                                                    rel=1e-12)


@pytest.mark.parametrize("kw", [dict(kappa=0), dict(kappa=1.2), dict(v_end=0), dict(v_rf=-1),
                                dict(z0=0), dict(omega_rf=-1)])
def test_trap_validation(kw):
    with pytest.raises(ValueError):
        TrapConfig(**kw)


def test_from_lab_units(trap):
    t = TrapConfig.from_lab_units(0.248, 5.2e6, 2.03, 2.63, 4.68, 720.4)
    assert t.omega_rf == pytest.approx(trap.omega_rf, rel=1e-15)
    assert t.z0 == pytest.approx(trap.z0, rel=1e-15)
