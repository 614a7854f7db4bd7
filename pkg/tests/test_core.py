import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csltrap.core import (AMU, E_CHARGE, MassDistribution, IonSpecies, build_porphyrin_barrel,
                          barium_ion, make_point_ion)


def test_barium_values():
    ba = barium_ion()
    assert ba.mass == pytest.approx(138 * AMU, rel=1e-15)
    assert ba.charge == E_CHARGE
    assert ba.is_point_like


def test_barrel_mass_and_charge():
    mol = build_porphyrin_barrel(2)
    assert mol.mass_amu == pytest.approx(8676.0, rel=1e-12)
    assert mol.charge_e == pytest.approx(24.0)
    assert mol.distribution.masses.size == 12


def test_barrel_geometry():
    mol = build_porphyrin_barrel(3, ring_radius=1e-9, ring_spacing=0.5e-9)
    off = mol.distribution.offsets
    np.testing.assert_allclose(np.hypot(off[:, 0], off[:, 1]), 1e-9, rtol=1e-12)
    np.testing.assert_allclose(sorted(set(np.round(off[:, 2] / 1e-10, 6))), [-5.0, 0.0, 5.0])
    assert np.linalg.norm(mol.distribution.center_of_mass) < 1e-24


def test_rotation_swaps_body_axis():
    mol = build_porphyrin_barrel(2)
    d = mol.distribution
    np.testing.assert_array_equal(d.rotated_to("z"), d.offsets)
    np.testing.assert_array_equal(d.rotated_to("x")[:, 0], d.offsets[:, 2])
    with pytest.raises(ValueError):
        d.rotated_to("q")


@pytest.mark.parametrize("bad", [
    dict(mass_amu=-1, charge_e=1), dict(mass_amu=10, charge_e=0), dict(mass_amu=10, charge_e=1.5)])
def test_point_ion_validation(bad):
    with pytest.raises(ValueError):
        make_point_ion(**bad)


def test_distribution_must_match_mass():
    d = MassDistribution(np.array([1.0, 1.0]), np.array([[0, 0, 1.0], [0, 0, -1.0]]))
    with pytest.raises(ValueError):
        IonSpecies(3.0, 1.0, d)
    off_centre = MassDistribution(np.array([1.0, 1.0]), np.array([[0, 0, 1.0], [0, 0, 0.0]]))
    with pytest.raises(ValueError):
        IonSpecies(2.0, 1.0, off_centre)


def test_distribution_arrays_read_only():
    d = build_porphyrin_barrel(1).distribution
    with pytest.raises(ValueError):
        d.masses[0] = 0.0


@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0))
@settings(max_examples=50, deadline=None)
def test_scaled_keeps_geometry(mf, cf):
    mol = build_porphyrin_barrel(2)
    s = mol.scaled(mf, cf)
    assert s.mass == pytest.approx(mol.mass * mf, rel=1e-12)
    assert s.charge == pytest.approx(mol.charge * cf, rel=1e-12)
    np.testing.assert_array_equal(s.distribution.offsets, mol.distribution.offsets)
