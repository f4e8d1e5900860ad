import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perfplate.errors import ValidityError
from perfplate.geometry import IncidentWave, LatticeGeometry
from perfplate.lattice_sum import (
    enumerate_modes,
    gamma_branch,
    lattice_s0,
    s0_direct,
    s0_ewald,
)

RECT = LatticeGeometry((3e-3, 0.0), (0.0, 2.7e-3))
STAGGERED = LatticeGeometry((3e-3, 0.0), (1.5e-3, 2.7e-3))
WAVE_45 = IncidentWave(1000.0, 343.0, math.radians(45.0))


def _identity(lat, wave, s0):
    return (2 * s0).imag * wave.kappa * lat.cell_area * wave.cos_phi


def test_only_fundamental_mode_propagates():
    modes = enumerate_modes(RECT, WAVE_45, cutoff=3)
    assert len(modes) == 49
    prop = [m for m in modes if m.propagating]
    assert [m.m for m in prop] == [(0, 0)]


def test_normal_incidence_fundamental_gamma():
    wave = IncidentWave(2000.0)
    (m0,) = [m for m in enumerate_modes(RECT, wave, 1) if m.m == (0, 0)]
    assert m0.gamma_m == pytest.approx(wave.kappa)
    assert np.allclose(m0.beta_m, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 100.0), st.floats(0.0, 100.0))
def test_gamma_branch(kappa, beta):
    g = complex(gamma_branch(kappa, beta))
    assert g.real >= 0 and g.imag >= 0
    assert g * g == pytest.approx(kappa**2 - beta**2, abs=1e-9 * (1 + kappa**2 + beta**2))


def test_static_limit_gamma_is_imaginary():
    g = gamma_branch(0.0, np.array([1.0, 2.5]))
    assert np.allclose(g, [1j, 2.5j])


def test_beta_m_uses_dual_basis():
    wave = IncidentWave(1500.0, phi=0.4, psi=0.7)
    for mode in enumerate_modes(STAGGERED, wave, 2):
        m1, m2 = mode.m
        expected = wave.bloch + 2 * math.pi * (m1 * STAGGERED.dual_basis[0] + m2 * STAGGERED.dual_basis[1])
        assert np.allclose(mode.beta_m, expected, rtol=1e-14, atol=1e-9)


def test_frozen_rectangular_value():
    res = lattice_s0(RECT, WAVE_45)
    assert res.method == "ewald"
    assert res.s0 == pytest.approx(-108.84543565 + 4765.5632167j, rel=1e-9)
    assert res.s0_scaled == pytest.approx(res.s0 * 3e-3)
    assert res.est_error_scaled <= 1e-8


def test_frozen_staggered_real_part():
    assert lattice_s0(STAGGERED, WAVE_45).s0.real == pytest.approx(-109.61334406, rel=1e-9)


def test_unit_square_cross_check():
    lat = LatticeGeometry((1.0, 0.0), (0.0, 1.0))
    kappa = 0.45 * 2 * math.pi
    wave = IncidentWave(kappa * 343.0 / (2 * math.pi))
    ew = lattice_s0(lat, wave).s0
    di = lattice_s0(lat, wave, method="direct_accelerated").s0
    assert ew == pytest.approx(-0.23025829032 + 0.17683882566j, abs=1e-10)
    assert abs(ew - di) <= 1e-7


def test_rectangular_identity():
    s0 = lattice_s0(RECT, WAVE_45).s0
    assert (2 * s0).imag == pytest.approx(1 / (WAVE_45.kappa * RECT.cell_area * WAVE_45.cos_phi), rel=1e-6)
    assert (2 * s0).imag == pytest.approx(9531.13, rel=1e-6)


lattices = st.sampled_from([RECT, STAGGERED, LatticeGeometry((2e-3, 0.0), (0.7e-3, 3.1e-3))])


@settings(max_examples=25, deadline=None)
@given(lattices, st.floats(100.0, 20000.0), st.floats(0.0, 1.3), st.floats(0.0, 2 * math.pi))
def test_identity_and_methods_agree(lat, freq, phi, psi):
    wave = IncidentWave(freq, 343.0, phi, psi)
    try:
        ew = lattice_s0(lat, wave)
    except ValidityError:
        return
    assert _identity(lat, wave, ew.s0) == pytest.approx(1.0, abs=1e-6)
    di = s0_direct(lat, wave)
    assert abs(ew.s0_scaled - di.s0_scaled) <= 1e-7


@pytest.mark.parametrize("factor", [0.6, 1.7])
def test_split_independence(factor):
    base = s0_ewald(RECT, WAVE_45, 1e-10)
    area = RECT.cell_area / RECT.spacing**2
    other = s0_ewald(RECT, WAVE_45, 1e-10, split=factor * math.sqrt(math.pi / area))
    assert abs(base.s0_scaled - other.s0_scaled) <= 1e-9


@pytest.mark.parametrize(
    "xi1, xi2",
    [
        ((0.0, 2.7e-3), (3e-3, 0.0)),
        ((3e-3, 0.0), (3e-3, 2.7e-3)),
        ((3e-3, 0.0), (-6e-3, 2.7e-3)),
        ((3e-3, 2.7e-3), (6e-3, 5.4e-3 + 2.7e-3)),
    ],
    ids=["swap", "shear", "shear_back", "unimodular"],
)
def test_basis_invariance(xi1, xi2):
    other = LatticeGeometry(xi1, xi2)
    assert other.cell_area == pytest.approx(RECT.cell_area)
    # the in-plane direction is kept fixed in space across relabelings
    a = lattice_s0(RECT, WAVE_45).s0_scaled
    b = lattice_s0(other, WAVE_45).s0_scaled
    assert abs(a - b) <= 1e-9


def test_grating_lobe_rejected():
    with pytest.raises(ValidityError):
        lattice_s0(RECT, IncidentWave(60000.0))
    at_limit = IncidentWave(343.0 / 6e-3)
    with pytest.raises(ValidityError):
        lattice_s0(RECT, at_limit)


def test_bad_arguments():
    with pytest.raises(ValueError):
        lattice_s0(RECT, WAVE_45, tol=0.0)
    with pytest.raises(ValueError):
        lattice_s0(RECT, WAVE_45, method="brute")
