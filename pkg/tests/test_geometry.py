import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perfplate.errors import GeometryError
from perfplate.geometry import (
    LOW_POROSITY_LIMIT,
    CircularBoreSpec,
    IncidentWave,
    LatticeGeometry,
    PerforationGeometry,
    PlateScenario,
    porosity,
    validate_homogenization,
)

SQUARE = LatticeGeometry((3e-3, 0.0), (0.0, 3e-3))


def test_perforation_eccentricity_and_area():
    g = PerforationGeometry(2.0, 1.0, 0.5)
    assert g.eccentricity == pytest.approx(math.sqrt(3) / 2)
    assert g.opening_area == pytest.approx(2 * math.pi)
    assert not g.is_axisymmetric
    assert PerforationGeometry(1.0, 1.0, 0.5).is_axisymmetric


@pytest.mark.parametrize(
    "args",
    [(1.0, 2.0, 1.0, 0.0), (1.0, 0.0, 1.0, 0.0), (1.0, 1.0, -1.0, 0.0), (1.0, 1.0, 1.0, math.pi / 2)],
)
def test_perforation_rejects(args):
    with pytest.raises(GeometryError):
        PerforationGeometry(*args)


def test_explicit_ecc_must_match():
    with pytest.raises(GeometryError):
        PerforationGeometry(2.0, 1.0, 1.0, ecc=0.1)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.5))
def test_bore_maps_to_ellipse(theta):
    g = CircularBoreSpec(1e-3, 2e-3, theta).to_perforation()
    assert g.a == pytest.approx(1e-3 / math.cos(theta))
    assert g.b == 1e-3
    assert g.eccentricity == pytest.approx(math.sin(theta), abs=1e-12)


def test_lattice_basic_quantities():
    lat = LatticeGeometry((3e-3, 0.0), (0.0, 2.7e-3))
    assert lat.cell_area == pytest.approx(8.1e-6)
    assert lat.spacing == pytest.approx(3e-3)
    assert lat.reciprocal_basis.shape == (2, 2)


def test_lattice_collinear_rejected():
    with pytest.raises(GeometryError):
        LatticeGeometry((1.0, 0.0), (2.0, 0.0))


@settings(max_examples=100, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5))
def test_spacing_is_basis_invariant(m, n):
    a, b = np.array([3e-3, 0.0]), np.array([1.5e-3, 2.6e-3])
    base = LatticeGeometry(tuple(a), tuple(b))
    other = LatticeGeometry(tuple(a), tuple(b + m * a)) if n == 0 else LatticeGeometry(tuple(a + n * b), tuple(b))
    assert other.spacing == pytest.approx(base.spacing, rel=1e-12)
    assert other.cell_area == pytest.approx(base.cell_area, rel=1e-12)


def test_dual_basis_duality():
    lat = LatticeGeometry((3e-3, 0.4e-3), (1e-3, 2.5e-3))
    prod = lat.basis @ lat.dual_basis.T
    assert np.allclose(prod, np.eye(2), atol=1e-12)


def test_incident_wave():
    w = IncidentWave(1000.0, 343.0, math.radians(30.0), psi=math.pi / 2)
    assert w.kappa == pytest.approx(2 * math.pi * 1000 / 343)
    assert w.wavelength == pytest.approx(0.343)
    assert np.allclose(w.tau_prime, [0.0, 0.5], atol=1e-15)
    with pytest.raises(GeometryError):
        IncidentWave(0.0)
    with pytest.raises(GeometryError):
        IncidentWave(100.0, phi=math.pi / 2)


def test_porosity_conventions():
    bore = CircularBoreSpec(0.5e-3, 1e-3, math.radians(60.0))
    s = PlateScenario.from_bore(bore, SQUARE, IncidentWave(1000.0))
    p = porosity(s)
    assert p.bore == pytest.approx(math.pi * 0.25e-6 / 9e-6)
    assert p.opening == pytest.approx(2 * p.bore)


def test_low_porosity_flag():
    small = PlateScenario(PerforationGeometry(0.2e-3, 0.2e-3, 1e-3), SQUARE, IncidentWave(1000.0))
    big = PlateScenario(PerforationGeometry(1.4e-3, 1.4e-3, 1e-3), SQUARE, IncidentWave(1000.0))
    assert porosity(small).opening <= LOW_POROSITY_LIMIT
    assert validate_homogenization(small).low_porosity
    assert not validate_homogenization(big).low_porosity


def test_homogenization_strict_half_wavelength():
    lat = LatticeGeometry((0.1715, 0.0), (0.0, 0.1))
    g = PerforationGeometry(1e-3, 1e-3, 1e-3)
    at_limit = validate_homogenization(PlateScenario(g, lat, IncidentWave(1000.0)))
    assert at_limit.ratio == pytest.approx(0.5)
    assert not at_limit.valid
    below = validate_homogenization(PlateScenario(g, lat, IncidentWave(999.0)))
    assert below.valid
