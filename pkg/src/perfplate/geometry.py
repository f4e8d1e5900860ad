"""Value types for the perforation, the lattice and the incident wave.

Everything is stored in SI units (metres, radians, hertz). Conversion from
the millimetre / degree values used in scenario files happens in
:mod:`perfplate.scenario`.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import GeometryError

__all__ = [
    "PerforationGeometry",
    "CircularBoreSpec",
    "LatticeGeometry",
    "IncidentWave",
    "PlateScenario",
    "ValidityReport",
    "Porosity",
    "porosity",
    "validate_homogenization",
    "LOW_POROSITY_LIMIT",
]

# Above this open-area fraction neighbouring apertures interact.
LOW_POROSITY_LIMIT = 0.04


@dataclass(frozen=True)
class PerforationGeometry:
    """Perforation whose cross-section by any plane parallel to the plate is
    an ellipse of semi-axes ``a >= b``, through a plate of thickness ``h``,
    tilted by ``theta`` from the plate normal in the direction of ``a``.

    ``ecc`` may be given explicitly when it is known in closed form (a tilted
    circular bore has ``ecc = sin(theta)``); it must agree with ``a, b``.
    """

    a: float
    b: float
    h: float
    theta: float = 0.0
    ecc: Optional[float] = None

    def __post_init__(self):
        a, b, h, theta = self.a, self.b, self.h, self.theta
        if not (b > 0 and a >= b):
            raise GeometryError(f"need a >= b > 0, got a={a!r}, b={b!r}")
        if not h >= 0:
            raise GeometryError(f"thickness must be >= 0, got {h!r}")
        if not 0 <= theta < math.pi / 2:
            raise GeometryError(f"tilt must lie in [0, pi/2), got {theta!r}")
        ecc_ab = math.sqrt((a - b) * (a + b)) / a
        if self.ecc is None:
            object.__setattr__(self, "ecc", ecc_ab)
        elif abs(self.ecc**2 - ecc_ab**2) > 1e-12:
            raise GeometryError(
                f"eccentricity {self.ecc!r} inconsistent with a={a!r}, b={b!r}"
            )

    @property
    def eccentricity(self) -> float:
        return self.ecc

    @property
    def opening_area(self) -> float:
        return math.pi * self.a * self.b

    @property
    def is_axisymmetric(self) -> bool:
        return self.a == self.b and self.theta == 0.0

    @property
    def size(self) -> float:
        """Characteristic size d = max(2a, 2b) of the opening."""
        return 2.0 * self.a


@dataclass(frozen=True)
class CircularBoreSpec:
    """Hole drilled with a bit of radius ``r`` at tilt ``theta``."""

    r: float
    h: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise GeometryError(f"drill radius must be > 0, got {self.r!r}")
        if not self.h >= 0:
            raise GeometryError(f"thickness must be >= 0, got {self.h!r}")
        if not 0 <= self.theta < math.pi / 2:
            raise GeometryError(f"tilt must lie in [0, pi/2), got {self.theta!r}")

    @property
    def bore_area(self) -> float:
        return math.pi * self.r**2

    def to_perforation(self) -> PerforationGeometry:
        # the bore cuts the plate faces along a = r / cos(theta), b = r
        return PerforationGeometry(
            a=self.r / math.cos(self.theta),
            b=self.r,
            h=self.h,
            theta=self.theta,
            ecc=math.sin(self.theta),
        )


@dataclass(frozen=True)
class LatticeGeometry:
    """Doubly periodic lattice spanned by ``xi1`` and ``xi2`` (metres)."""

    xi1: Tuple[float, float]
    xi2: Tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "xi1", tuple(float(v) for v in self.xi1))
        object.__setattr__(self, "xi2", tuple(float(v) for v in self.xi2))
        if len(self.xi1) != 2 or len(self.xi2) != 2:
            raise GeometryError("lattice vectors must be 2-vectors")
        if not self.cell_area > 0:
            raise GeometryError("lattice vectors are collinear (zero cell area)")

    @property
    def _cross(self) -> float:
        (x1, y1), (x2, y2) = self.xi1, self.xi2
        return x1 * y2 - y1 * x2

    @property
    def cell_area(self) -> float:
        return abs(self._cross)

    @property
    def reduced_basis(self) -> np.ndarray:
        """Lagrange-Gauss reduced basis (shortest vector first)."""
        u = np.array(self.xi1)
        v = np.array(self.xi2)
        if u @ u > v @ v:
            u, v = v, u
        while True:
            v = v - round(float(u @ v) / float(u @ u)) * u
            if v @ v >= u @ u:
                return np.array([u, v])
            u, v = v, u

    @property
    def spacing(self) -> float:
        """L: length of the longer reduced basis vector (basis independent)."""
        return float(np.linalg.norm(self.reduced_basis[1]))

    @property
    def basis(self) -> np.ndarray:
        """Rows are xi1, xi2."""
        return np.array([self.xi1, self.xi2])

    @property
    def dual_basis(self) -> np.ndarray:
        """Rows xi1*, xi2* with xi_i* . xi_j = delta_ij."""
        (x1, y1), (x2, y2) = self.xi1, self.xi2
        det = self._cross
        return np.array([[y2 / det, -x2 / det], [-y1 / det, x1 / det]])

    @property
    def reciprocal_basis(self) -> np.ndarray:
        """Rows 2*pi*xi_i*."""
        return 2.0 * math.pi * self.dual_basis

    def scaled(self, factor: float) -> "LatticeGeometry":
        return LatticeGeometry(
            tuple(factor * v for v in self.xi1), tuple(factor * v for v in self.xi2)
        )


@dataclass(frozen=True)
class IncidentWave:
    """Plane wave of frequency ``frequency`` incident at polar angle ``phi``.

    The in-plane direction of propagation is given by the azimuth ``psi``
    (measured from the x1 axis); ``tau_prime = sin(phi) (cos psi, sin psi)``.
    Time dependence is exp(-i omega t).
    """

    frequency: float
    c0: float = 343.0
    phi: float = 0.0
    psi: float = 0.0

    def __post_init__(self):
        if not self.frequency > 0:
            raise GeometryError(f"frequency must be > 0, got {self.frequency!r}")
        if not self.c0 > 0:
            raise GeometryError(f"sound speed must be > 0, got {self.c0!r}")
        if not abs(self.phi) < math.pi / 2:
            raise GeometryError(f"|phi| must be < pi/2, got {self.phi!r}")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.frequency

    @property
    def kappa(self) -> float:
        return self.omega / self.c0

    @property
    def wavelength(self) -> float:
        return self.c0 / self.frequency

    @property
    def tau_prime(self) -> np.ndarray:
        s = math.sin(self.phi)
        return np.array([s * math.cos(self.psi), s * math.sin(self.psi)])

    @property
    def bloch(self) -> np.ndarray:
        return self.kappa * self.tau_prime

    @property
    def cos_phi(self) -> float:
        return math.cos(self.phi)

    def with_frequency(self, frequency: float) -> "IncidentWave":
        return IncidentWave(frequency, self.c0, self.phi, self.psi)


@dataclass(frozen=True)
class PlateScenario:
    perforation: PerforationGeometry
    lattice: LatticeGeometry
    wave: IncidentWave
    bore: Optional[CircularBoreSpec] = field(default=None, compare=False)

    @classmethod
    def from_bore(cls, bore: CircularBoreSpec, lattice, wave) -> "PlateScenario":
        return cls(bore.to_perforation(), lattice, wave, bore)


@dataclass(frozen=True)
class Porosity:
    opening: float
    bore: Optional[float]

    @property
    def low(self) -> bool:
        # either convention may be the relevant one; warn if either is high
        values = [self.opening] + ([self.bore] if self.bore is not None else [])
        return max(values) <= LOW_POROSITY_LIMIT


def porosity(s: PlateScenario) -> Porosity:
    """Open-area fraction by opening (pi a b / A) and, for drilled bores,
    by bore cross-section (pi r^2 / A)."""
    area = s.lattice.cell_area
    opening = s.perforation.opening_area / area
    if s.bore is not None:
        bore = s.bore.bore_area / area
    elif s.perforation.theta == 0.0:
        bore = opening
    else:
        bore = None
    return Porosity(opening, bore)


@dataclass(frozen=True)
class ValidityReport:
    spacing: float
    wavelength: float
    ratio: float
    valid: bool
    porosity: Porosity
    low_porosity: bool

    def as_dict(self):
        return {
            "L_m": self.spacing,
            "wavelength_m": self.wavelength,
            "L_over_lambda": self.ratio,
            "homogenization_valid": self.valid,
            "opening_porosity": self.porosity.opening,
            "bore_porosity": self.porosity.bore,
            "low_porosity": self.low_porosity,
        }


def validate_homogenization(s: PlateScenario) -> ValidityReport:
    """Check L < lambda/2 (strict) and classify the porosity."""
    spacing = s.lattice.spacing
    lam = s.wave.wavelength
    por = porosity(s)
    return ValidityReport(
        spacing=spacing,
        wavelength=lam,
        ratio=spacing / lam,
        valid=spacing < lam / 2.0,
        porosity=por,
        low_porosity=por.low,
    )
