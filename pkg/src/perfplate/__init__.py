"""Rayleigh conductivity bounds and homogenized reflection by perforated plates."""

__version__ = "0.1.0"

from .conductivity import (
    ConductivityBounds,
    bounds_circular_bore,
    bounds_for,
    bounds_for_family,
    bounds_tilted_circular_opening,
    bounds_tilted_elliptical,
    bounds_untilted_cylinder,
    bounds_untilted_elliptical,
    eldredge_conductivity,
)
from .elliptic import ellip_d, ellip_e, ellip_k
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    GeometryError,
    PerfPlateError,
    ValidityError,
)
from .geometry import (
    CircularBoreSpec,
    IncidentWave,
    LatticeGeometry,
    PerforationGeometry,
    PlateScenario,
)
from .lattice_sum import lattice_s0
from .scattering import (
    compliance_first_order,
    compliance_second_order,
    reflection_from_compliance,
    rt_expansion,
    sweep,
)
