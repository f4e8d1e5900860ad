"""Reflection and transmission by a homogenized perforated plate.

Time dependence is exp(-i omega t). With ``c = 1 / (kappa A cos(phi))`` the
raw second-order expansions in the Rayleigh conductivity read

    R = 1 - 2i c K_R + 8i c s0 K_R^2
    T = 2i c K_R - 2i c s0 (4 K_R^2 + i kappa tau' . mu_n)

Compliance-based models instead impose ``d3 p+ = d3 p- = K (p+ - p-)`` with
a real K, which gives ``R = 1 / (1 - 2K / (i kappa cos(phi)))`` and
``T = 1 - R``; these conserve energy exactly.
"""

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from .conductivity import bounds_for
from .errors import PerfPlateError, ValidityError
from .geometry import IncidentWave, LatticeGeometry, PlateScenario, validate_homogenization
from .lattice_sum import DEFAULT_TOL, lattice_s0

__all__ = [
    "ScatteringResult",
    "FluxResult",
    "SweepRow",
    "AsymptoticValidityWarning",
    "AXISYMMETRIC_ZERO",
    "UNAVAILABLE",
    "MODELS",
    "compliance_first_order",
    "compliance_second_order",
    "second_order_factor",
    "reflection_from_compliance",
    "weighted_fluxes",
    "rt_expansion",
    "mu_n_axisymmetric",
    "scenario_kr",
    "taylor_coefficients",
    "sweep",
    "phase_deg",
]

AXISYMMETRIC_ZERO = "axisymmetric-zero"
UNAVAILABLE = "unavailable"
MODELS = ("order1", "order2", "raw")


class AsymptoticValidityWarning(UserWarning):
    """The second-order compliance factor 1 - 4 K_R Re(s0) is not positive."""


def phase_deg(z) -> float:
    """Argument of z in degrees, in (-180, 180]."""
    d = math.degrees(math.atan2(z.imag, z.real))
    return 180.0 if d == -180.0 else d


@dataclass(frozen=True)
class ScatteringResult:
    order: int
    R: complex
    T: complex
    K_eff: float = float("nan")                  # 1/m
    s0_used: complex = complex("nan")            # 1/m
    delta: float = float("nan")                  # d / L, diagnostic only
    mu_n: Union[str, tuple, None] = None
    degraded: bool = False                       # T truncated to first order
    flags: tuple = ()

    @property
    def abs_R(self) -> float:
        return abs(self.R)

    @property
    def abs_T(self) -> float:
        return abs(self.T)

    @property
    def phase_R_deg(self) -> float:
        return phase_deg(self.R)

    @property
    def energy_defect(self) -> float:
        """1 - |R|^2 - |T|^2."""
        return 1.0 - abs(self.R) ** 2 - abs(self.T) ** 2


@dataclass(frozen=True)
class FluxResult:
    """Weighted fluxes through the two openings of a cell, in metres.

    The leading term of both is ``2 K_R`` (``2 delta K_R_hat`` in scaled
    variables).
    """

    Q_plus: complex
    Q_minus: complex


def _lattice_area(lat: LatticeGeometry) -> float:
    return lat.cell_area


def compliance_first_order(kr: float, lat: LatticeGeometry) -> float:
    """K_R / A, in 1/m."""
    if not kr >= 0:
        raise ValueError(f"K_R must be >= 0, got {kr!r}")
    return kr / _lattice_area(lat)


def second_order_factor(kr: float, s0: complex) -> float:
    """1 - 4 K_R Re(s0)."""
    return 1.0 - 4.0 * kr * complex(s0).real


def compliance_second_order(kr: float, lat: LatticeGeometry, s0: complex) -> float:
    """(K_R / A) (1 - 4 K_R Re(s0)), in 1/m.

    Emits :class:`AsymptoticValidityWarning` when ``4 K_R Re(s0) >= 1``.
    """
    factor = second_order_factor(kr, s0)
    if factor <= 0:
        warnings.warn(
            f"4 K_R Re(s0) = {1 - factor:.6g} >= 1: second-order compliance "
            "is outside its asymptotic range",
            AsymptoticValidityWarning,
            stacklevel=2,
        )
    return compliance_first_order(kr, lat) * factor


def reflection_from_compliance(K_eff: float, wave: IncidentWave, order: int = 1, s0_used=complex("nan"), delta=float("nan"), flags=()) -> ScatteringResult:
    """R = 1 / (1 - 2K / (i kappa cos(phi))), T = 1 - R."""
    K_eff = float(K_eff)
    if math.isinf(K_eff):
        R = 0j
    else:
        x = 2.0 * K_eff / (wave.kappa * wave.cos_phi)
        R = 1.0 / (1.0 + 1j * x)
    return ScatteringResult(order, R, 1.0 - R, K_eff, complex(s0_used), delta, None, False, tuple(flags))


def weighted_fluxes(kr: float, s0: Optional[complex] = None) -> FluxResult:
    """Weighted fluxes for an axisymmetric (or infinitely thin) perforation.

    ``Q+ = Q- = 2 K_R - 8 s0 K_R^2``; first order when ``s0`` is None.
    """
    q = 2.0 * kr + 0j
    if s0 is not None:
        q -= 8.0 * s0 * kr * kr
    return FluxResult(q, q)


def mu_n_axisymmetric(kr: float, h: float, delta: float) -> np.ndarray:
    """Scaled dipole moment (0, 0, h K_R / delta^2) of an axisymmetric hole.

    Multiply by ``delta**2`` for the physical moment ``h K_R e3`` (m^2).
    Its contraction with the in-plane direction tau' always vanishes.
    """
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta!r}")
    return np.array([0.0, 0.0, h * kr / delta**2])


def rt_expansion(kr: float, lat: LatticeGeometry, wave: IncidentWave, s0: complex, mu_n=AXISYMMETRIC_ZERO, delta=float("nan")) -> ScatteringResult:
    """Raw second-order expansions of R and T in K_R.

    ``mu_n`` is the physical dipole moment (3-vector, m^2), the marker
    ``"axisymmetric-zero"`` (contraction with tau' taken as 0) or
    ``"unavailable"``, in which case T is truncated to first order and the
    result is flagged as degraded. R never depends on ``mu_n``.
    """
    if not lat.spacing < wave.wavelength / 2.0:
        raise ValidityError(
            f"L = {lat.spacing:.6g} m is not below half a wavelength ({wave.wavelength / 2:.6g} m)"
        )
    c = 1.0 / (wave.kappa * lat.cell_area * wave.cos_phi)
    s0 = complex(s0)
    R = 1.0 - 2j * c * kr + 8j * c * s0 * kr * kr
    degraded = False
    if isinstance(mu_n, str):
        if mu_n == AXISYMMETRIC_ZERO:
            contraction = 0.0
            marker = mu_n
        elif mu_n == UNAVAILABLE:
            contraction = None
            marker = mu_n
        else:
            raise ValueError(f"unknown mu_n marker {mu_n!r}")
    else:
        vec = np.asarray(mu_n, dtype=float)
        if vec.shape != (3,):
            raise ValueError("mu_n must be a 3-vector")
        contraction = float(wave.tau_prime @ vec[:2])
        marker = tuple(vec)
    if contraction is None:
        T = 2j * c * kr
        degraded = True
    else:
        T = 2j * c * kr - 2j * c * s0 * (4.0 * kr * kr + 1j * wave.kappa * contraction)
    flags = ("degraded-order-T",) if degraded else ()
    return ScatteringResult(2, R, T, float("nan"), s0, delta, marker, degraded, flags)


def taylor_coefficients(func, n_terms: int, radius: float, n_points: int = 64) -> np.ndarray:
    """First ``n_terms`` Taylor coefficients at 0 of an analytic scalar
    function, by the trapezoidal rule on the circle |t| = radius."""
    t = radius * np.exp(2j * np.pi * np.arange(n_points) / n_points)
    vals = np.array([func(z) for z in t])
    coeffs = np.fft.fft(vals) / n_points
    return coeffs[:n_terms] / radius ** np.arange(n_terms)


def scenario_kr(scenario: PlateScenario, choice: str = "mean") -> float:
    """Rayleigh conductivity of the scenario's hole from its analytic bounds."""
    b = bounds_for(scenario.perforation, scenario.bore)
    if choice == "mean":
        return b.mean_kr
    if choice == "lower":
        return b.k_lower
    if choice == "upper":
        return b.k_upper
    raise ValueError(f"unknown K_R choice {choice!r}")


@dataclass(frozen=True)
class SweepRow:
    freq_hz: float
    model: str
    result: Optional[ScatteringResult]
    valid: bool
    L_over_lambda: float
    errors: tuple = field(default=())

    def as_dict(self):
        r = self.result
        nan = float("nan")
        s0 = r.s0_used if r is not None else complex(nan, nan)
        return {
            "freq_hz": self.freq_hz,
            "abs_R": r.abs_R if r else nan,
            "phase_R_deg": r.phase_R_deg if r else nan,
            "abs_T": r.abs_T if r else nan,
            "phase_T_deg": phase_deg(r.T) if r else nan,
            "K_eff": r.K_eff if r else nan,
            "Re_s0": s0.real,
            "Im_s0": s0.imag,
            "energy_defect": r.energy_defect if r else nan,
            "L_over_lambda": self.L_over_lambda,
            "valid": self.valid,
        }


def _sweep_row(args):
    scenario, freq, model, kr, tol = args
    wave = scenario.wave.with_frequency(freq)
    sc = PlateScenario(scenario.perforation, scenario.lattice, wave, scenario.bore)
    report = validate_homogenization(sc)
    lat = sc.lattice
    delta = sc.perforation.size / lat.spacing
    errors = []
    if not report.valid:
        errors.append("L >= lambda/2: homogenization invalid")
    try:
        if model == "order1":
            res = reflection_from_compliance(compliance_first_order(kr, lat), wave, 1, delta=delta)
        else:
            s0 = lattice_s0(lat, wave, tol).s0
            if model == "order2":
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always", AsymptoticValidityWarning)
                    k2 = compliance_second_order(kr, lat, s0)
                flags = ("compliance-sign-flip",) if caught else ()
                res = reflection_from_compliance(k2, wave, 2, s0, delta, flags)
            elif model == "raw":
                marker = AXISYMMETRIC_ZERO if sc.perforation.is_axisymmetric else UNAVAILABLE
                res = rt_expansion(kr, lat, wave, s0, marker, delta)
            else:
                raise ValueError(f"unknown model {model!r}")
    except PerfPlateError as exc:
        errors.append(str(exc))
        res = None
    valid = report.valid and res is not None
    return SweepRow(float(freq), model, res, valid, report.ratio, tuple(errors))


def _resolve_jobs(jobs):
    if jobs is None:
        jobs = int(os.environ.get("PERFPLATE_JOBS", "1") or 1)
    return max(1, int(jobs))


def sweep(scenario: PlateScenario, freqs: Sequence[float], model: str = "order2", kr: Optional[float] = None, kr_choice: str = "mean", tol: float = DEFAULT_TOL, jobs: Optional[int] = None) -> List[SweepRow]:
    """R and T over a frequency grid, one row per frequency in input order.

    Validity problems are reported per row and never abort the sweep.
    ``jobs`` (default: ``PERFPLATE_JOBS`` or 1) sets the process count.
    """
    freqs = [float(f) for f in freqs]
    if not freqs:
        raise ValueError("frequency grid is empty")
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; choose from {MODELS}")
    if kr is None:
        kr = scenario_kr(scenario, kr_choice)
    tasks = [(scenario, f, model, kr, tol) for f in freqs]
    jobs = _resolve_jobs(jobs)
    if jobs == 1 or len(tasks) == 1:
        return [_sweep_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_row, tasks))
