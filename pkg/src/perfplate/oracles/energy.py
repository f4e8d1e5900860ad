"""Half-space energies of the elliptic-disc potentials and their role in the
variational bounds.

With the 1/(2 pi) kernel, the potential f of a density rho has
``-d3 f = rho`` on the disc, so the Dirichlet energy in one half-space is
``int_A rho f``. This gives

* ``I_w = int_A rho_w          = 4 a K(0)/K(eps)``
* ``I_t = int_A x1 rho_t        = (8/3) a^3 D(0)/D(eps)``
* ``I_z = 1/(2 pi) int_A int_A 1/|x-y| = (8/3) a b^2 K(eps)/K(0)``  (unit density)

Each closed form is checked by quadrature, then the Dirichlet and Kelvin
quadratics are rebuilt from these energies alone and their extrema compared
with :func:`perfplate.conductivity.bounds_tilted_elliptical`.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from ..conductivity import VariationalQuadratic, bounds_tilted_elliptical
from ..elliptic import ellip_d, ellip_k
from ..geometry import PerforationGeometry
from .densities import SourceDensity, _potential, disc_integral

__all__ = [
    "EnergyReport",
    "energy_closed_forms",
    "energy_quadrature",
    "dirichlet_from_energies",
    "kelvin_from_energies",
    "verify_energy_integrals",
]

_K0 = math.pi / 2.0
_D0 = math.pi / 4.0


def energy_closed_forms(a, b) -> Dict[str, float]:
    eps = math.sqrt((a - b) * (a + b)) / a
    k, d = ellip_k(eps), ellip_d(eps)
    return {
        "I_w": 4.0 * a * _K0 / k,
        "I_t": 8.0 / 3.0 * a**3 * _D0 / d,
        "I_z": 8.0 / 3.0 * a * b * b * k / _K0,
    }


def energy_quadrature(a, b, n=48) -> Dict[str, float]:
    """The three energies by direct quadrature of the densities."""
    w = SourceDensity("rho_w", a, b)
    t = SourceDensity("rho_t", a, b)
    i_w = disc_integral(lambda y1, y2: w.amplitude(y1, y2), a, b, n, n)
    i_t = disc_integral(lambda y1, y2: y1 * t.amplitude(y1, y2), a, b, n, n)
    # unit-density potential integrated over the disc; its edge behaviour
    # is smooth enough for the plain rule at this accuracy
    unit = SourceDensity("rho_z", a, b)
    x, gw = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * gw
    phi = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    total = 0.0
    for ui, wi in zip(u, wu):
        for p in phi:
            f = 2.0 * _potential(unit, (a * ui * math.cos(p), b * ui * math.sin(p), 0.0), 48, 64)
            total += f * wi * ui * a * b * 2.0 * math.pi / n
    return {"I_w": i_w, "I_t": i_t, "I_z": total}


def dirichlet_from_energies(g: PerforationGeometry, energies) -> VariationalQuadratic:
    """J1(alpha) built from I_w and I_t: each half-space carries a drop of
    (1 - 2 alpha)/2 of the w-potential, the channel a uniform gradient
    2 alpha / h plus the tilt correction carried by t."""
    a, b, h, th = g.a, g.b, g.h, g.theta
    outer = 0.5 * energies["I_w"]
    c2 = math.cos(th) ** 2
    inner = 4.0 * math.pi * a * b * c2 / h + 8.0 * energies["I_t"] * c2 * math.sin(th) ** 2 / h**2
    return VariationalQuadratic(outer, -4.0 * outer, 4.0 * outer + inner)


def kelvin_from_energies(g: PerforationGeometry, energies) -> VariationalQuadratic:
    """J2(beta) built from I_z: the trial flux is beta/(pi a b) per unit
    opening area, i.e. density beta/(2 pi a b) on each face."""
    a, b, h, th = g.a, g.b, g.h, g.theta
    s = math.pi * a * b
    energy = 2.0 * energies["I_z"] + (1.0 + math.tan(th) ** 2) * s * h
    return VariationalQuadratic(0.0, 2.0, -energy / s**2)


@dataclass
class EnergyReport:
    a: float
    b: float
    closed_form: Dict[str, float]
    quadrature: Dict[str, float]
    quadrature_residuals: Dict[str, float]
    bound_residuals: List[dict] = field(default_factory=list)
    quadrature_tol: float = 1e-6
    bound_tol: float = 1e-10

    @property
    def passed(self) -> bool:
        q_ok = all(r <= self.quadrature_tol for r in self.quadrature_residuals.values())
        b_ok = all(max(r["upper"], r["lower"]) <= self.bound_tol for r in self.bound_residuals)
        return q_ok and b_ok

    def as_dict(self):
        return {
            "a": self.a,
            "b": self.b,
            "closed_form": self.closed_form,
            "quadrature": self.quadrature,
            "quadrature_residuals": self.quadrature_residuals,
            "bound_residuals": self.bound_residuals,
            "passed": self.passed,
        }


def verify_energy_integrals(a, b, cases=((0.5, 0.0), (2.0, math.pi / 6), (10.0, math.pi / 3)), quadrature=True) -> EnergyReport:
    """Check the energy closed forms and the bounds they imply.

    ``cases`` are (h/b, theta) pairs for the bound reconstruction.
    """
    if not (b > 0 and a >= b):
        raise ValueError(f"need a >= b > 0, got a={a!r}, b={b!r}")
    closed = energy_closed_forms(a, b)
    quad = energy_quadrature(a, b) if quadrature else dict(closed)
    resid = {k: float(abs(quad[k] - closed[k]) / abs(closed[k])) for k in closed}
    rows = []
    for h_over_b, theta in cases:
        g = PerforationGeometry(a, b, h_over_b * b, theta)
        bounds = bounds_tilted_elliptical(g)
        up = dirichlet_from_energies(g, closed).extremum
        lo = kelvin_from_energies(g, closed).extremum
        rows.append({
            "h": g.h,
            "theta": theta,
            "upper": abs(up - bounds.k_upper) / bounds.k_upper,
            "lower": abs(lo - bounds.k_lower) / bounds.k_lower,
        })
    # the unit-density double integral is only quadrature-accurate to ~1e-5
    return EnergyReport(a, b, closed, quad, resid, rows, quadrature_tol=1e-4)
