"""Self-verification suites.

Each suite compares two independent routes to the same quantity and reports
the worst residual against its tolerance. ``run_suites`` drives them and is
what ``perfplate verify`` prints.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import conductivity as cond
from .elliptic import ellip_d, ellip_e, ellip_k
from .geometry import CircularBoreSpec, IncidentWave, LatticeGeometry, PerforationGeometry
from .lattice_sum import lattice_s0, s0_ewald
from .oracles.densities import SourceDensity, potential_with_error
from .oracles.elliptic_quad import d_quad, e_quad, k_quad
from .oracles.energy import verify_energy_integrals
from .oracles.fd import FDGrid, fd_conductivity_cylinder

__all__ = ["Check", "SuiteReport", "SUITES", "FAULTS", "run_suites"]

FAULTS = ("k_upper",)


@dataclass
class Check:
    name: str
    residual: float
    tol: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)

    def as_dict(self):
        return {"name": self.name, "residual": self.residual, "tol": self.tol, "passed": self.passed, **self.detail}


@dataclass
class SuiteReport:
    name: str
    checks: List[Check]
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "suite": self.name,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "checks": [c.as_dict() for c in self.checks],
        }


def _rel(x, y):
    return abs(x - y) / max(abs(y), 1e-300)


def _random_geometries(rng, n, tilted=True, thick=True):
    r = 10.0 ** rng.uniform(-4, -2, n)
    aspect = rng.uniform(1.0, 5.0, n)
    h = r * 10.0 ** rng.uniform(-1, 1.5, n) if thick else np.zeros(n)
    theta = rng.uniform(0.0, 1.4, n) if tilted else np.zeros(n)
    return r, aspect, h, theta


def suite_elliptic(n=1000, seed=0, **_):
    rng = np.random.default_rng(seed)
    eps = rng.uniform(0.0, 0.999, n)
    worst = 0.0
    for e in eps:
        worst = max(worst, _rel(ellip_k(e), k_quad(e)), _rel(ellip_e(e), e_quad(e)), _rel(ellip_d(e), d_quad(e)))
    grid = np.linspace(0.0, 0.999, 1000)
    d_id = max(abs(e * e * ellip_d(e) - (ellip_k(e) - ellip_e(e))) / ellip_k(e) for e in grid)
    legendre = 0.0
    for e in grid[1:]:
        ep = math.sqrt((1.0 - e) * (1.0 + e))
        k, ee, kp, ep_ = ellip_k(e), ellip_e(e), ellip_k(ep), ellip_e(ep)
        legendre = max(legendre, abs(ee * kp + ep_ * k - k * kp - math.pi / 2) / (math.pi / 2))
    ks = [ellip_k(e) for e in grid]
    es = [ellip_e(e) for e in grid]
    mono = 0.0 if (np.all(np.diff(ks) > 0) and np.all(np.diff(es) < 0)) else 1.0
    return [
        Check("agm_vs_quadrature", worst, 1e-12, {"samples": n}),
        Check("d_identity", d_id, 1e-12),
        Check("legendre_relation", legendre, 1e-12),
        Check("monotonicity", mono, 0.0),
    ]


def suite_reduction(n=10_000, seed=1, fault=None, **_):
    rng = np.random.default_rng(seed)
    r, aspect, h, theta = _random_geometries(rng, n)
    bump = 1.01 if fault == "k_upper" else 1.0
    res = {k: 0.0 for k in ("circle_opening", "untilted_ellipse", "cylinder", "bore", "bore_untilted", "end_corrections", "thin_plate")}
    for i in range(n):
        ri, ai, hi, ti = r[i], aspect[i] * r[i], h[i], theta[i]

        def tilted(a, b, hh, th, ecc=None):
            bb = cond.bounds_tilted_elliptical(PerforationGeometry(a, b, hh, th, ecc))
            return bb.k_lower, bb.k_upper * bump, bb

        lo, up, _ = tilted(ri, ri, hi, ti)
        c = cond.bounds_tilted_circular_opening(ri, hi, ti)
        res["circle_opening"] = max(res["circle_opening"], _rel(lo, c.k_lower), _rel(up, c.k_upper))
        lo, up, b_ell = tilted(ai, ri, hi, 0.0)
        u = cond.bounds_untilted_elliptical(ai, ri, hi)
        res["untilted_ellipse"] = max(res["untilted_ellipse"], _rel(lo, u.k_lower), _rel(up, u.k_upper))
        u = cond.bounds_untilted_elliptical(ri, ri, hi)
        cy = cond.bounds_untilted_cylinder(ri, hi)
        res["cylinder"] = max(res["cylinder"], _rel(u.k_lower, cy.k_lower), _rel(u.k_upper, cy.k_upper))
        bore = cond.bounds_circular_bore(CircularBoreSpec(ri, hi, ti))
        lo, up, _ = tilted(ri / math.cos(ti), ri, hi, ti, math.sin(ti))
        res["bore"] = max(res["bore"], _rel(lo, bore.k_lower), _rel(up, bore.k_upper))
        bore0 = cond.bounds_circular_bore(CircularBoreSpec(ri, hi, 0.0))
        res["bore_untilted"] = max(res["bore_untilted"], _rel(bore0.k_lower, cy.k_lower), _rel(bore0.k_upper, cy.k_upper))
        # end corrections of the tilted ellipse against their closed forms
        g = PerforationGeometry(ai, ri, hi, ti)
        lo, up, bb = tilted(ai, ri, hi, ti)
        kk = ellip_k(g.eccentricity) / (math.pi / 2)
        lp_lo = bb.s / up - bb.h_eff
        lp_up = bb.s / lo - bb.h_eff
        ref_lo = 0.5 * math.pi * ri * kk + cond.end_correction_shift_elliptical(g)
        ref_up = 16.0 / (3.0 * math.pi) * ri * kk
        scale = max(abs(ref_up), bb.h_eff)
        res["end_corrections"] = max(res["end_corrections"], abs(lp_lo - ref_lo) / scale, abs(lp_up - ref_up) / scale)
        # thin plate: pi a / K(eps) and the circle interval
        thin = cond.bounds_untilted_elliptical(ai, ri, 0.0)
        circ = cond.bounds_untilted_cylinder(ri, 0.0)
        res["thin_plate"] = max(
            res["thin_plate"],
            _rel(thin.k_upper * bump, math.pi * ai / ellip_k(g.eccentricity)),
            _rel(circ.k_upper, 2.0 * ri),
            _rel(circ.k_lower, 3.0 * math.pi**2 * ri / 16.0),
        )
    tols = {"thin_plate": 1e-13}
    return [Check(k, v, tols.get(k, 1e-12), {"samples": n}) for k, v in res.items()]


def suite_variational(n=2000, seed=2, **_):
    rng = np.random.default_rng(seed)
    r, aspect, h, theta = _random_geometries(rng, n)
    j1 = j2 = 0.0
    extremal = True
    for i in range(n):
        g = PerforationGeometry(aspect[i] * r[i], r[i], h[i], theta[i])
        bb = cond.bounds_tilted_elliptical(g)
        q1, a_star = cond.j1_quadratic(g)
        q2, b_star = cond.j2_quadratic(g)
        j1 = max(j1, _rel(q1(a_star), bb.k_upper))
        j2 = max(j2, _rel(q2(b_star), bb.k_lower))
        for f in (0.9, 1.1):
            extremal &= q1(f * a_star) >= q1(a_star) and q2(f * b_star) <= q2(b_star)
    return [
        Check("j1_min_equals_upper", j1, 1e-12, {"samples": n}),
        Check("j2_max_equals_lower", j2, 1e-12, {"samples": n}),
        Check("extremality_10pct", 0.0 if extremal else 1.0, 0.0),
    ]


def suite_energy(**_):
    checks = []
    for a, b in ((1.0, 1.0), (2.0, 1.0), (1.0, math.sqrt(1 - 0.81))):
        rep = verify_energy_integrals(a, b)
        q = max(rep.quadrature_residuals.values())
        bd = max(max(r["upper"], r["lower"]) for r in rep.bound_residuals)
        checks.append(Check(f"quadrature_a{a:g}_b{b:.4g}", q, rep.quadrature_tol, {"residuals": rep.quadrature_residuals}))
        checks.append(Check(f"bounds_from_energies_a{a:g}_b{b:.4g}", bd, rep.bound_tol))
    return checks


LATTICES_MM = (
    ((3.0, 0.0), (0.0, 2.7)),
    ((3.0, 0.0), (1.5, 2.7)),
    ((2.0, 0.0), (0.0, 2.0)),
    ((2.0, 0.0), (1.0, math.sqrt(3.0))),
    ((4.0, 0.5), (-0.8, 3.0)),
)


def lattice_grid(n_freq=5, angles_deg=(0.0, 30.0, 60.0)):
    """(lattice, wave) pairs over a lattice x frequency x angle grid with L < lambda/2."""
    pairs = []
    for xi1, xi2 in LATTICES_MM:
        lat = LatticeGeometry(tuple(1e-3 * v for v in xi1), tuple(1e-3 * v for v in xi2))
        f_cut = 343.0 / (2.0 * lat.spacing) / (1.0 + math.sin(math.radians(max(angles_deg))))
        for f in np.geomspace(200.0, 0.9 * f_cut, n_freq):
            for ang in angles_deg:
                pairs.append((lat, IncidentWave(float(f), 343.0, math.radians(ang), 0.3)))
    return pairs


def suite_lattice(**_):
    ident = agree = split = 0.0
    pairs = lattice_grid()
    for lat, wave in pairs:
        e = lattice_s0(lat, wave)
        d = lattice_s0(lat, wave, method="direct_accelerated")
        ident = max(ident, abs(2.0 * e.s0.imag * wave.kappa * lat.cell_area * wave.cos_phi - 1.0))
        agree = max(agree, abs(e.s0_scaled - d.s0_scaled))
        E0 = math.sqrt(math.pi / (lat.cell_area / lat.spacing**2))
        alt = s0_ewald(lat, wave, split=1.7 * E0)
        split = max(split, abs(alt.s0_scaled - e.s0_scaled))
    return [
        Check("im_2s0_identity", ident, 1e-6, {"cases": len(pairs)}),
        Check("ewald_vs_direct", agree, 1e-7, {"cases": len(pairs)}),
        Check("splitting_independence", split, 1e-7),
    ]


def suite_densities(seed=3, **_):
    rng = np.random.default_rng(seed)
    checks = []
    for eps in (0.0, 0.6, 0.9):
        a, b = 1.0, math.sqrt(1.0 - eps * eps)
        w, t = SourceDensity("rho_w", a, b), SourceDensity("rho_t", a, b)
        dw = dt = 0.0
        for _ in range(20):
            rr = math.sqrt(rng.uniform(0.0, 0.98))
            ph = rng.uniform(0.0, 2.0 * math.pi)
            x = (a * rr * math.cos(ph), b * rr * math.sin(ph), 0.0)
            dw = max(dw, abs(potential_with_error(w, x)[0] - 1.0))
            dt = max(dt, abs(potential_with_error(t, x)[0] - x[0]) / a)
        checks.append(Check(f"rho_w_potential_eps{eps:g}", dw, 1e-3))
        checks.append(Check(f"rho_t_potential_eps{eps:g}", dt, 1e-3))
    return checks


def suite_fd(ratios=(0.5, 2.0, 8.9), r=0.225e-3, **_):
    checks = []
    for ratio in ratios:
        res = fd_conductivity_cylinder(r, ratio * r, FDGrid())
        bb = cond.bounds_untilted_cylinder(r, ratio * r)
        outside = max(bb.k_lower - res.kr, res.kr - bb.k_upper, 0.0) / bb.mean_kr
        info = {"kr_m": res.kr, "k_lower_m": bb.k_lower, "k_upper_m": bb.k_upper, "error_estimate_m": res.error_estimate}
        checks.append(Check(f"containment_h_over_r_{ratio:g}", outside, 0.0, info))
        checks.append(Check(f"convergence_h_over_r_{ratio:g}", max(0.0, 3.0 - res.convergence_factor), 0.0, {"factor": res.convergence_factor}))
    return checks


SUITES: Dict[str, Callable] = {
    "elliptic": suite_elliptic,
    "reduction": suite_reduction,
    "variational": suite_variational,
    "energy": suite_energy,
    "lattice": suite_lattice,
    "densities": suite_densities,
    "fd": suite_fd,
}


def run_suites(names: Optional[Sequence[str]] = None, fault: Optional[str] = None, ratios=None) -> List[SuiteReport]:
    """Run the named suites (all by default) and return their reports."""
    names = list(SUITES) if not names else list(names)
    for n in names:
        if n not in SUITES:
            raise ValueError(f"unknown suite {n!r}; choose from {', '.join(SUITES)}")
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    out = []
    for n in names:
        kw = {"fault": fault}
        if n == "fd" and ratios:
            kw["ratios"] = tuple(ratios)
        t0 = time.perf_counter()
        checks = SUITES[n](**kw)
        out.append(SuiteReport(n, checks, time.perf_counter() - t0))
    return out
