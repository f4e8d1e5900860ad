"""Floquet modes and the regular part s0 of the quasi-periodic Green's function.

The quasi-periodic Helmholtz kernel of a planar lattice,

    G_L(x) = sum_m exp(i beta . xi_m) exp(i kappa |x - xi_m|) / (4 pi |x - xi_m|),

behaves near the origin as ``1/(4 pi |x|) + s0 + o(1)``. Its spectral form is

    G_L(x', x3) = i/(2A) sum_m exp(i gamma_m |x3|) exp(i beta_m . x') / gamma_m,

with ``beta_m = beta + 2 pi (m1 xi1* + m2 xi2*)`` and
``gamma_m = sqrt(kappa^2 - |beta_m|^2)`` (Re, Im >= 0).

Two independent evaluations of s0 are provided:

``ewald``
    Ewald splitting of the image series into exponentially convergent
    real-space and reciprocal-space sums.
``direct_accelerated``
    Spectral sum evaluated on the plate normal at heights L/8 ... L/64,
    minus the free-space kernel, extrapolated to zero height by Richardson
    extrapolation in ``x3^2``.

Internally all lengths are scaled by the lattice spacing L.
"""

import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.special import erfc, erfi

from .errors import ConvergenceError, ValidityError
from .geometry import IncidentWave, LatticeGeometry

__all__ = [
    "ModeData",
    "LatticeSumResult",
    "enumerate_modes",
    "lattice_s0",
    "s0_ewald",
    "s0_direct",
    "gamma_branch",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-8
_MAX_SHELLS = 200


@dataclass(frozen=True)
class ModeData:
    m: tuple
    beta_m: np.ndarray
    gamma_m: complex
    propagating: bool


@dataclass(frozen=True)
class LatticeSumResult:
    s0: complex          # 1/m
    method: str
    est_error: float     # absolute, 1/m
    spacing: float       # L used for scaling, m

    @property
    def s0_scaled(self) -> complex:
        """s0 * L (dimensionless)."""
        return self.s0 * self.spacing

    @property
    def est_error_scaled(self) -> float:
        return self.est_error * self.spacing


def gamma_branch(kappa, beta_norm):
    """sqrt(kappa^2 - |beta_m|^2) with Re >= 0 and Im >= 0."""
    d = kappa * kappa - np.asarray(beta_norm, dtype=float) ** 2
    return np.where(d >= 0, np.sqrt(np.abs(d)) + 0j, 1j * np.sqrt(np.abs(d)))


def _index_box(basis, radius):
    """Integer pairs covering the disc |m1 v1 + m2 v2| <= radius."""
    # |m_i| <= radius * |dual_i|
    dual = np.linalg.inv(basis).T
    n1 = int(math.ceil(radius * np.linalg.norm(dual[0]))) + 1
    n2 = int(math.ceil(radius * np.linalg.norm(dual[1]))) + 1
    m1, m2 = np.meshgrid(np.arange(-n1, n1 + 1), np.arange(-n2, n2 + 1), indexing="ij")
    return m1.ravel(), m2.ravel()


def enumerate_modes(lat: LatticeGeometry, wave: IncidentWave, cutoff: int) -> List[ModeData]:
    """All Floquet orders with |m1|, |m2| <= cutoff."""
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    kappa = wave.kappa
    recip = lat.reciprocal_basis
    beta = wave.bloch
    modes = []
    for m1 in range(-cutoff, cutoff + 1):
        for m2 in range(-cutoff, cutoff + 1):
            bm = beta + m1 * recip[0] + m2 * recip[1]
            norm = float(np.hypot(*bm))
            g = complex(gamma_branch(kappa, norm))
            modes.append(ModeData((m1, m2), bm, g, norm < kappa))
    return modes


def _scaled_inputs(lat: LatticeGeometry, wave: IncidentWave):
    L = lat.spacing
    basis = lat.reduced_basis / L
    recip = 2.0 * math.pi * np.linalg.inv(basis).T
    kappa = wave.kappa * L
    beta = wave.bloch * L
    area = lat.cell_area / L**2
    return L, basis, recip, kappa, beta, area


def _check_validity(lat, wave):
    L = lat.spacing
    if not L < wave.wavelength / 2.0:
        raise ValidityError(
            f"L = {L:.6g} m is not below half a wavelength ({wave.wavelength / 2:.6g} m)"
        )
    _, _, recip, kappa, beta, _ = _scaled_inputs(lat, wave)
    for m1, m2 in [(1, 0), (0, 1), (1, 1), (1, -1), (-1, 0), (0, -1), (-1, -1), (-1, 1)]:
        if np.hypot(*(beta + m1 * recip[0] + m2 * recip[1])) <= kappa:
            raise ValidityError(f"Floquet order {(m1, m2)} propagates")


def _shell_sum(points_fn, term_fn, radius_step, tol, first_radius=0.0):
    """Accumulate term_fn over lattice points in growing annuli.

    Stops once two consecutive annuli contribute less than ``tol``.
    Returns (total, magnitude of the last annulus).
    """
    total = 0j
    r_in = -1.0
    r_out = max(first_radius, radius_step)
    quiet = 0
    for _ in range(_MAX_SHELLS):
        pts = points_fn(r_out)
        norms = np.hypot(pts[:, 0], pts[:, 1])
        sel = (norms > r_in) & (norms <= r_out)
        contrib = complex(np.sum(term_fn(pts[sel], norms[sel]))) if np.any(sel) else 0j
        total += contrib
        if abs(contrib) < tol:
            quiet += 1
            if quiet >= 2:
                return total, abs(contrib)
        else:
            quiet = 0
        r_in, r_out = r_out, r_out + radius_step
    raise ConvergenceError("lattice sum did not converge within the shell limit")


def s0_ewald(lat: LatticeGeometry, wave: IncidentWave, tol=DEFAULT_TOL, split=None):
    """Ewald evaluation of s0. ``split`` is the splitting parameter in units
    of 1/L; the default sqrt(pi / A) balances the two sums."""
    L, basis, recip, kappa, beta, area = _scaled_inputs(lat, wave)
    E = math.sqrt(math.pi / area) if split is None else float(split)
    u = kappa / (2.0 * E)

    def lattice_pts(radius):
        m1, m2 = _index_box(basis, radius)
        return np.outer(m1, basis[0]) + np.outer(m2, basis[1])

    def recip_pts(radius):
        m1, m2 = _index_box(recip, radius + np.hypot(*beta))
        return beta + np.outer(m1, recip[0]) + np.outer(m2, recip[1])

    def spatial(pts, R):
        keep = R > 0
        pts, R = pts[keep], R[keep]
        phase = np.exp(1j * (pts @ beta))
        f = np.exp(1j * kappa * R) * erfc(R * E + 1j * u) + np.exp(-1j * kappa * R) * erfc(R * E - 1j * u)
        return phase * f / (8.0 * math.pi * R)

    def spectral(pts, q):
        gt = -1j * gamma_branch(kappa, q)  # sqrt(|beta_m|^2 - kappa^2), principal
        return erfc(gt / (2.0 * E)) / (2.0 * area * gt)

    part_tol = tol / 4.0
    s_spat, err_spat = _shell_sum(lattice_pts, spatial, 1.0, part_tol)
    step = min(np.linalg.norm(recip[0]), np.linalg.norm(recip[1]))
    s_spec, err_spec = _shell_sum(recip_pts, spectral, step, part_tol)
    # limit of the n = 0 real-space image minus 1/(4 pi R) as R -> 0
    self_term = kappa * erfi(u) / (4.0 * math.pi) - E * math.exp(u * u) / (2.0 * math.pi**1.5)
    s0 = s_spat + s_spec + self_term
    # truncation tail plus a rounding floor
    err = err_spat + err_spec + 64.0 * np.finfo(float).eps * abs(s0)
    return LatticeSumResult(s0 / L, "ewald", err / L, L)


def _spectral_on_axis(recip, beta, kappa, area, height):
    """G_L(0, height) by the spectral series, tail added in continuum form."""
    # truncate where exp(-q height) / (4 pi height) < 1e-15
    qmax = (math.log(1.0 / (4.0 * math.pi * height)) + 34.5) / height
    qmax = max(qmax, 4.0 * np.linalg.norm(recip[0]))
    m1, m2 = _index_box(recip, qmax + np.hypot(*beta))
    bm = beta + np.outer(m1, recip[0]) + np.outer(m2, recip[1])
    q = np.hypot(bm[:, 0], bm[:, 1])
    inside = q <= qmax
    g = gamma_branch(kappa, q[inside])
    total = 1j / (2.0 * area) * np.sum(np.exp(1j * g * height) / g)
    # smooth tail: (1/(2A)) * (A/(4 pi^2)) int_{qmax}^inf 2 pi e^{-q h} dq
    tail = math.exp(-qmax * height) / (4.0 * math.pi * height)
    return total + tail


def s0_direct(lat: LatticeGeometry, wave: IncidentWave, levels=(8, 16, 32, 64)):
    """Independent evaluation of s0 by on-axis spectral sums and Richardson
    extrapolation of ``G_L(0, x3) - exp(i kappa x3)/(4 pi x3)`` to x3 -> 0."""
    L, basis, recip, kappa, beta, area = _scaled_inputs(lat, wave)
    hs = np.array([1.0 / n for n in levels])
    vals = []
    for h in hs:
        g = _spectral_on_axis(recip, beta, kappa, area, h)
        vals.append(g - np.exp(1j * kappa * h) / (4.0 * math.pi * h))
    # Neville table in the variable h^2 (the regular part is even in x3)
    x = hs**2
    table = [np.array(vals, dtype=complex)]
    for k in range(1, len(hs)):
        prev = table[-1]
        nxt = (x[k:] * prev[:-1] - x[:-k] * prev[1:]) / (x[k:] - x[:-k])
        table.append(nxt)
    limit = table[-1][0]
    est = abs(table[-1][0] - table[-2][-1])
    s0 = limit + 1j * kappa / (4.0 * math.pi)
    return LatticeSumResult(s0 / L, "direct_accelerated", est / L, L)


def lattice_s0(lat: LatticeGeometry, wave: IncidentWave, tol=DEFAULT_TOL, method="ewald"):
    """s0 for the lattice and incident wave, in 1/m.

    ``tol`` is an absolute tolerance on ``s0 * L``. Raises
    :class:`ValidityError` unless only the fundamental order propagates.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    _check_validity(lat, wave)
    if method == "ewald":
        res = s0_ewald(lat, wave, tol)
    elif method == "direct_accelerated":
        res = s0_direct(lat, wave)
    else:
        raise ValueError(f"unknown method {method!r}")
    if res.est_error_scaled > tol and method == "ewald":
        raise ConvergenceError(
            f"estimated error {res.est_error_scaled:.3g} exceeds tolerance {tol:.3g}"
        )
    return res
