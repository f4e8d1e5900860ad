"""Source densities on an elliptic disc and the potentials they generate.

The disc is ``x1^2/a^2 + x2^2/b^2 < 1`` in the plane x3 = 0 and the kernel is
``1 / (2 pi |x - y|)``, so that a density rho generates

    f(x) = 1/(2 pi) int_A rho(y) / |x - y| dy

and ``-d3 f = rho`` on the upper face of the disc. The three densities are

* ``rho_w = (1 - x1^2/a^2 - x2^2/b^2)^(-1/2) / (b K(eps))``: potential 1 on A;
* ``rho_t = x1 (1 - ...)^(-1/2) / (b D(eps))``: potential x1 on A;
* ``rho_z = 1/2``.

The potential is evaluated in polar coordinates centred below the
evaluation point, which absorbs the 1/|x - y| singularity. Along each ray
the substitution ``s = m + w sin(t)`` maps the chord of the ellipse to
``t`` and turns the edge factor ``1/sqrt(1 - ...)`` into a constant, so
Gauss-Legendre in t and the trapezoidal rule in the polar angle both
converge spectrally.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..elliptic import ellip_d, ellip_k
from ..errors import ConvergenceError, DomainError

__all__ = [
    "SourceDensity",
    "single_layer_potential",
    "potential_with_error",
    "disc_integral",
    "DEFAULT_PANELS",
]

DEFAULT_PANELS = (128, 128)
_KINDS = ("rho_w", "rho_t", "rho_z")


@dataclass(frozen=True)
class SourceDensity:
    kind: str
    a: float
    b: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if not (self.b > 0 and self.a >= self.b):
            raise DomainError(f"need a >= b > 0, got a={self.a!r}, b={self.b!r}")

    @property
    def eccentricity(self) -> float:
        return math.sqrt((self.a - self.b) * (self.a + self.b)) / self.a

    @property
    def has_edge_weight(self) -> bool:
        return self.kind != "rho_z"

    def amplitude(self, y1, y2):
        """Density with the edge factor (1 - x1^2/a^2 - x2^2/b^2)^(-1/2) removed."""
        if self.kind == "rho_w":
            return np.full_like(np.asarray(y1, dtype=float), 1.0 / (self.b * ellip_k(self.eccentricity)))
        if self.kind == "rho_t":
            return np.asarray(y1, dtype=float) / (self.b * ellip_d(self.eccentricity))
        return np.full_like(np.asarray(y1, dtype=float), 0.5)

    def __call__(self, y1, y2):
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        q = 1.0 - (y1 / self.a) ** 2 - (y2 / self.b) ** 2
        inside = q > 0
        val = np.where(inside, self.amplitude(y1, y2), 0.0)
        if self.has_edge_weight:
            val = np.where(inside, val / np.sqrt(np.where(inside, q, 1.0)), 0.0)
        return val


def _ray_quadrature(a, b, p1, p2, n_t, n_phi):
    """Nodes (y1, y2, s) and weights for int_A g(y) / sqrt(q(y)) s ds dphi
    in polar coordinates about (p1, p2); also the weights without the
    edge factor (for g(y) s ds dphi)."""
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    c, sn = np.cos(phi), np.sin(phi)
    A2 = (c / a) ** 2 + (sn / b) ** 2
    B = p1 * c / a**2 + p2 * sn / b**2
    C0 = 1.0 - (p1 / a) ** 2 - (p2 / b) ** 2
    disc = B * B + A2 * C0
    ok = disc > 0
    root = np.sqrt(np.where(ok, disc, 0.0))
    s_hi = (-B + root) / A2
    s_lo = (-B - root) / A2
    ok &= s_hi > 0
    m = 0.5 * (s_hi + s_lo)
    w = 0.5 * (s_hi - s_lo)
    start = np.maximum(s_lo, 0.0)
    t0 = np.arcsin(np.clip((start - m) / np.where(w > 0, w, 1.0), -1.0, 1.0))
    x, gw = np.polynomial.legendre.leggauss(n_t)
    half = 0.5 * (np.pi / 2 - t0)
    t = t0[:, None] + half[:, None] * (x[None, :] + 1.0)
    wt = half[:, None] * gw[None, :]
    s = m[:, None] + w[:, None] * np.sin(t)
    y1 = p1 + s * c[:, None]
    y2 = p2 + s * sn[:, None]
    dphi = 2.0 * np.pi / n_phi
    # ds = w cos t dt and sqrt(q) = sqrt(A2) w cos t
    w_edge = np.where(ok[:, None], wt / np.sqrt(A2)[:, None] * dphi, 0.0)
    w_plain = np.where(ok[:, None], wt * w[:, None] * np.cos(t) * dphi, 0.0)
    return y1, y2, s, w_edge, w_plain


def _potential(rho: SourceDensity, x, n_t, n_phi):
    x1, x2, x3 = (float(v) for v in x)
    y1, y2, s, w_edge, w_plain = _ray_quadrature(rho.a, rho.b, x1, x2, n_t, n_phi)
    # Jacobian s of the polar map against 1/|x - y|
    if x3 == 0.0:
        kern = np.ones_like(s)
    else:
        kern = s / np.sqrt(s * s + x3 * x3)
    weights = w_edge if rho.has_edge_weight else w_plain
    return float(np.sum(rho.amplitude(y1, y2) * kern * weights)) / (2.0 * np.pi)


def _check_point(rho, x):
    x = tuple(float(v) for v in x)
    if len(x) != 3:
        raise ValueError("evaluation point must have three coordinates")
    if x[2] == 0.0 and (x[0] / rho.a) ** 2 + (x[1] / rho.b) ** 2 >= 1.0:
        raise DomainError("on the plane the evaluation point must lie inside the ellipse")
    return x


def potential_with_error(rho: SourceDensity, x, panels=DEFAULT_PANELS):
    """(f(x), error estimate) with the estimate taken against half the panels."""
    x = _check_point(rho, x)
    n_t, n_phi = panels
    fine = _potential(rho, x, n_t, n_phi)
    coarse = _potential(rho, x, max(n_t // 2, 2), max(n_phi // 2, 4))
    return fine, abs(fine - coarse)


def single_layer_potential(rho: SourceDensity, x, panels=DEFAULT_PANELS, rtol=1e-6) -> float:
    """f(x) = 1/(2 pi) int_A rho(y) / |x - y| dy.

    Raises :class:`ConvergenceError` when the estimated error exceeds
    ``rtol`` relative to the natural scale of the potential (1 for rho_w,
    ``a`` for rho_t, ``b`` for rho_z).
    """
    value, err = potential_with_error(rho, x, panels)
    scale = max(abs(value), {"rho_w": 1.0, "rho_t": rho.a, "rho_z": rho.b}[rho.kind])
    if err > rtol * scale:
        raise ConvergenceError(
            f"single-layer quadrature error {err:.3g} exceeds {rtol:.3g} x {scale:.3g}"
        )
    return value


def disc_integral(func, a, b, n_r=64, n_phi=64, edge_weight=True):
    """int_A func(y1, y2) dy over the ellipse, optionally with the edge
    factor (1 - y1^2/a^2 - y2^2/b^2)^(-1/2) included in the weight.

    Uses y = (a u cos, b u sin) with u = sin(t), so the edge factor cancels.
    """
    x, gw = np.polynomial.legendre.leggauss(n_r)
    t = 0.25 * np.pi * (x + 1.0)
    wt = 0.25 * np.pi * gw
    u = np.sin(t)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    U, P = np.meshgrid(u, phi, indexing="ij")
    T = np.arcsin(U)
    # dA = a b u du dphi, du = cos t dt, edge factor = 1/cos t
    w = (wt * u)[:, None] * (2.0 * np.pi / n_phi) * a * b
    if not edge_weight:
        w = w * np.cos(T)
    return float(np.sum(func(a * U * np.cos(P), b * U * np.sin(P)) * w))
