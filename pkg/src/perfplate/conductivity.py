"""Lower and upper bounds of the Rayleigh conductivity K_R.

The upper bound comes from the Dirichlet (minimum energy) principle applied
to a one-parameter family of trial potentials, the lower bound from the
Kelvin (complementary energy) principle applied to a one-parameter family of
divergence-free trial fields. Both functionals reduce to scalar quadratics,
exposed here by :func:`j1_quadratic` and :func:`j2_quadratic`.

Conventions: K_R has the dimension of a length. The effective length is
``l = s / K_R`` for a reference area ``s``; the end correction is
``l' = l - h_eff``. With ``s`` the elliptical opening area the effective
height is ``h / cos^2(theta)``; with ``s`` the bore cross-section of a tilted
circular drill it is ``h / cos(theta)``.
"""

import math
from dataclasses import dataclass

from .elliptic import ellip_d, ellip_k
from .errors import GeometryError
from .geometry import CircularBoreSpec, PerforationGeometry

__all__ = [
    "ConductivityBounds",
    "VariationalQuadratic",
    "bounds_tilted_elliptical",
    "bounds_circular_bore",
    "bounds_untilted_elliptical",
    "bounds_tilted_circular_opening",
    "bounds_untilted_cylinder",
    "end_correction_shift_elliptical",
    "end_correction_shift_circular",
    "j1_quadratic",
    "j2_quadratic",
    "eldredge_conductivity",
    "bounds_for",
    "bounds_for_family",
    "MAX_ECCENTRICITY",
]

MAX_ECCENTRICITY = 0.999999

_K0 = math.pi / 2.0
_D0 = math.pi / 4.0
_SIXTEEN_OVER_3PI = 16.0 / (3.0 * math.pi)


@dataclass(frozen=True)
class ConductivityBounds:
    family: str
    k_lower: float
    k_upper: float
    s: float
    area_convention: str  # "opening" or "bore"
    h_eff: float

    @property
    def mean_kr(self) -> float:
        return 0.5 * (self.k_lower + self.k_upper)

    @property
    def l_lower(self) -> float:
        return self.s / self.k_upper

    @property
    def l_upper(self) -> float:
        return self.s / self.k_lower

    @property
    def lprime_lower(self) -> float:
        return self.l_lower - self.h_eff

    @property
    def lprime_upper(self) -> float:
        return self.l_upper - self.h_eff

    def as_dict(self):
        return {
            "family": self.family,
            "k_lower_m": self.k_lower,
            "k_upper_m": self.k_upper,
            "k_mean_m": self.mean_kr,
            "s_m2": self.s,
            "area_convention": self.area_convention,
            "h_eff_m": self.h_eff,
            "l_lower_m": self.l_lower,
            "l_upper_m": self.l_upper,
            "lprime_lower_m": self.lprime_lower,
            "lprime_upper_m": self.lprime_upper,
        }


@dataclass(frozen=True)
class VariationalQuadratic:
    """q(x) = c0 + c1 x + c2 x^2 and its stationary point."""

    c0: float
    c1: float
    c2: float

    def __call__(self, x):
        return self.c0 + x * (self.c1 + x * self.c2)

    @property
    def argext(self) -> float:
        return -self.c1 / (2.0 * self.c2)

    @property
    def extremum(self) -> float:
        return self.c0 - self.c1**2 / (4.0 * self.c2)


def _ratios(g: PerforationGeometry):
    eps = g.eccentricity
    if eps > MAX_ECCENTRICITY:
        raise GeometryError(
            f"eccentricity {eps!r} exceeds {MAX_ECCENTRICITY} (slit limit)"
        )
    return ellip_k(eps) / _K0, _D0 / ellip_d(eps)


def _check_tilt(h, theta):
    if theta > 0 and h == 0:
        raise GeometryError("a tilted perforation needs a plate of non-zero thickness")


def _tilted_upper_channel(h, a, b, theta, d_ratio):
    """(h / cos^2) / (1 + 16 a^2 D(0) sin^2 / (3 pi b h D(eps))), 0 at h = 0."""
    if h == 0:
        return 0.0
    # written as h_eff h / (h + C) so that tiny h cannot overflow C / h
    c = _SIXTEEN_OVER_3PI * a * a / b * d_ratio * math.sin(theta) ** 2
    return h / math.cos(theta) ** 2 * (h / (h + c))


def bounds_tilted_elliptical(g: PerforationGeometry) -> ConductivityBounds:
    """Bounds for a tilted perforation with elliptical cross-section.

    The opening area ``pi a b`` is the reference area, so ``h_eff = h/cos^2``.
    """
    _check_tilt(g.h, g.theta)
    k_ratio, d_ratio = _ratios(g)
    a, b, h, theta = g.a, g.b, g.h, g.theta
    s = math.pi * a * b
    h_eff = h / math.cos(theta) ** 2
    lower = s / (h_eff + _SIXTEEN_OVER_3PI * b * k_ratio)
    upper = s / (0.5 * math.pi * b * k_ratio + _tilted_upper_channel(h, a, b, theta, d_ratio))
    return ConductivityBounds("tilted_elliptical", lower, upper, s, "opening", h_eff)


def bounds_circular_bore(spec: CircularBoreSpec) -> ConductivityBounds:
    """Bounds for a circular drill of radius r tilted by theta.

    Written directly in r and theta; the conductivity values coincide with
    :func:`bounds_tilted_elliptical` for ``a = r/cos(theta), b = r``. The
    bore cross-section ``pi r^2`` is the reference area, so
    ``h_eff = h / cos(theta)``.
    """
    r, h, theta = spec.r, spec.h, spec.theta
    _check_tilt(h, theta)
    eps = math.sin(theta)
    if eps > MAX_ECCENTRICITY:
        raise GeometryError(f"tilt {theta!r} too close to pi/2")
    k_ratio = ellip_k(eps) / _K0
    d_ratio = _D0 / ellip_d(eps)
    c = math.cos(theta)
    s = math.pi * r * r
    lower = s / (h / c + _SIXTEEN_OVER_3PI * r * k_ratio * c)
    if h == 0:
        channel = 0.0
    else:
        channel = (h / c) * (h / (h + _SIXTEEN_OVER_3PI * r * d_ratio * math.tan(theta) ** 2))
    upper = s / (0.5 * math.pi * r * k_ratio * c + channel)
    return ConductivityBounds("circular_bore", lower, upper, s, "bore", h / c)


def bounds_untilted_elliptical(a, b, h) -> ConductivityBounds:
    """Bounds for a straight perforation with elliptical cross-section."""
    g = PerforationGeometry(a, b, h, 0.0)
    k_ratio, _ = _ratios(g)
    s = math.pi * a * b
    lower = s / (h + _SIXTEEN_OVER_3PI * b * k_ratio)
    upper = s / (h + 0.5 * math.pi * b * k_ratio)
    return ConductivityBounds("untilted_elliptical", lower, upper, s, "opening", h)


def bounds_tilted_circular_opening(r, h, theta) -> ConductivityBounds:
    """Bounds for a tilted perforation whose openings are circles of radius r.

    Such a hole has an elliptical cross-section along its axis (it would need
    an elliptical drill bit).
    """
    CircularBoreSpec(r, h, theta)  # range checks
    _check_tilt(h, theta)
    s = math.pi * r * r
    h_eff = h / math.cos(theta) ** 2
    lower = s / (h_eff + _SIXTEEN_OVER_3PI * r)
    if h == 0:
        channel = 0.0
    else:
        channel = h_eff * (h / (h + _SIXTEEN_OVER_3PI * r * math.sin(theta) ** 2))
    upper = s / (channel + 0.5 * math.pi * r)
    return ConductivityBounds("tilted_circular_opening", lower, upper, s, "opening", h_eff)


def bounds_untilted_cylinder(r, h) -> ConductivityBounds:
    """Classical bounds pi r^2 / (h + 16r/3pi) <= K_R <= pi r^2 / (h + pi r/2)."""
    CircularBoreSpec(r, h, 0.0)
    s = math.pi * r * r
    lower = s / (h + _SIXTEEN_OVER_3PI * r)
    upper = s / (h + 0.5 * math.pi * r)
    return ConductivityBounds("untilted_cylinder", lower, upper, s, "opening", h)


def end_correction_shift_elliptical(g: PerforationGeometry) -> float:
    """Non-positive shift g(h) of the lower end-correction bound.

    ``pi b/2 K(eps)/K(0) + g(h) <= l' <= 16 b/(3 pi) K(eps)/K(0)``.
    """
    _check_tilt(g.h, g.theta)
    if g.theta == 0.0:
        return 0.0
    _, d_ratio = _ratios(g)
    a, b, h, theta = g.a, g.b, g.h, g.theta
    num = _SIXTEEN_OVER_3PI * a * a / b * d_ratio * math.tan(theta) ** 2
    return -num * (h / (h + _SIXTEEN_OVER_3PI * a * a / b * d_ratio * math.sin(theta) ** 2))


def end_correction_shift_circular(r, h, theta) -> float:
    """Non-positive shift f(h) for the tilted circular opening.

    ``f(h) + pi r/2 <= l' <= 16 r/(3 pi)``.
    """
    _check_tilt(h, theta)
    if theta == 0.0:
        return 0.0
    num = _SIXTEEN_OVER_3PI * r * math.tan(theta) ** 2
    return -num * (h / (h + _SIXTEEN_OVER_3PI * r * math.sin(theta) ** 2))


def j1_quadratic(g: PerforationGeometry):
    """Dirichlet functional along the trial family, as a quadratic in alpha.

    The trial potential drops by (1 - 2 alpha)/2 in each half-space and by
    2 alpha across the hole. Returns ``(quadratic, alpha_star)``; the minimum
    is the upper bound of :func:`bounds_tilted_elliptical`.
    """
    if not g.h > 0:
        raise GeometryError("the Dirichlet trial family needs h > 0")
    k_ratio, d_ratio = _ratios(g)
    a, b, h, theta = g.a, g.b, g.h, g.theta
    outer = 2.0 * a / k_ratio  # pi a / K(eps): thin-plate conductivity
    cos2 = math.cos(theta) ** 2
    tilt = 64.0 * a**3 / (3.0 * h * h) * cos2 * math.sin(theta) ** 2 * d_ratio
    channel = 4.0 * math.pi * a * b / h * cos2
    q = VariationalQuadratic(outer, -4.0 * outer, 4.0 * outer + tilt + channel)
    return q, q.argext


def j2_quadratic(g: PerforationGeometry):
    """Kelvin functional along the trial family, as a quadratic in beta.

    ``J2(beta) = 2 beta - beta^2 / (pi a b)^2 * (16/3 a b^2 K(eps)/K(0)
    + (1 + tan^2) pi a b h)``. Returns ``(quadratic, beta_star)``; the
    maximum is the lower bound of :func:`bounds_tilted_elliptical`.
    """
    _check_tilt(g.h, g.theta)
    k_ratio, _ = _ratios(g)
    a, b, h, theta = g.a, g.b, g.h, g.theta
    s = math.pi * a * b
    energy = 16.0 / 3.0 * a * b * b * k_ratio + (1.0 + math.tan(theta) ** 2) * s * h
    q = VariationalQuadratic(0.0, 2.0, -energy / (s * s))
    return q, q.argext


def eldredge_conductivity(r, h, theta, height_factor=1.0) -> float:
    """Untilted-cylinder upper bound evaluated with the slanted height.

    ``K = pi r^2 / (height_factor * h / cos(theta) + pi r / 2)``; this is the
    no-flow conductivity used in LES-calibrated liner models, kept for
    comparison with the rigorous bounds.
    """
    return math.pi * r * r / (height_factor * h / math.cos(theta) + 0.5 * math.pi * r)


def bounds_for(g: PerforationGeometry, bore: CircularBoreSpec = None) -> ConductivityBounds:
    """Most specific bound family for a perforation (and its drill, if known)."""
    if bore is not None:
        return bounds_circular_bore(bore)
    if g.theta == 0.0:
        if g.a == g.b:
            return bounds_untilted_cylinder(g.a, g.h)
        return bounds_untilted_elliptical(g.a, g.b, g.h)
    return bounds_tilted_elliptical(g)


def bounds_for_family(family: str, g: PerforationGeometry, bore: CircularBoreSpec = None) -> ConductivityBounds:
    """Bounds of a named family; ``bore`` is needed for ``circular_bore``."""
    if family == "circular_bore":
        if bore is None:
            raise GeometryError("the circular_bore family needs the drill radius")
        return bounds_circular_bore(bore)
    if family == "untilted_cylinder":
        return bounds_untilted_cylinder(g.b, g.h)
    if family == "tilted_circular_opening":
        return bounds_tilted_circular_opening(g.b, g.h, g.theta)
    if family == "untilted_elliptical":
        return bounds_untilted_elliptical(g.a, g.b, g.h)
    if family == "tilted_elliptical":
        return bounds_tilted_elliptical(g)
    raise ValueError(f"unknown family {family!r}")
