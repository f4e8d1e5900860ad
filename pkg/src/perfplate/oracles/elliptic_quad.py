"""Adaptive-quadrature evaluation of K, E and D from their defining integrals.

Slow but independent of the AGM route in :mod:`perfplate.elliptic`. The
integrands use ``1 - eps^2 sin^2 = kp^2 + eps^2 cos^2`` so that nothing
cancels near eps = 1.
"""

import math
import warnings

from scipy.integrate import IntegrationWarning, quad

__all__ = ["k_quad", "e_quad", "d_quad"]

_OPTS = dict(epsabs=0.0, epsrel=2e-14, limit=400)


def _delta2(phi, eps, kp2):
    c = math.cos(phi)
    return kp2 + eps * eps * c * c


def _integrate(f, eps):
    kp2 = (1.0 - eps) * (1.0 + eps)
    # split near pi/2 where the integrand peaks for eps close to 1
    split = max(0.5 * math.pi - 20.0 * math.sqrt(kp2), 0.0)
    pieces = [(0.0, split), (split, 0.5 * math.pi)] if split > 0 else [(0.0, 0.5 * math.pi)]
    with warnings.catch_warnings():
        # quadpack flags roundoff when the target sits at machine precision
        warnings.simplefilter("ignore", IntegrationWarning)
        return sum(quad(f, lo, hi, args=(eps, kp2), **_OPTS)[0] for lo, hi in pieces)


def k_quad(eps):
    return _integrate(lambda p, e, k2: 1.0 / math.sqrt(_delta2(p, e, k2)), eps)


def e_quad(eps):
    return _integrate(lambda p, e, k2: math.sqrt(_delta2(p, e, k2)), eps)


def d_quad(eps):
    return _integrate(lambda p, e, k2: math.sin(p) ** 2 / math.sqrt(_delta2(p, e, k2)), eps)
