"""Complete elliptic integrals K, E and the auxiliary integral D.

All three are functions of the eccentricity ``eps`` (the modulus, not the
parameter ``m = eps**2``):

    K(eps) = int_0^{pi/2} (1 - eps^2 sin^2 phi)^(-1/2) dphi
    E(eps) = int_0^{pi/2} (1 - eps^2 sin^2 phi)^(1/2)  dphi
    D(eps) = int_0^{pi/2} sin^2 phi (1 - eps^2 sin^2 phi)^(-1/2) dphi
           = (K - E) / eps^2

Evaluation uses the arithmetic-geometric mean. The differences ``K - E``
are accumulated from the AGM ``c_n`` sequence directly, so ``D`` never
suffers from subtractive cancellation.
"""

import math

from .errors import DomainError

__all__ = ["ellip_k", "ellip_e", "ellip_d", "D_SERIES_SWITCH"]

# Below this eccentricity D is taken from its Maclaurin series.
D_SERIES_SWITCH = 1e-4

_MAX_AGM_STEPS = 60


def _check(eps, allow_one=False):
    eps = float(eps)
    if not math.isfinite(eps) or eps < 0.0:
        raise DomainError(f"eccentricity must be >= 0, got {eps!r}")
    if eps > 1.0 or (eps == 1.0 and not allow_one):
        raise DomainError(f"eccentricity must be < 1, got {eps!r}")
    return eps


def _agm(eps):
    """Run the AGM for modulus eps.

    Returns ``(K, S)`` where ``S = sum_{n>=1} 2^(n-1) (c_n / eps)^2`` so that
    ``K - E = K * eps^2 * (1/2 + S)``.
    """
    # complementary modulus without cancellation near eps -> 1
    kp = math.sqrt((1.0 - eps) * (1.0 + eps))
    a, b = 1.0, kp
    # c_1 / eps, written to avoid (1 - kp) cancellation near eps -> 0
    c_over = eps / (2.0 * (1.0 + kp))
    s = 0.0
    weight = 1.0
    for _ in range(_MAX_AGM_STEPS):
        a_next = 0.5 * (a + b)
        b = math.sqrt(a * b)
        a = a_next
        s += weight * c_over * c_over
        if abs(a - b) <= 4e-17 * a:
            break
        weight *= 2.0
        # c_{n+1} = c_n^2 / (4 a_{n+1}); divide by eps once more to keep the ratio
        c_over = c_over * c_over * eps / (4.0 * 0.5 * (a + b))
    k = math.pi / (2.0 * 0.5 * (a + b))
    return k, s


def ellip_k(eps):
    """Complete elliptic integral of the first kind, K(eps), 0 <= eps < 1."""
    eps = _check(eps)
    return _agm(eps)[0]


def ellip_e(eps):
    """Complete elliptic integral of the second kind, E(eps), 0 <= eps <= 1.

    ``E(1) = 1`` exactly; K diverges there but E stays finite.
    """
    eps = _check(eps, allow_one=True)
    if eps == 1.0:
        return 1.0
    k, s = _agm(eps)
    return k * (1.0 - eps * eps * (0.5 + s))


def ellip_d(eps):
    """D(eps) = (K - E) / eps^2, with D(0) = pi/4."""
    eps = _check(eps)
    if eps < D_SERIES_SWITCH:
        # D = (pi/2) sum_n c_n c_{n+1} eps^(2n), c_n = binom(2n, n) / 4^n
        m = eps * eps
        return (math.pi / 2.0) * (
            0.5 + m * (3.0 / 16.0 + m * (15.0 / 128.0 + m * (175.0 / 2048.0)))
        )
    k, s = _agm(eps)
    return k * (0.5 + s)
