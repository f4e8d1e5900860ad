"""Finite-volume solver for the Rayleigh conductivity of a straight
cylindrical hole (radius r, plate thickness h).

The potential p solves Laplace's equation with p -> +1/2 above the plate,
p -> -1/2 below and zero normal derivative on the plate; K_R is the flux of
grad p through the hole. By antisymmetry p = 0 on the mid-plane of the hole,
so only the upper half is meshed: the hole ``rho < r, 0 < z < h/2`` and the
half-space above it, truncated at ``rho = R_out`` and ``z = h/2 + Z_out``.

Lengths are scaled by r. The tensor mesh is graded towards the re-entrant
edge of the hole: in the distance d from the edge the computational
coordinate is ``d^(1/q)`` for d <= 1 and ``1 + ln(d)/q`` beyond, uniform
with ``n`` cells per unit. On the truncation boundary the monopole far
field ``p = 1/2 - Q/(2 pi |x|)`` is imposed as the Robin condition
``dp/dn = (x.n/|x|^2)(1/2 - p)`` (x measured from the centre of the
opening).
"""

import math
import warnings
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from ..errors import ConvergenceError, DomainError

__all__ = [
    "FDGrid",
    "FDResult",
    "TruncationWarning",
    "fd_conductivity_cylinder",
    "solve_level",
]


class TruncationWarning(UserWarning):
    """Doubling the truncation radii changed K_R by more than the threshold."""


@dataclass(frozen=True)
class FDGrid:
    """Mesh parameters.

    ``n`` is the number of cells per unit of computational coordinate at the
    coarsest level; each of ``levels`` levels doubles it. ``R_out`` and
    ``Z_out`` are in units of the hole radius.
    """

    n: int = 16
    levels: int = 3
    grading: float = 2.0
    R_out: float = 16.0
    Z_out: float = 16.0
    truncation_tol: float = 5e-3

    def __post_init__(self):
        if self.n < 2 or self.levels < 2:
            raise DomainError("need n >= 2 and at least two levels")
        if self.R_out < 8.0 or self.Z_out < 8.0:
            raise DomainError("truncation radii must be at least 8 hole radii")
        if not self.grading >= 1.0:
            raise DomainError("grading exponent must be >= 1")

    def nr(self, level=0) -> int:
        """Radial cell count at a level (outside part included)."""
        return _count(1.0, self.n, level, self.grading) + _count(self.R_out - 1.0, self.n, level, self.grading)

    def nz(self, h_over_r, level=0) -> int:
        return _count(0.5 * h_over_r, self.n, level, self.grading) + _count(self.Z_out, self.n, level, self.grading)

    def spacing(self, level=0) -> float:
        """Computational cell size at a level."""
        return 1.0 / (self.n * 2**level)


@dataclass(frozen=True)
class FDResult:
    kr: float                    # Richardson-extrapolated K_R, m
    kr_fine: float               # finest-level K_R, m
    error_estimate: float        # m
    convergence_factor: float    # ratio of successive level differences
    level_values: Tuple[float, ...]
    truncation_change: float     # relative change when R_out, Z_out doubled
    grid: FDGrid


def _s_max(length, q):
    return length ** (1.0 / q) if length <= 1.0 else 1.0 + math.log(length) / q


def _d_of_s(s, q):
    s = np.asarray(s, dtype=float)
    return np.where(s <= 1.0, np.abs(s) ** q, np.exp(q * (s - 1.0)))


def _count(length, n, level, q):
    return max(1, math.ceil(_s_max(length, q) * n)) * 2**level


def _graded(length, n, level, q):
    """Distances 0 = d_0 < ... < d_N = length from the edge."""
    N = _count(length, n, level, q)
    d = _d_of_s(np.linspace(0.0, _s_max(length, q), N + 1), q)
    d[0], d[-1] = 0.0, length
    return d


def solve_level(h_over_r, grid: FDGrid, level: int) -> float:
    """Scaled conductivity K_R / r on one mesh level."""
    q = grid.grading
    H = 0.5 * h_over_r
    rf = np.concatenate([1.0 - _graded(1.0, grid.n, level, q)[::-1], 1.0 + _graded(grid.R_out - 1.0, grid.n, level, q)[1:]])
    rf[0] = 0.0
    Ni = _count(1.0, grid.n, level, q)
    zf = np.concatenate([H - _graded(H, grid.n, level, q)[::-1], H + _graded(grid.Z_out, grid.n, level, q)[1:]])
    zf[0] = 0.0
    Nh = _count(H, grid.n, level, q)
    nr, nz = len(rf) - 1, len(zf) - 1
    rc = 0.5 * (rf[1:] + rf[:-1])
    zc = 0.5 * (zf[1:] + zf[:-1])
    dz = np.diff(zf)
    ring = np.pi * (rf[1:] ** 2 - rf[:-1] ** 2)

    active = np.ones((nr, nz), dtype=bool)
    active[Ni:, :Nh] = False
    index = -np.ones((nr, nz), dtype=np.int64)
    index[active] = np.arange(active.sum())
    n_unk = int(active.sum())

    rows, cols, vals = [], [], []
    diag = np.zeros(n_unk)
    rhs = np.zeros(n_unk)

    def couple(ia, ib, g):
        rows.extend([ia, ib])
        cols.extend([ib, ia])
        vals.extend([-g, -g])
        np.add.at(diag, ia, g)
        np.add.at(diag, ib, g)

    # radial faces
    ok = active[:-1, :] & active[1:, :]
    g = 2.0 * np.pi * rf[1:-1][:, None] * dz[None, :] / (rc[1:] - rc[:-1])[:, None]
    couple(index[:-1, :][ok], index[1:, :][ok], np.broadcast_to(g, ok.shape)[ok])
    # axial faces
    ok = active[:, :-1] & active[:, 1:]
    g = ring[:, None] / (zc[1:] - zc[:-1])[None, :]
    couple(index[:, :-1][ok], index[:, 1:][ok], np.broadcast_to(g, ok.shape)[ok])
    # mid-plane of the hole: p = 0
    bottom = index[:Ni, 0]
    g_bottom = ring[:Ni] / zc[0]
    np.add.at(diag, bottom, g_bottom)
    # far field on the outer cylinder and the top cap
    Rf = rf[-1]
    Zt = zf[-1] - H
    j_up = np.arange(Nh, nz)
    x3 = zc[j_up] - H
    alpha = Rf / (Rf**2 + x3**2)
    g_side = 2.0 * np.pi * Rf * dz[j_up] * alpha / (1.0 + alpha * (Rf - rc[-1]))
    side = index[-1, j_up]
    np.add.at(diag, side, g_side)
    np.add.at(rhs, side, 0.5 * g_side)
    alpha = Zt / (rc**2 + Zt**2)
    g_top = ring * alpha / (1.0 + alpha * (zf[-1] - zc[-1]))
    top = index[:, -1]
    np.add.at(diag, top, g_top)
    np.add.at(rhs, top, 0.5 * g_top)

    rows.append(np.arange(n_unk))
    cols.append(np.arange(n_unk))
    vals.append(diag)
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_unk, n_unk),
    )
    p = spsolve(A, rhs)
    if not np.all(np.isfinite(p)):
        raise ConvergenceError("finite-volume solve produced non-finite values")
    return float(np.sum(g_bottom * p[bottom]))


def fd_conductivity_cylinder(r, h, grid: FDGrid = FDGrid(), check_truncation=True) -> FDResult:
    """K_R of a straight cylindrical hole, with a Richardson error estimate.

    Warns with :class:`TruncationWarning` when doubling ``R_out`` and
    ``Z_out`` moves the coarsest-level value by more than
    ``grid.truncation_tol`` (relative).
    """
    if not (r > 0 and h > 0):
        raise DomainError(f"need r > 0 and h > 0, got r={r!r}, h={h!r}")
    ratio = h / r
    vals = [solve_level(ratio, grid, k) for k in range(grid.levels)]
    d_last = vals[-1] - vals[-2]
    if grid.levels >= 3 and vals[-2] != vals[-3]:
        factor = abs((vals[-2] - vals[-3]) / d_last) if d_last != 0 else math.inf
    else:
        factor = float("nan")
    extrap = vals[-1] + d_last / 3.0
    change = 0.0
    if check_truncation:
        wide = replace(grid, R_out=2.0 * grid.R_out, Z_out=2.0 * grid.Z_out)
        base = solve_level(ratio, wide, 0)
        change = abs(base - vals[0]) / abs(vals[0])
        if change > grid.truncation_tol:
            warnings.warn(
                f"doubling the truncation radii changed K_R by {100 * change:.3g}%",
                TruncationWarning,
                stacklevel=2,
            )
    return FDResult(
        kr=extrap * r,
        kr_fine=vals[-1] * r,
        error_estimate=abs(d_last) / 3.0 * r,
        convergence_factor=factor,
        level_values=tuple(v * r for v in vals),
        truncation_change=change,
        grid=grid,
    )
