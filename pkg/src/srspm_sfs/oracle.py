"""Brute-force distance oracle built from exact line/surface intersections.

Lines parallel to each coordinate axis are laid on a square grid around the
centre.  Along a z-line the cubic is a cubic in z; along x- and y-lines it is a
quadratic.  Every real root is an exact surface point, so the smallest
distance found is an upper bound on the true distance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._poly import batched_roots, stable_quadratic_roots
from .errors import DomainError, OracleInconclusive
from .surface import CubicSurface

_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class OracleGrid:
    half_width: float = 4.0
    resolution: float = 0.01
    max_expansions: int = 4

    def __post_init__(self):
        if not self.resolution > 0:
            raise DomainError("oracle resolution must be positive")
        if not self.half_width >= self.resolution:
            raise DomainError("oracle half_width must be at least one resolution step")
        if self.max_expansions < 0:
            raise DomainError("max_expansions must be non-negative")


def _z_line_coeffs(a, x, y):
    """Cubic in z (highest power first) along the vertical line through (x, y)."""
    return np.stack([
        np.full_like(x, a[12]),
        a[4] * x + a[9] * y + a[13] + 0 * x,
        a[0] * x * x + a[2] * x * y + a[5] * x + a[7] * y * y + a[10] * y + a[14],
        a[1] * x * x + a[3] * x * y + a[6] * x + a[8] * y * y + a[11] * y + a[15],
    ], axis=-1)


def _x_line_coeffs(a, y, z):
    return (
        a[0] * z + a[1],
        a[2] * y * z + a[3] * y + a[4] * z * z + a[5] * z + a[6],
        (a[7] * y * y * z + a[8] * y * y + a[9] * y * z * z + a[10] * y * z + a[11] * y
         + a[12] * z ** 3 + a[13] * z * z + a[14] * z + a[15]),
    )


def _y_line_coeffs(a, x, z):
    return (
        a[7] * z + a[8],
        a[2] * x * z + a[3] * x + a[9] * z * z + a[10] * z + a[11],
        (a[0] * x * x * z + a[1] * x * x + a[4] * x * z * z + a[5] * x * z + a[6] * x
         + a[12] * z ** 3 + a[13] * z * z + a[14] * z + a[15]),
    )


def _cubic_real_roots(co: np.ndarray) -> np.ndarray:
    """Real roots (NaN padded, shape (m, 3)) of cubics with possibly vanishing leading terms."""
    m = co.shape[0]
    out = np.full((m, 3), np.nan)
    scale = np.abs(co).max(axis=1)
    scale[scale == 0] = 1.0
    lead = np.abs(co) > 1e-14 * scale[:, None]
    deg = np.where(lead[:, 0], 3, np.where(lead[:, 1], 2, np.where(lead[:, 2], 1, 0)))
    idx = deg == 3
    if idx.any():
        r = batched_roots(co[idx])
        r = np.where(np.abs(r.imag) <= _IMAG_TOL * (1 + np.abs(r)), r.real, np.nan)
        out[idx] = r
    idx = deg == 2
    if idx.any():
        r1, r2 = stable_quadratic_roots(co[idx, 1], co[idx, 2], co[idx, 3])
        out[idx, 0], out[idx, 1] = r1, r2
    idx = deg == 1
    if idx.any():
        out[idx, 0] = -co[idx, 3] / co[idx, 2]
    return out


def _grid(center2, half_width, resolution):
    n = int(np.floor(half_width / resolution + 1e-9))
    g = np.arange(-n, n + 1) * resolution
    U, W = np.meshgrid(g, g, indexing="ij")
    return U.ravel() + center2[0], W.ravel() + center2[1]


def surface_points(surface: CubicSurface, center, half_width: float, resolution: float,
                   axes: str = "zxy", chunk: int = 200_000) -> np.ndarray:
    """All exact surface points on axis-parallel grid lines within the box.

    The grid for each line family is centred on ``center`` with the given
    half-width and spacing; points outside the box along the line direction
    are dropped.
    """
    a = surface.a
    c = np.asarray(center, dtype=float).reshape(3)
    out = []
    for ax in axes:
        if ax == "z":
            U, W = _grid(c[[0, 1]], half_width, resolution)
        elif ax == "x":
            U, W = _grid(c[[1, 2]], half_width, resolution)
        else:
            U, W = _grid(c[[0, 2]], half_width, resolution)
        for s in range(0, U.size, chunk):
            u, w = U[s:s + chunk], W[s:s + chunk]
            if ax == "z":
                r = _cubic_real_roots(_z_line_coeffs(a, u, w))
                pts = np.stack(np.broadcast_arrays(u[:, None], w[:, None], r), axis=-1)
                along = 2
            else:
                r1, r2 = stable_quadratic_roots(*(_x_line_coeffs(a, u, w) if ax == "x"
                                                  else _y_line_coeffs(a, u, w)))
                r = np.stack([r1, r2], axis=-1)
                if ax == "x":
                    pts = np.stack(np.broadcast_arrays(r, u[:, None], w[:, None]), axis=-1)
                    along = 0
                else:
                    pts = np.stack(np.broadcast_arrays(u[:, None], r, w[:, None]), axis=-1)
                    along = 1
            pts = pts.reshape(-1, 3)
            keep = np.isfinite(pts[:, along]) & (np.abs(pts[:, along] - c[along]) <= half_width)
            out.append(pts[keep])
    return np.concatenate(out) if out else np.empty((0, 3))


def _box_min(surface, center, half_width, resolution):
    pts = surface_points(surface, center, half_width, resolution)
    if pts.shape[0] == 0:
        return np.inf, None
    d = np.linalg.norm(pts - center, axis=1)
    i = int(np.argmin(d))
    return float(d[i]), pts[i]


def oracle_closest(surface: CubicSurface, p0, grid: OracleGrid = OracleGrid()):
    """Closest grid-line surface point and its distance from ``p0``.

    The box doubles until the minimum lies at least one grid step inside it.

    Raises:
        OracleInconclusive: nothing found after ``max_expansions`` doublings.
    """
    p0 = np.asarray(p0, dtype=float).reshape(3)
    hw = grid.half_width
    best = (np.inf, None)
    for _ in range(grid.max_expansions + 1):
        best = _box_min(surface, p0, hw, grid.resolution)
        if best[0] <= hw - grid.resolution:
            return best[1], best[0]
        hw *= 2.0
    if np.isfinite(best[0]):
        return best[1], best[0]
    raise OracleInconclusive(
        f"no surface point within half-width {hw / 2:.3g} of {p0.tolist()}"
    )


def oracle_distance(surface: CubicSurface, p0, grid: OracleGrid = OracleGrid()) -> float:
    return oracle_closest(surface, p0, grid)[1]


def emptiness_probe(surface: CubicSurface, center, radius: float, n_points: int = 100_000,
                    rel_margin: float = 1e-6) -> dict:
    """Sample at least ``n_points`` surface points around the sphere and look for intruders.

    Returns the number of points probed, the closest probed distance and
    whether any point lies strictly inside ``radius * (1 - rel_margin)``.
    """
    center = np.asarray(center, dtype=float).reshape(3)
    hw = 1.05 * radius if radius > 0 else 1.0
    m = max(int(np.sqrt(n_points / 3.0)), 8)
    for _ in range(4):
        pts = surface_points(surface, center, hw, hw / m)
        if pts.shape[0] >= n_points:
            break
        m = int(m * 1.5) + 1
    d = np.linalg.norm(pts - center, axis=1) if pts.shape[0] else np.array([np.inf])
    dmin = float(d.min())
    return {
        "n_points": int(pts.shape[0]),
        "closest": dmin,
        "empty": bool(dmin >= radius * (1.0 - rel_margin)),
    }
