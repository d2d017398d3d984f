"""Wrench transmission matrix and the cubic gain-type singularity surface.

For a fixed orientation the determinant of the wrench matrix, multiplied by
the product of the leg lengths and divided by ``(3 r_m c0)^3 sin(gamma_f -
gamma_m)``, is a cubic polynomial ``g`` in the platform position with 16
monomials.  Its coefficients are recovered by an exact interpolation solve.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from ._poly import MONOMIAL_NAMES, MONOMIALS, monomial_matrix
from .errors import ArchitectureSingular, DegenerateLeg, DomainError, IllConditioned
from .geometry import (
    EPS_ARCH,
    EPS_LEG,
    Architecture,
    Pose,
    leg_lengths,
    platform_vertices,
    rotation_from_rodrigues,
)

COND_LIMIT = 1e10
SAMPLE_BOX_LO = np.array([-2.0, -2.0, 0.5])
SAMPLE_BOX_HI = np.array([2.0, 2.0, 4.5])


def _unscaled_columns(arch: Architecture, c, p) -> np.ndarray:
    """Columns ``[p + R t_i - b_i ; (R t_i) x (p - b_i)]`` stacked as (..., 6, 6).

    ``c`` may be (3,) or (N, 3) and ``p`` (..., 3); broadcasting follows numpy.
    """
    verts = platform_vertices(arch)
    R = rotation_from_rodrigues(c)
    Rt = np.einsum("...ij,kj->...ki", R, verts.t)  # (..., 6, 3)
    p = np.asarray(p, dtype=float)[..., None, :]
    top = p + Rt - verts.b
    bot = np.cross(Rt, p - verts.b)
    return np.swapaxes(np.concatenate([top, bot], axis=-1), -1, -2)


def wrench_matrix(arch: Architecture, pose: Pose) -> np.ndarray:
    """The 6x6 wrench transmission matrix with unit leg directions on top."""
    lengths = leg_lengths(arch, pose)
    return _unscaled_columns(arch, pose.c, pose.p) / lengths


def wrench_determinant(arch: Architecture, pose: Pose) -> float:
    """det(H), via LU with partial pivoting."""
    return float(np.linalg.det(wrench_matrix(arch, pose)))


def _check_arch(arch: Architecture, eps_arch: float = EPS_ARCH) -> None:
    if abs(arch.sin_gamma) <= eps_arch:
        raise ArchitectureSingular(
            f"sin(gamma_f - gamma_m) = {arch.sin_gamma:.3e}; the cubic is undefined"
        )


def scale_factor(arch: Architecture, c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    c0 = 1.0 + np.sum(c * c, axis=-1)
    return (3.0 * arch.r_m * c0) ** 3 * arch.sin_gamma


def scaled_g_value(arch: Architecture, c, p, eps_leg: float = EPS_LEG):
    """``det(H) * prod(l_i) / ((3 r_m c0)^3 sin(gamma_f - gamma_m))`` at position(s) ``p``.

    Equivalent to the determinant of the matrix with unnormalised leg vectors,
    so the leg lengths cancel.  ``p`` may be a single point or an (N, 3) array.
    """
    _check_arch(arch)
    c = np.asarray(c, dtype=float).reshape(3)
    p = np.asarray(p, dtype=float)
    cols = _unscaled_columns(arch, c, p)
    if np.any(np.linalg.norm(cols[..., :3, :], axis=-2) < eps_leg):
        raise DegenerateLeg("a leg has zero length at the requested position")
    val = np.linalg.det(cols) / scale_factor(arch, c)
    return float(val) if val.ndim == 0 else val


def sample_points(n: int = 16) -> np.ndarray:
    """Deterministic low-discrepancy interpolation nodes in the sampling box."""
    h = qmc.Halton(d=3, scramble=False).random(n)
    return SAMPLE_BOX_LO + (SAMPLE_BOX_HI - SAMPLE_BOX_LO) * h


_NODES = sample_points()
_VANDER = monomial_matrix(_NODES)
_VANDER_COND = float(np.linalg.cond(_VANDER))
_VANDER_INV = np.linalg.inv(_VANDER)


@dataclass(frozen=True)
class CubicSurface:
    """Cubic ``g(x, y, z) = sum a_n m_n(x, y, z)`` in the fixed monomial order.

    ``arch`` and ``c`` record where the surface came from (``None`` for
    hand-built surfaces).
    """

    a: np.ndarray
    arch: Architecture | None = None
    c: np.ndarray | None = field(default=None)

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(16)
        if not np.all(np.isfinite(a)):
            raise DomainError("surface coefficients must be finite")
        if not np.any(a):
            raise DomainError("surface coefficients are all zero")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        if self.c is not None:
            c = np.array(self.c, dtype=float).reshape(3)
            c.setflags(write=False)
            object.__setattr__(self, "c", c)

    @property
    def scale(self) -> float:
        return float(np.abs(self.a).max())

    def evaluate(self, p):
        v = monomial_matrix(p) @ self.a
        return float(v) if np.ndim(v) == 0 else v

    def gradient(self, p) -> np.ndarray:
        return cubic_gradient(self.a, p)

    def hessian(self, p) -> np.ndarray:
        return cubic_hessian(self.a, p)

    def as_dict(self) -> dict:
        return {
            "monomials": list(MONOMIAL_NAMES),
            "coefficients": self.a.tolist(),
            "architecture": None if self.arch is None else self.arch.as_dict(),
            "c": None if self.c is None else self.c.tolist(),
        }


def cubic_gradient(a, p) -> np.ndarray:
    """Analytic gradient of the cubic with coefficients ``a`` at point(s) ``p`` (..., 3)."""
    a = np.asarray(a, dtype=float)
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    a = np.moveaxis(a, -1, 0)
    gx = 2 * a[0] * x * z + 2 * a[1] * x + a[2] * y * z + a[3] * y + a[4] * z * z + a[5] * z + a[6]
    gy = a[2] * x * z + a[3] * x + 2 * a[7] * y * z + 2 * a[8] * y + a[9] * z * z + a[10] * z + a[11]
    gz = (a[0] * x * x + a[2] * x * y + 2 * a[4] * x * z + a[5] * x + a[7] * y * y
          + 2 * a[9] * y * z + a[10] * y + 3 * a[12] * z * z + 2 * a[13] * z + a[14])
    return np.stack([gx, gy, gz], axis=-1)


def cubic_hessian(a, p) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    a = np.moveaxis(a, -1, 0)
    hxx = 2 * a[0] * z + 2 * a[1]
    hxy = a[2] * z + a[3]
    hxz = 2 * a[0] * x + a[2] * y + 2 * a[4] * z + a[5]
    hyy = 2 * a[7] * z + 2 * a[8]
    hyz = a[2] * x + 2 * a[7] * y + 2 * a[9] * z + a[10]
    hzz = 2 * a[4] * x + 2 * a[9] * y + 6 * a[12] * z + 2 * a[13]
    H = np.stack([hxx, hxy, hxz, hxy, hyy, hyz, hxz, hyz, hzz], axis=-1)
    return H.reshape(H.shape[:-1] + (3, 3))


def evaluate(surface: CubicSurface, p):
    return surface.evaluate(p)


def gradient(surface: CubicSurface, p) -> np.ndarray:
    return surface.gradient(p)


def extract_coefficients(arch: Architecture, c, nodes: np.ndarray | None = None,
                         cond_limit: float = COND_LIMIT) -> np.ndarray:
    """Cubic coefficients for one or many orientations.

    ``c`` is (3,) or (N, 3); the result is (16,) or (N, 16).  ``nodes`` overrides
    the default 16 interpolation points.
    """
    _check_arch(arch)
    c = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(c)):
        raise DomainError("Rodrigues vector must be finite")
    if nodes is None:
        vinv = _VANDER_INV
        nodes = _NODES
        cond = _VANDER_COND
    else:
        nodes = np.asarray(nodes, dtype=float)
        V = monomial_matrix(nodes)
        cond = float(np.linalg.cond(V))
        vinv = np.linalg.inv(V) if cond <= cond_limit else None
    if cond > cond_limit:
        raise IllConditioned(f"interpolation matrix condition {cond:.3e} exceeds {cond_limit:.1e}")
    single = c.ndim == 1
    cs = c.reshape(-1, 3)
    # (N, 16, 6, 6): all orientations at all nodes
    cols = _unscaled_columns(arch, cs[:, None, :], nodes[None, :, :])
    vals = np.linalg.det(cols) / scale_factor(arch, cs)[:, None]
    a = vals @ vinv.T
    return a[0] if single else a


def extract_cubic(arch: Architecture, c, nodes: np.ndarray | None = None) -> CubicSurface:
    """Exact coefficients of ``g`` for orientation ``c`` (a 16x16 interpolation solve).

    Raises:
        ArchitectureSingular: ``sin(gamma_f - gamma_m)`` vanishes.
        IllConditioned: the interpolation matrix condition number exceeds 1e10.
    """
    a = extract_coefficients(arch, c, nodes)
    return CubicSurface(a, arch, np.asarray(c, dtype=float))


def held_out_residual(surface: CubicSurface, points: np.ndarray) -> float:
    """Largest ``|g_fit - g_det|`` over ``points``, relative to the largest ``|g_det|``."""
    truth = np.atleast_1d(scaled_g_value(surface.arch, surface.c, points))
    fit = np.atleast_1d(surface.evaluate(points))
    return float(np.abs(fit - truth).max() / np.abs(truth).max())


@dataclass(frozen=True)
class NeutralAxisCubic:
    """``g(0, 0, z) = a12 z^3 + a13 z^2 + a14 z + a15``."""

    coeffs: np.ndarray

    def __call__(self, z):
        return np.polyval(self.coeffs, z)

    def real_roots(self, imag_tol: float = 1e-9) -> np.ndarray:
        co = np.trim_zeros(np.asarray(self.coeffs, dtype=float), "f")
        if co.size < 2:
            return np.empty(0)
        r = np.roots(co)
        keep = np.abs(r.imag) <= imag_tol * (1.0 + np.abs(r))
        return np.sort(r[keep].real)


def neutral_axis_cubic(surface: CubicSurface) -> NeutralAxisCubic:
    co = np.array(surface.a[12:16])
    co.setflags(write=False)
    return NeutralAxisCubic(co)


def is_neutral_position_safe(surface: CubicSurface, z0: float, tol: float = 1e-10) -> bool:
    """True when ``|g(0, 0, z0)| > tol * max|a| * max(1, |z0|)^3``."""
    val = abs(neutral_axis_cubic(surface)(z0))
    return bool(val > tol * surface.scale * max(1.0, abs(z0)) ** 3)


__all__ = [
    "MONOMIALS",
    "MONOMIAL_NAMES",
    "CubicSurface",
    "NeutralAxisCubic",
    "wrench_matrix",
    "wrench_determinant",
    "scaled_g_value",
    "extract_coefficients",
    "extract_cubic",
    "evaluate",
    "gradient",
    "cubic_gradient",
    "cubic_hessian",
    "neutral_axis_cubic",
    "is_neutral_position_safe",
    "held_out_residual",
    "sample_points",
]
