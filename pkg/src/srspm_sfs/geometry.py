"""Platform geometry, Rodrigues-parameter rotations and inverse kinematics.

The fixed-platform circumradius is normalised to one, so every length in the
package is dimensionless.  Vertices are enumerated in the order
``-g, g, 2pi/3 - g, 2pi/3 + g, 4pi/3 - g, 4pi/3 + g`` and leg ``i`` joins FP
vertex ``i`` to MP vertex ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArchitectureSingular, DegenerateLeg, DomainError

EPS_ARCH = 1e-9
EPS_LEG = 1e-9
_GAMMA_MAX = 2.0 * np.pi / 3.0


@dataclass(frozen=True)
class Architecture:
    """Shape parameters of a semi-regular Stewart-Gough platform.

    Attributes:
        r_m: moving-platform circumradius.
        gamma_f: half-angle subtended by the FP vertex pair, radians.
        gamma_m: half-angle subtended by the MP vertex pair, radians.
    """

    r_m: float
    gamma_f: float
    gamma_m: float

    @property
    def sin_gamma(self) -> float:
        return float(np.sin(self.gamma_f - self.gamma_m))

    def as_dict(self) -> dict:
        return {"r_m": self.r_m, "gamma_f": self.gamma_f, "gamma_m": self.gamma_m}


def make_architecture(r_m, gamma_f, gamma_m, eps_arch: float = EPS_ARCH) -> Architecture:
    """Validate and build an :class:`Architecture`.

    Raises:
        DomainError: non-finite values, ``r_m <= 0`` or an angle outside (0, 2pi/3).
        ArchitectureSingular: ``|sin(gamma_f - gamma_m)| <= eps_arch``.
    """
    vals = np.array([r_m, gamma_f, gamma_m], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"architecture parameters must be finite, got {vals.tolist()}")
    r_m, gamma_f, gamma_m = (float(v) for v in vals)
    if r_m <= 0.0:
        raise DomainError(f"r_m must be positive, got {r_m}")
    for name, g in (("gamma_f", gamma_f), ("gamma_m", gamma_m)):
        if not 0.0 < g < _GAMMA_MAX:
            raise DomainError(f"{name} must lie in (0, 2pi/3), got {g}")
    if abs(np.sin(gamma_f - gamma_m)) <= eps_arch:
        raise ArchitectureSingular(
            f"gamma_f={gamma_f} and gamma_m={gamma_m} give an architecture singularity"
        )
    return Architecture(r_m, gamma_f, gamma_m)


def architecture_unchecked(r_m, gamma_f, gamma_m) -> Architecture:
    """Build an Architecture without validation (for probing singular designs)."""
    return Architecture(float(r_m), float(gamma_f), float(gamma_m))


@dataclass(frozen=True)
class Pose:
    """Moving-platform pose: position ``p`` and Rodrigues vector ``c``."""

    p: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).reshape(3)
        c = np.asarray(self.c, dtype=float).reshape(3)
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(c))):
            raise DomainError("pose components must be finite")
        p.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "c", c)

    @property
    def angle(self) -> float:
        """Rotation angle ``2 atan |c|``, always in [0, pi)."""
        return 2.0 * float(np.arctan(np.linalg.norm(self.c)))


@dataclass(frozen=True)
class PlatformVertices:
    """FP vertices ``b`` (fixed frame) and MP vertices ``t`` (moving frame), each (6, 3)."""

    b: np.ndarray
    t: np.ndarray


def vertex_angles(gamma: float) -> np.ndarray:
    base = np.array([0.0, 0.0, 2.0, 2.0, 4.0, 4.0]) * np.pi / 3.0
    return base + gamma * np.array([-1.0, 1.0, -1.0, 1.0, -1.0, 1.0])


def platform_vertices(arch: Architecture) -> PlatformVertices:
    beta = vertex_angles(arch.gamma_f)
    mu = vertex_angles(arch.gamma_m)
    b = np.stack([np.cos(beta), np.sin(beta), np.zeros(6)], axis=1)
    t = arch.r_m * np.stack([np.cos(mu), np.sin(mu), np.zeros(6)], axis=1)
    b.setflags(write=False)
    t.setflags(write=False)
    return PlatformVertices(b, t)


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix; works on (..., 3) stacks."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def rotation_from_rodrigues(c) -> np.ndarray:
    """Rotation matrix ``I + 2 (C + C^2) / (1 + c.c)`` for Rodrigues vector(s) ``c``.

    Accepts a single 3-vector or an (N, 3) stack and returns (3, 3) or (N, 3, 3).
    """
    c = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(c)):
        raise DomainError("Rodrigues vector must be finite")
    C = skew(c)
    c0 = 1.0 + np.sum(c * c, axis=-1)
    return np.eye(3) + (2.0 / c0)[..., None, None] * (C + C @ C)


def axis_angle_matrix(k, phi: float) -> np.ndarray:
    """Rotation by ``phi`` about the unit axis ``k`` (classical Rodrigues formula)."""
    k = np.asarray(k, dtype=float)
    K = skew(k)
    return np.eye(3) + np.sin(phi) * K + (1.0 - np.cos(phi)) * (K @ K)


def rodrigues_from_axis_angle(k, phi: float) -> np.ndarray:
    """Rodrigues vector ``k tan(phi/2)``.

    Raises:
        DomainError: ``phi`` outside (0, pi) or ``k`` not unit length within 1e-10.
    """
    k = np.asarray(k, dtype=float).reshape(3)
    if not (np.all(np.isfinite(k)) and np.isfinite(phi)):
        raise DomainError("axis and angle must be finite")
    if abs(np.linalg.norm(k) - 1.0) > 1e-10:
        raise DomainError(f"rotation axis must be a unit vector, |k| = {np.linalg.norm(k)}")
    if not 0.0 < phi < np.pi:
        raise DomainError(f"rotation angle must lie in (0, pi), got {phi}")
    return k * np.tan(0.5 * phi)


def rotation_z(angle: float) -> np.ndarray:
    ca, sa = np.cos(angle), np.sin(angle)
    return np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])


def leg_vectors(arch: Architecture, pose: Pose) -> np.ndarray:
    """Unnormalised leg vectors ``p + R t_i - b_i`` as a (6, 3) array."""
    verts = platform_vertices(arch)
    R = rotation_from_rodrigues(pose.c)
    return pose.p + verts.t @ R.T - verts.b


def leg_lengths(arch: Architecture, pose: Pose, eps_leg: float = EPS_LEG) -> np.ndarray:
    """Inverse kinematics: the six leg lengths ``|p + R t_i - b_i|``.

    Raises:
        DegenerateLeg: some leg is shorter than ``eps_leg``.
    """
    lengths = np.linalg.norm(leg_vectors(arch, pose), axis=1)
    if np.any(lengths < eps_leg):
        raise DegenerateLeg(f"leg lengths {lengths.tolist()} contain a degenerate leg")
    return lengths
