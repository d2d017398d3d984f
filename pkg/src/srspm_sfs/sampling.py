"""Orientation-workspace discretisation by regular placement on the sphere.

The workspace of all rotations up to ``phi_max`` is a ball of radius
``tan(phi_max / 2)`` in Rodrigues coordinates.  It is sampled shell by shell:
each rotation angle on a uniform grid is paired with the same set of
regularly placed axes.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError


def regular_sphere_points(n_target: int) -> np.ndarray:
    """Equal-area band placement of about ``n_target`` unit vectors, shape (n, 3).

    Polar bands of equal area are laid at mid-band colatitudes, and each band
    receives a number of equally spaced points proportional to its
    circumference.  ``n_target = 1`` returns the north pole.
    """
    n_target = int(n_target)
    if n_target < 1:
        raise DomainError("n_target must be a positive integer")
    if n_target == 1:
        return np.array([[0.0, 0.0, 1.0]])
    area = 4.0 * np.pi / n_target
    d = np.sqrt(area)
    m_theta = max(int(round(np.pi / d)), 1)
    d_theta = np.pi / m_theta
    d_phi = area / d_theta
    pts = []
    for m in range(m_theta):
        theta = np.pi * (m + 0.5) / m_theta
        m_phi = int(round(2.0 * np.pi * np.sin(theta) / d_phi))
        phi = 2.0 * np.pi * np.arange(m_phi) / m_phi
        st = np.sin(theta)
        pts.append(np.stack([st * np.cos(phi), st * np.sin(phi), np.full(m_phi, np.cos(theta))], axis=1))
    return np.concatenate(pts)


@dataclass(frozen=True)
class WorkspaceSpec:
    """Rotation-angle grid (radians) and per-shell direction target."""

    phi_min: float
    phi_max: float
    delta_phi: float
    per_shell_target: int = 10_000

    def __post_init__(self):
        if not (np.isfinite(self.phi_min) and np.isfinite(self.phi_max) and np.isfinite(self.delta_phi)):
            raise DomainError("workspace angles must be finite")
        if not 0.0 < self.phi_min <= self.phi_max < np.pi:
            raise DomainError("need 0 < phi_min <= phi_max < pi")
        if not self.delta_phi > 0.0:
            raise DomainError("delta_phi must be positive")
        if int(self.per_shell_target) < 1:
            raise DomainError("per_shell_target must be a positive integer")

    @classmethod
    def from_degrees(cls, phi_min_deg, phi_max_deg, delta_phi_deg, per_shell_target=10_000):
        return cls(np.radians(phi_min_deg), np.radians(phi_max_deg), np.radians(delta_phi_deg),
                   int(per_shell_target))

    @property
    def n_shells(self) -> int:
        # small slack so that e.g. (30 - 1) / 1 in degrees is not floored to 28
        return int(np.floor((self.phi_max - self.phi_min) / self.delta_phi + 1e-9)) + 1

    def shell_angles(self) -> np.ndarray:
        return self.phi_min + self.delta_phi * np.arange(self.n_shells)


@dataclass(frozen=True)
class SampleSet:
    """Shell-major samples: ``phi`` (N,), ``k`` (N, 3) unit axes, ``c`` (N, 3)."""

    shell_phi: np.ndarray
    directions: np.ndarray
    phi: np.ndarray
    k: np.ndarray
    c: np.ndarray
    shell_index: np.ndarray

    @property
    def n_samples(self) -> int:
        return int(self.c.shape[0])

    @property
    def per_shell_count(self) -> int:
        return int(self.directions.shape[0])

    def shells(self):
        """(phi, directions) pairs in ascending phi."""
        return [(float(p), self.directions) for p in self.shell_phi]

    def subset(self, idx) -> "SampleSet":
        """Arbitrary sub-selection (keeps shell bookkeeping per sample)."""
        idx = np.asarray(idx)
        return SampleSet(self.shell_phi, self.directions, self.phi[idx], self.k[idx],
                         self.c[idx], self.shell_index[idx])

    def write_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phi_deg", "kx", "ky", "kz", "c1", "c2", "c3"])
            for ph, k, c in zip(np.degrees(self.phi), self.k, self.c):
                w.writerow([repr(float(ph)), *map(repr, map(float, k)), *map(repr, map(float, c))])


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def sample_workspace(spec: WorkspaceSpec) -> SampleSet:
    dirs = regular_sphere_points(spec.per_shell_target)
    shells = spec.shell_angles()
    n_dir = dirs.shape[0]
    phi = np.repeat(shells, n_dir)
    k = np.tile(dirs, (shells.size, 1))
    c = k * np.tan(0.5 * phi)[:, None]
    shell_index = np.repeat(np.arange(shells.size), n_dir)
    _freeze(shells, dirs, phi, k, c, shell_index)
    return SampleSet(shells, dirs, phi, k, c, shell_index)


def single_sample(c) -> SampleSet:
    """A one-element set for a given Rodrigues vector."""
    c = np.asarray(c, dtype=float).reshape(1, 3)
    nc = float(np.linalg.norm(c))
    phi = 2.0 * np.arctan(nc)
    k = c / nc if nc > 0 else np.array([[0.0, 0.0, 1.0]])
    shells = np.array([phi])
    _freeze(shells, k, c)
    return SampleSet(shells, k, np.array([phi]), k, c, np.array([0]))
