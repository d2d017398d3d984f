"""Workspace sweep: per-orientation radii reduced to the workspace radius r2.

Samples are cut into fixed-size contiguous chunks.  Chunk boundaries do not
depend on the number of workers, so every sample sees exactly the same
floating-point operations and the reduction is bitwise reproducible.
"""
from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, NoRealContact, SolverIncomplete, SweepFailed
from .geometry import Architecture
from .sampling import SampleSet
from .solver import DEFAULT_OPTIONS, SolverOptions, _arbitrate, certify_batch, solve_batch
from .surface import CubicSurface, extract_coefficients

CHUNK_SIZE = 512


@dataclass
class SweepResult:
    architecture: Architecture
    z0: float
    r2: float
    argmin_index: int
    argmin_phi: float
    argmin_k: np.ndarray
    argmin_c: np.ndarray
    argmin_point: np.ndarray | None
    shell_phi: np.ndarray
    per_shell_min: np.ndarray
    cumulative_min: np.ndarray
    n_samples: int
    per_shell_count: int
    compute_time: float
    wall_time: float
    failures: list = field(default_factory=list)
    radii: np.ndarray | None = None
    status_counts: dict = field(default_factory=dict)
    n_certified: int = 0
    n_safe: int = 0
    name: str = ""

    def summary(self) -> dict:
        return {
            "name": self.name,
            "architecture": self.architecture.as_dict(),
            "z0": self.z0,
            "n_samples": self.n_samples,
            "per_shell_count": self.per_shell_count,
            "r2": self.r2,
            "argmin": {
                "index": self.argmin_index,
                "phi_deg": float(np.degrees(self.argmin_phi)),
                "k": np.asarray(self.argmin_k).tolist(),
                "c": np.asarray(self.argmin_c).tolist(),
                "tangent_point": None if self.argmin_point is None else np.asarray(self.argmin_point).tolist(),
            },
            "status_counts": self.status_counts,
            "certified": self.n_certified,
            "safe": self.n_safe,
            "failures": len(self.failures),
            "compute_time_s": self.compute_time,
            "wall_time_s": self.wall_time,
        }


def _solve_chunk(arch: Architecture, c: np.ndarray, z0: float, options: SolverOptions):
    t0 = time.perf_counter()
    p0 = np.array([0.0, 0.0, z0])
    a = extract_coefficients(arch, c)
    sol = solve_batch(a, p0, options)
    safe = sol.status == 0
    cert = np.zeros(c.shape[0], dtype=bool)
    if safe.any():
        cert[safe] = certify_batch(a[safe], p0, sol.point[safe], sol.radius[safe])["certified"]
    return sol.radius, sol.point, sol.status, cert, time.perf_counter() - t0


def _chunks(n: int, size: int):
    return [(s, min(s + size, n)) for s in range(0, n, size)]


def _run_chunks(arch, c, z0, options, workers, chunk_size):
    bounds = _chunks(c.shape[0], chunk_size)
    if workers == 0:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(bounds) == 1:
        return [_solve_chunk(arch, c[s:e], z0, options) for s, e in bounds]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(_solve_chunk, arch, c[s:e], z0, options) for s, e in bounds]
        return [f.result() for f in futs]


def sweep(arch: Architecture, samples: SampleSet, z0: float, workers: int = 1,
          options: SolverOptions = DEFAULT_OPTIONS, chunk_size: int = CHUNK_SIZE,
          keep_radii: bool = True, name: str = "") -> SweepResult:
    """Solve every sample about ``[0, 0, z0]`` and reduce to r2.

    Raises:
        SweepFailed: some samples are SolverIncomplete (listed in ``failures``).
    """
    t_start = time.perf_counter()
    if not z0 > 0:
        raise DomainError("z0 must be positive")
    c = np.asarray(samples.c)
    parts = _run_chunks(arch, c, float(z0), options, workers, chunk_size)
    radius = np.concatenate([p[0] for p in parts])
    point = np.concatenate([p[1] for p in parts])
    status = np.concatenate([p[2] for p in parts])
    cert = np.concatenate([p[3] for p in parts])
    compute = float(sum(p[4] for p in parts))

    failures = []
    p0 = np.array([0.0, 0.0, float(z0)])
    for i in np.nonzero(status == 2)[0]:
        surf = CubicSurface(extract_coefficients(arch, c[i]))
        try:
            _arbitrate(surf, p0, options)
        except NoRealContact:
            continue
        except SolverIncomplete as exc:
            failures.append({"index": int(i), "phi_deg": float(np.degrees(samples.phi[i])),
                             "c": c[i].tolist(), "error": str(exc)})
    if failures:
        raise SweepFailed(f"{len(failures)} samples could not be solved", failures)

    n_shell = samples.shell_phi.size
    per_shell = np.full(n_shell, np.inf)
    np.minimum.at(per_shell, samples.shell_index, radius)
    cumulative = np.minimum.accumulate(per_shell)
    assert np.all(np.diff(cumulative) <= 0)
    j = int(np.argmin(radius))  # first occurrence breaks ties by index
    r2 = float(radius[j])
    if np.any(status == 1):
        r2 = 0.0
    counts = {"Safe": int(np.sum(status == 0)), "CenterOnSurface": int(np.sum(status == 1)),
              "NoRealContact": int(np.sum(status == 2))}
    return SweepResult(
        architecture=arch, z0=float(z0), r2=r2, argmin_index=j,
        argmin_phi=float(samples.phi[j]), argmin_k=np.array(samples.k[j]),
        argmin_c=np.array(c[j]), argmin_point=point[j] if status[j] == 0 else None,
        shell_phi=np.array(samples.shell_phi), per_shell_min=per_shell,
        cumulative_min=cumulative, n_samples=samples.n_samples,
        per_shell_count=samples.per_shell_count, compute_time=compute,
        wall_time=time.perf_counter() - t_start, failures=failures,
        radii=radius if keep_radii else None, status_counts=counts,
        n_certified=int(cert.sum()), n_safe=counts["Safe"], name=name,
    )


@dataclass
class Comparison:
    rows: list

    @property
    def ranking(self) -> list:
        """Names ordered by decreasing r2 (stable for ties)."""
        order = sorted(range(len(self.rows)), key=lambda i: -self.rows[i].r2)
        return [self.rows[i].name for i in order]

    def summary(self) -> dict:
        return {"results": [r.summary() for r in self.rows], "ranking": self.ranking}


def compare(archs, samples: SampleSet, z0: float, workers: int = 1,
            options: SolverOptions = DEFAULT_OPTIONS, **kw) -> Comparison:
    """Sweep several architectures over the same samples.

    ``archs`` is a mapping name -> Architecture or a list of architectures.
    """
    if isinstance(archs, dict):
        items = list(archs.items())
    else:
        items = [(f"arch{i + 1}", a) for i, a in enumerate(archs)]
    if not items:
        raise DomainError("compare needs at least one architecture")
    return Comparison([sweep(a, samples, z0, workers, options, name=n, **kw) for n, a in items])


def write_summary(result, path) -> None:
    data = result.summary()
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def write_curve(result: SweepResult, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["phi_deg", "per_shell_min", "cumulative_min"])
        for ph, m, cm in zip(np.degrees(result.shell_phi), result.per_shell_min, result.cumulative_min):
            w.writerow([repr(float(ph)), repr(float(m)), repr(float(cm))])


def write_dump(result: SweepResult, samples: SampleSet, path) -> None:
    if result.radii is None:
        raise ValueError("sweep was run without keep_radii")
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["phi_deg", "kx", "ky", "kz", "radius"])
        for ph, k, r in zip(np.degrees(samples.phi), samples.k, result.radii):
            w.writerow([repr(float(ph)), *map(repr, map(float, k)), repr(float(r))])
