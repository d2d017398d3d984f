"""Largest singularity-free sphere about a fixed centre for one orientation.

The closest point of the cubic surface ``g = 0`` to the centre is a real
solution of ``g = 0`` together with ``(p - p0) x grad g = 0``.  With the centre
moved to the origin, x and y are eliminated dialytically with z kept as the
hidden variable, which gives a cubic 15x15 matrix polynomial ``M(z)``.  Its
eigenvalues (QZ on a companion pencil) contain the z-coordinates of every
critical point.  For each real z the horizontal slice of the surface is a
conic, and the critical points of distance on that conic come from a binary
quartic in the direction of the point.  Every candidate produced this way is
an exact surface point, so spurious candidates can only overestimate a
distance; the minimum over the candidate set is the global minimum.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ._poly import (
    batched_roots,
    dialytic_matrix,
    is_nonlinear_zero,
    polyeig,
    shift_coefficients,
    stable_quadratic_roots,
)
from .errors import CenterOnSurface, NoRealContact, OracleInconclusive, SolverIncomplete
from .geometry import Architecture
from .oracle import OracleGrid, oracle_closest
from .surface import CubicSurface, cubic_gradient, cubic_hessian, extract_cubic


class Status(str, enum.Enum):
    SAFE = "Safe"
    CENTER_ON_SURFACE = "CenterOnSurface"
    NO_REAL_CONTACT = "NoRealContact"


@dataclass(frozen=True)
class SolverOptions:
    """Numerical knobs.

    imag_tol: eigenvalues with ``|Im z| <= imag_tol (1 + |z|)`` count as real.
        Loose on purpose; extra candidates cannot lower the minimum.
    residual_tol: relative ``|g|`` accepted for a surface point.
    center_tol: relative ``|g(p0)|`` below which the centre is on the surface.
    polish: run Newton refinement on the winning candidate.
    """

    imag_tol: float = 1e-4
    residual_tol: float = 1e-8
    center_tol: float = 1e-10
    polish: bool = True
    oracle: OracleGrid = field(default_factory=OracleGrid)


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class SFSResult:
    center: np.ndarray
    radius: float
    tangent_point: np.ndarray | None
    orientation: np.ndarray | None
    status: Status
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "center": np.asarray(self.center).tolist(),
            "radius": self.radius,
            "tangent_point": None if self.tangent_point is None else np.asarray(self.tangent_point).tolist(),
            "orientation": None if self.orientation is None else np.asarray(self.orientation).tolist(),
            "status": self.status.value,
            "diagnostics": self.diagnostics,
        }


# ---------------------------------------------------------------------------
# slice machinery (vectorised over many (sample, z) pairs)

def _slice_coeffs(a: np.ndarray, z: np.ndarray):
    """Conic ``u^T A u + b.u + k`` cut from the shifted cubic at height z."""
    a11 = a[:, 0] * z + a[:, 1]
    a12 = 0.5 * (a[:, 2] * z + a[:, 3])
    a22 = a[:, 7] * z + a[:, 8]
    b1 = (a[:, 4] * z + a[:, 5]) * z + a[:, 6]
    b2 = (a[:, 9] * z + a[:, 10]) * z + a[:, 11]
    k = ((a[:, 12] * z + a[:, 13]) * z + a[:, 14]) * z + a[:, 15]
    return a11, a12, a22, b1, b2, k


def _pmul(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    R = np.zeros((P.shape[0], P.shape[1] + Q.shape[1] - 1))
    for i in range(P.shape[1]):
        R[:, i:i + Q.shape[1]] += P[:, i:i + 1] * Q
    return R


def _trimmed_roots(co: np.ndarray, rel: float = 1e-13) -> np.ndarray:
    """Roots of polynomials given highest power first, dropping negligible leading terms."""
    m, n1 = co.shape
    out = np.full((m, n1 - 1), np.nan, dtype=complex)
    scale = np.abs(co).max(axis=1)
    big = np.abs(co) > rel * np.where(scale > 0, scale, 1.0)[:, None]
    first = np.where(big.any(axis=1), np.argmax(big, axis=1), n1)
    for lead in range(n1 - 1):
        idx = np.nonzero(first == lead)[0]
        if idx.size:
            out[idx, : n1 - 1 - lead] = batched_roots(co[idx, lead:])
    return out


def _critical_directions(a11, a12, a22, b1, b2, k, dir_tol=1e-5):
    """Unit directions (m, 10, 2) of distance-critical points on each conic; NaN padded."""
    m = a11.size
    one = np.ones(m)
    # binary forms in (s, t) as polynomials in tau = t / s, ascending powers
    Q1 = np.stack([a11, 2 * a12, a22], axis=1)
    L1 = np.stack([b1, b2], axis=1)
    Q2 = np.stack([2 * a12, 2 * (a22 - a11), -2 * a12], axis=1)
    L2 = np.stack([b2, -b1], axis=1)
    F = _pmul(_pmul(L2, L2), Q1) - _pmul(_pmul(L2, Q2), L1) + k[:, None] * _pmul(Q2, Q2)
    dirs = np.full((m, 10, 2), np.nan)
    # chart s = 1 (roots in tau) and chart t = 1 (roots in sigma = s / t)
    r_tau = _trimmed_roots(F[:, ::-1])
    r_sig = _trimmed_roots(F)
    for r, slot, chart in ((r_tau, 0, 0), (r_sig, 4, 1)):
        ok = np.isfinite(r) & (np.abs(r.imag) <= dir_tol * (1 + np.abs(r))) & (np.abs(r.real) <= 1.0 + 1e-9)
        rr = np.where(ok, r.real, np.nan)
        if chart == 0:
            d = np.stack([np.broadcast_to(one[:, None], rr.shape), rr], axis=-1)
        else:
            d = np.stack([rr, np.broadcast_to(one[:, None], rr.shape)], axis=-1)
        dirs[:, slot:slot + 4] = d / np.linalg.norm(d, axis=-1, keepdims=True)
    # the coordinate directions are always added; this covers conics for
    # which every direction is critical (circles about the axis)
    dirs[:, 8] = [1.0, 0.0]
    dirs[:, 9] = [0.0, 1.0]
    return dirs


def _slice_points(a: np.ndarray, z: np.ndarray):
    """Candidate surface points (m, 20, 3) on the slices z of shifted cubics ``a`` (m, 16)."""
    a11, a12, a22, b1, b2, k = _slice_coeffs(a, z)
    d = _critical_directions(a11, a12, a22, b1, b2, k)
    s, t = d[..., 0], d[..., 1]
    q = a11[:, None] * s * s + 2 * a12[:, None] * s * t + a22[:, None] * t * t
    lin = b1[:, None] * s + b2[:, None] * t
    r1, r2 = stable_quadratic_roots(q, lin, np.broadcast_to(k[:, None], q.shape))
    rho = np.concatenate([r1, r2], axis=1)
    dd = np.concatenate([d, d], axis=1)
    zz = np.broadcast_to(z[:, None], rho.shape)
    return np.stack([rho * dd[..., 0], rho * dd[..., 1], zz], axis=-1)


def _eval(a: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Cubic values for coefficient rows ``a`` (m, 16) at points ``p`` (m, K, 3)."""
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    a = a[:, None, :]
    return (
        ((a[..., 0] * z + a[..., 1]) * x + (a[..., 2] * z + a[..., 3]) * y
         + (a[..., 4] * z + a[..., 5]) * z + a[..., 6]) * x
        + ((a[..., 7] * z + a[..., 8]) * y + (a[..., 9] * z + a[..., 10]) * z + a[..., 11]) * y
        + ((a[..., 12] * z + a[..., 13]) * z + a[..., 14]) * z + a[..., 15]
    )


# ---------------------------------------------------------------------------
# special structures

def _axis_points(a: np.ndarray) -> np.ndarray:
    """Surface points on the vertical line through the (shifted) centre, (m, 3, 3)."""
    co = a[:, 12:16]
    r = _trimmed_roots(co, rel=1e-14)
    z = np.where(np.isfinite(r) & (np.abs(r.imag) <= 1e-6 * (1 + np.abs(r))), r.real, np.nan)
    zeros = np.zeros_like(z)
    return np.stack([zeros, zeros, z], axis=-1)


def _is_revolution(a: np.ndarray, rel: float = 1e-10) -> bool:
    """g(x, y, z) depends on x^2 + y^2 only (about the shifted centre)."""
    s = np.abs(a).max()
    odd = np.abs(a[[2, 3, 4, 5, 6, 9, 10, 11]]).max()
    return bool(odd <= rel * s and abs(a[0] - a[7]) <= rel * s and abs(a[1] - a[8]) <= rel * s)


def _revolution_points(a: np.ndarray) -> np.ndarray:
    """Off-axis critical points of a surface of revolution, (n, 3).

    With g = A(z) r^2 + k(z), r^2 = -k/A and the meridian critical condition
    reduces to the cubic A k' - A' k - 2 z A^2 = 0.
    """
    A = np.array([a[0], a[1]])  # highest power first
    k = a[12:16]
    P = np.polysub(np.polysub(np.polymul(A, np.polyder(k)), np.polymul(np.polyder(A), k)),
                   2.0 * np.polymul([1.0, 0.0], np.polymul(A, A)))
    P = np.trim_zeros(np.where(np.abs(P) > 1e-14 * max(np.abs(P).max(), 1e-300), P, 0.0), "f")
    if P.size < 2:
        return np.empty((0, 3))
    zs = np.roots(P)
    zs = zs[np.abs(zs.imag) <= 1e-6 * (1 + np.abs(zs))].real
    pts = []
    for z in zs:
        Az = np.polyval(A, z)
        if Az == 0:
            continue
        w = -np.polyval(k, z) / Az
        if w >= 0:
            pts.append([np.sqrt(w), 0.0, z])
    return np.array(pts).reshape(-1, 3)


def _affine_point(a: np.ndarray) -> np.ndarray:
    """Foot of the perpendicular from the origin to the plane g = 0."""
    n = a[[6, 11, 14]]
    return (-a[15] / (n @ n) * n).reshape(1, 3)


# ---------------------------------------------------------------------------
# Newton refinement on the Lagrange system

def _polish(a: np.ndarray, p0: np.ndarray, p: np.ndarray, iters: int = 8):
    """Refine critical points ``p`` (m, 3) of ``|p - p0|`` on ``g = 0``.

    Works in the original coordinates, where the terms of ``g`` near a contact
    close to the base are small and evaluate accurately.  Newton on
    ``p - p0 - lam grad g = 0, g = 0`` with the last row and column divided by
    ``|grad g|``, so a tiny gradient does not make the system look singular.
    Returns the refined points and the final scaled residual norm.
    """
    m = p.shape[0]
    if m == 0:
        return p, np.zeros(0)
    pn = p.copy()
    g0 = cubic_gradient(a, pn)
    gg = np.einsum("ij,ij->i", g0, g0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(gg > 0, np.einsum("ij,ij->i", pn - p0, g0) / gg, 0.0)
    res = np.full(m, np.inf)
    for it in range(iters + 1):
        gv = _eval(a, pn[:, None, :])[:, 0]
        gr = cubic_gradient(a, pn)
        gnorm = np.linalg.norm(gr, axis=1)
        live = np.isfinite(gnorm) & (gnorm > 0) & np.isfinite(lam)
        gs = np.where(live, gnorm, 1.0)
        F = np.concatenate([pn - p0 - lam[:, None] * gr, (gv / gs)[:, None]], axis=1)
        F[~live] = np.inf
        res = np.linalg.norm(F, axis=1)
        if it == iters or not live.any():
            break
        F[~live] = 0.0
        nvec = gr / gs[:, None]
        H = cubic_hessian(a, pn)
        J = np.zeros((m, 4, 4))
        J[:, :3, :3] = np.eye(3) - lam[:, None, None] * H
        J[:, :3, 3] = -nvec
        J[:, 3, :3] = nvec
        J[~live] = np.eye(4)
        with np.errstate(all="ignore"):
            try:
                step = np.linalg.solve(J, F[..., None])[..., 0]
            except np.linalg.LinAlgError:
                step = np.stack([np.linalg.lstsq(Jk, Fk, rcond=None)[0] for Jk, Fk in zip(J, F)])
        step[~np.all(np.isfinite(step), axis=1)] = 0.0
        # damp very long steps
        sn = np.linalg.norm(step[:, :3], axis=1)
        lim = 0.25 * (1.0 + np.linalg.norm(pn - p0, axis=1))
        fac = np.where(sn > lim, lim / np.where(sn > 0, sn, 1.0), 1.0)
        pn = pn - fac[:, None] * step[:, :3]
        lam = lam - fac * step[:, 3] / gs
    return pn, res


# ---------------------------------------------------------------------------
# batched core

@dataclass
class BatchSolution:
    """Per-sample outcomes of :func:`solve_batch` (absolute coordinates)."""

    radius: np.ndarray
    point: np.ndarray
    status: np.ndarray  # 0 safe, 1 centre on surface, 2 no candidate
    n_candidates: np.ndarray
    path: np.ndarray  # 0 general, 1 revolution, 2 affine, 3 centre


def _normalise(a: np.ndarray) -> np.ndarray:
    s = np.abs(a).max(axis=1, keepdims=True)
    s[s == 0] = 1.0
    return a / s


def solve_batch(coeffs: np.ndarray, p0, options: SolverOptions = DEFAULT_OPTIONS) -> BatchSolution:
    """Closest surface point to ``p0`` for many cubics at once.

    ``coeffs`` is (N, 16).  Samples with no candidate get status 2; the caller
    decides how to arbitrate them.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    p0 = np.asarray(p0, dtype=float).reshape(3)
    n = coeffs.shape[0]
    a = _normalise(shift_coefficients(coeffs, p0))
    radius = np.full(n, np.inf)
    point = np.full((n, 3), np.nan)
    status = np.zeros(n, dtype=np.int8)
    ncand = np.zeros(n, dtype=np.int64)
    path = np.zeros(n, dtype=np.int8)

    on_surface = np.abs(a[:, 15]) <= options.center_tol
    status[on_surface] = 1
    path[on_surface] = 3
    radius[on_surface] = 0.0
    point[on_surface] = p0

    axis = _axis_points(a)  # (n, 3, 3)
    cand_pts = [axis]
    cand_own = [np.repeat(np.arange(n), 3)]

    general = []
    extra_pts, extra_own = [], []
    for i in np.nonzero(~on_surface)[0]:
        ai = a[i]
        if is_nonlinear_zero(ai, 1e-12):
            path[i] = 2
            extra_pts.append(_affine_point(ai))
            extra_own.append(np.full(1, i))
        elif _is_revolution(ai):
            path[i] = 1
            pts = _revolution_points(ai)
            extra_pts.append(pts)
            extra_own.append(np.full(pts.shape[0], i))
        else:
            general.append(i)

    # hidden-variable eigenvalues for the general samples
    zs, owners = [], []
    if general:
        Ms = dialytic_matrix(a[general])
        # any real axis root bounds the answer from above; farther z are useless
        ub = np.nanmin(np.abs(axis[general, :, 2]), axis=1)
        for j, i in enumerate(general):
            ev = polyeig(Ms[j])
            ev = ev[np.isfinite(ev)]
            ev = ev[np.abs(ev.imag) <= options.imag_tol * (1.0 + np.abs(ev))].real
            if np.isfinite(ub[j]):
                ev = ev[np.abs(ev) <= ub[j] * (1 + 1e-6) + 1e-12]
            zs.append(ev)
            owners.append(np.full(ev.size, i))
    if zs:
        z = np.concatenate(zs)
        own = np.concatenate(owners)
        if z.size:
            sp = _slice_points(a[own], z)  # (K, 20, 3)
            cand_pts.append(sp.reshape(-1, 3))
            cand_own.append(np.repeat(own, sp.shape[1]))
    if extra_pts:
        cand_pts.append(np.concatenate(extra_pts).reshape(-1, 3))
        cand_own.append(np.concatenate(extra_own))

    P = np.concatenate([c.reshape(-1, 3) for c in cand_pts])
    own = np.concatenate(cand_own)
    good = np.all(np.isfinite(P), axis=1) & ~on_surface[own]
    P, own = P[good], own[good]
    # residual screen relative to the normalised coefficients
    gv = _eval(a[own], P[:, None, :])[:, 0]
    nrm = np.linalg.norm(P, axis=1)
    keep = np.abs(gv) <= options.residual_tol * np.maximum(1.0, nrm) ** 3
    P, own, nrm = P[keep], own[keep], nrm[keep]
    np.add.at(ncand, own, 1)

    # per-sample argmin, ties to the first candidate
    best_q = np.full((n, 3), np.nan)
    best_d = np.full(n, np.inf)
    if own.size:
        order = np.lexsort((nrm, own))
        own_s = own[order]
        first = np.r_[True, own_s[1:] != own_s[:-1]]
        sel = order[first]
        best_q[own[sel]] = P[sel]
        best_d[own[sel]] = nrm[sel]

    found = np.isfinite(best_d) & ~on_surface
    point[found] = best_q[found] + p0
    radius[found] = best_d[found]
    if options.polish and found.any():
        idx = np.nonzero(found)[0]
        a_abs = _normalise(coeffs[idx])
        p, res = _polish(a_abs, p0, point[idx])
        pg = _eval(a_abs, p[:, None, :])[:, 0]
        pd = np.linalg.norm(p - p0, axis=1)
        moved = np.linalg.norm(p - point[idx], axis=1)
        accept = (
            np.all(np.isfinite(p), axis=1)
            & (np.abs(pg) <= options.residual_tol * np.maximum(1.0, np.linalg.norm(p, axis=1)) ** 3)
            & ((pd <= best_d[idx]) | ((res <= 1e-10 * (1.0 + pd)) & (moved <= 1e-3 * (1.0 + pd))))
        )
        point[idx[accept]] = p[accept]
        radius[idx[accept]] = pd[accept]

    status[~found & ~on_surface] = 2
    return BatchSolution(radius, point, status, ncand, path)


# ---------------------------------------------------------------------------
# certification

def certify(surface: CubicSurface, center, point, radius: float,
            residual_tol: float = 1e-8, distance_tol: float = 1e-8,
            parallel_tol: float = 1e-6, grad_floor: float = 1e-8) -> dict:
    """Tangency checks for a claimed closest point.

    ``g`` is judged relative to ``max|a| max(1, |point|)^3`` and the gradient
    floor relative to ``max|a|``.
    """
    a = surface.a
    center = np.asarray(center, dtype=float)
    point = np.asarray(point, dtype=float)
    scale = surface.scale
    g_rel = abs(surface.evaluate(point)) / (scale * max(1.0, np.linalg.norm(point)) ** 3)
    d = point - center
    dist = float(np.linalg.norm(d))
    dist_err = abs(dist - radius) / max(radius, 1e-300)
    grad = cubic_gradient(a, point)
    gnorm = float(np.linalg.norm(grad))
    degenerate = gnorm < grad_floor * scale
    if degenerate or dist == 0.0:
        par = None
        par_ok = True
    else:
        par = float(np.linalg.norm(np.cross(d, grad)) / (dist * gnorm))
        par_ok = par <= parallel_tol
    return {
        "g_residual": float(g_rel),
        "g_ok": bool(g_rel <= residual_tol),
        "distance_error": float(dist_err),
        "distance_ok": bool(dist_err <= distance_tol),
        "parallel_error": par,
        "parallel_ok": bool(par_ok),
        "gradient_degenerate": bool(degenerate),
        "certified": bool(g_rel <= residual_tol and dist_err <= distance_tol and par_ok),
    }


def certify_batch(coeffs: np.ndarray, center, points: np.ndarray, radii: np.ndarray,
                  residual_tol: float = 1e-8, distance_tol: float = 1e-8,
                  parallel_tol: float = 1e-6, grad_floor: float = 1e-8) -> dict:
    """Vectorised :func:`certify` over (N, 16) coefficients; returns arrays."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    center = np.asarray(center, dtype=float).reshape(3)
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    radii = np.asarray(radii, dtype=float).reshape(-1)
    scale = np.abs(coeffs).max(axis=1)
    g = _eval(coeffs, points[:, None, :])[:, 0]
    g_rel = np.abs(g) / (scale * np.maximum(1.0, np.linalg.norm(points, axis=1)) ** 3)
    d = points - center
    dist = np.linalg.norm(d, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        dist_err = np.abs(dist - radii) / np.maximum(radii, 1e-300)
        grad = cubic_gradient(coeffs, points)
        gnorm = np.linalg.norm(grad, axis=1)
        degenerate = gnorm < grad_floor * scale
        par = np.linalg.norm(np.cross(d, grad), axis=1) / (dist * gnorm)
    par = np.where(degenerate | (dist == 0), 0.0, par)
    ok = (g_rel <= residual_tol) & (dist_err <= distance_tol) & (par <= parallel_tol)
    return {
        "g_residual": g_rel,
        "distance_error": dist_err,
        "parallel_error": par,
        "gradient_degenerate": degenerate,
        "certified": ok,
    }


# ---------------------------------------------------------------------------
# public API

def _arbitrate(surface: CubicSurface, p0, options: SolverOptions):
    """Decide between NoRealContact and SolverIncomplete using the grid oracle."""
    try:
        pt, dist = oracle_closest(surface, p0, options.oracle)
    except OracleInconclusive as exc:
        raise NoRealContact("no real critical point and no surface point near the centre") from exc
    raise SolverIncomplete(
        f"solver found no contact but the oracle found a surface point at distance {dist:.6g}"
    )


def closest_point(surface: CubicSurface, p0, options: SolverOptions = DEFAULT_OPTIONS):
    """Global minimiser of ``|p - p0|`` subject to ``g(p) = 0``.

    Returns ``(point, distance)``.

    Raises:
        CenterOnSurface: ``p0`` lies on the surface.
        NoRealContact: no real contact, confirmed by the oracle.
        SolverIncomplete: the oracle found a surface point that the solver missed.
    """
    p0 = np.asarray(p0, dtype=float).reshape(3)
    sol = solve_batch(surface.a[None, :], p0, options)
    if sol.status[0] == 1:
        raise CenterOnSurface(f"centre {p0.tolist()} lies on the singularity surface")
    if sol.status[0] == 2:
        _arbitrate(surface, p0, options)
    return sol.point[0], float(sol.radius[0])


def result_from_solution(surface: CubicSurface, p0, c, radius, point, status_code,
                         path_code=0, n_candidates=0, certify_result=True) -> SFSResult:
    p0 = np.asarray(p0, dtype=float).reshape(3)
    c = None if c is None else np.asarray(c, dtype=float).reshape(3)
    diag = {"path": ("general", "revolution", "affine", "center")[int(path_code)],
            "n_candidates": int(n_candidates)}
    if status_code == 1:
        return SFSResult(p0, 0.0, p0.copy(), c, Status.CENTER_ON_SURFACE, diag)
    if status_code == 2:
        return SFSResult(p0, float("inf"), None, c, Status.NO_REAL_CONTACT, diag)
    if certify_result:
        diag["certificate"] = certify(surface, p0, point, radius)
    return SFSResult(p0, float(radius), np.asarray(point, dtype=float), c, Status.SAFE, diag)


def sfs_radius(arch: Architecture, c, p0, options: SolverOptions = DEFAULT_OPTIONS) -> SFSResult:
    """Certified singularity-free sphere radius about ``p0`` for orientation ``c``."""
    surface = extract_cubic(arch, c)
    return sfs_for_surface(surface, p0, c, options)


def sfs_for_surface(surface: CubicSurface, p0, c=None,
                    options: SolverOptions = DEFAULT_OPTIONS) -> SFSResult:
    p0 = np.asarray(p0, dtype=float).reshape(3)
    sol = solve_batch(surface.a[None, :], p0, options)
    if sol.status[0] == 2:
        try:
            _arbitrate(surface, p0, options)
        except NoRealContact:
            pass
    return result_from_solution(surface, p0, c, sol.radius[0], sol.point[0], sol.status[0],
                                sol.path[0], sol.n_candidates[0])
