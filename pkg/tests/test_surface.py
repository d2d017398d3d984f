import numpy as np
import pytest

from srspm_sfs.errors import ArchitectureSingular, DomainError, IllConditioned
from srspm_sfs.geometry import Pose, architecture_unchecked, leg_lengths, make_architecture, rotation_z
from srspm_sfs.surface import (
    CubicSurface,
    evaluate,
    extract_coefficients,
    extract_cubic,
    gradient,
    held_out_residual,
    is_neutral_position_safe,
    neutral_axis_cubic,
    sample_points,
    scale_factor,
    scaled_g_value,
    wrench_determinant,
    wrench_matrix,
)
from srspm_sfs._poly import monomial_matrix, shift_coefficients
from srspm_sfs.oracle import surface_points

from conftest import C_REF, P0, TABLE1, random_instance


def _points(rng, n=1000):
    p = rng.uniform([-2.5, -2.5, -0.5], [2.5, 2.5, 5.0], size=(n, 3))
    return p


def test_wrench_unit_columns():
    rng = np.random.default_rng(1)
    for _ in range(20):
        arch, c = random_instance(rng)
        H = wrench_matrix(arch, Pose(rng.uniform(-1, 1, 3) + [0, 0, 2], c))
        assert np.allclose(np.linalg.norm(H[:3], axis=0), 1.0, atol=1e-10)


def test_wrench_matches_column_formula(srspm1):
    from srspm_sfs.geometry import platform_vertices, rotation_from_rodrigues

    pose = Pose(P0, [0, 0, 0])
    v = platform_vertices(srspm1)
    R = rotation_from_rodrigues(pose.c)
    H = np.zeros((6, 6))
    for i in range(6):
        leg = pose.p + R @ v.t[i] - v.b[i]
        H[:, i] = np.r_[leg, np.cross(R @ v.t[i], pose.p - v.b[i])] / np.linalg.norm(leg)
    assert np.allclose(wrench_matrix(srspm1, pose), H, atol=1e-14)


def test_architecture_singular_determinant_vanishes():
    arch = architecture_unchecked(0.5, 0.6, 0.6)
    rng = np.random.default_rng(2)
    for _ in range(10):
        H = wrench_matrix(arch, Pose(rng.uniform(-1, 1, 3) + [0, 0, 2], rng.normal(size=3) * 0.2))
        scale = np.prod(np.linalg.norm(H, axis=0))
        assert abs(np.linalg.det(H)) <= 1e-9 * scale
    with pytest.raises(ArchitectureSingular):
        extract_cubic(arch, [0, 0, 0])
    with pytest.raises(ArchitectureSingular):
        scaled_g_value(arch, [0, 0, 0], [0, 0, 2])


def test_determinant_zero_on_surface(srspm1):
    surf = extract_cubic(srspm1, C_REF)
    pts = surface_points(surf, P0, 2.2, 0.2)
    assert len(pts) > 10
    for p in pts[:50]:
        H = wrench_matrix(srspm1, Pose(p, C_REF))
        assert abs(np.linalg.det(H)) <= 1e-8 * np.prod(np.linalg.norm(H, axis=0))


def test_neutral_position_determinant_nonzero(srspm1):
    assert abs(wrench_determinant(srspm1, Pose(P0, C_REF))) > 1e-3


def test_scaled_value_is_determinant_times_lengths(srspm1):
    rng = np.random.default_rng(4)
    for _ in range(20):
        p = rng.uniform(-1, 1, 3) + [0, 0, 2]
        pose = Pose(p, C_REF)
        ref = wrench_determinant(srspm1, pose) * np.prod(leg_lengths(srspm1, pose)) / scale_factor(srspm1, C_REF)
        assert np.isclose(scaled_g_value(srspm1, C_REF, p), ref, rtol=1e-10, atol=0)


def test_scale_factor_identity(srspm1):
    assert np.isclose(scale_factor(srspm1, [0, 0, 0]), 27 * 0.5**3 * np.sin(0.5328 - 0.7073))


def test_extraction_held_out_reference(srspm1):
    surf = extract_cubic(srspm1, C_REF)
    assert held_out_residual(surf, _points(np.random.default_rng(5))) <= 1e-8


def test_extraction_deterministic(srspm1):
    a1 = extract_cubic(srspm1, C_REF).a
    a2 = extract_cubic(srspm1, C_REF).a
    assert a1.tobytes() == a2.tobytes()


def test_extraction_independent_of_nodes(srspm1):
    a1 = extract_cubic(srspm1, C_REF).a
    nodes = np.random.default_rng(9).uniform([-1.5, -1.5, 1.0], [1.5, 1.5, 4.0], size=(16, 3))
    a2 = extract_cubic(srspm1, C_REF, nodes=nodes).a
    assert np.abs(a1 - a2).max() <= 1e-8 * np.abs(a1).max()


def test_extraction_ill_conditioned(srspm1):
    nodes = np.zeros((16, 3))
    nodes[:, 2] = np.linspace(1, 2, 16)  # all on one line
    with pytest.raises(IllConditioned):
        extract_cubic(srspm1, C_REF, nodes=nodes)


def test_batched_extraction_matches_single(srspm1):
    C = np.random.default_rng(6).normal(size=(7, 3)) * 0.2
    A = extract_coefficients(srspm1, C)
    for i in range(7):
        assert np.allclose(A[i], extract_coefficients(srspm1, C[i]), rtol=0, atol=1e-12 * np.abs(A[i]).max())


def test_evaluate_and_gradient_basics():
    a = np.zeros(16)
    a[14] = 1.0
    s = CubicSurface(a)
    assert evaluate(s, [1, 2, 3]) == 3.0
    assert np.array_equal(gradient(s, [1, 2, 3]), [0.0, 0.0, 1.0])
    a = np.arange(1.0, 17.0)
    assert CubicSurface(a).evaluate([0, 0, 0]) == 16.0
    with pytest.raises(DomainError):
        CubicSurface(np.zeros(16))


def test_gradient_finite_differences(srspm1):
    surf = extract_cubic(srspm1, C_REF)
    rng = np.random.default_rng(7)
    h = 1e-6
    for p in _points(rng, 100):
        fd = np.array([(surf.evaluate(p + h * e) - surf.evaluate(p - h * e)) / (2 * h) for e in np.eye(3)])
        g = surf.gradient(p)
        assert np.linalg.norm(g - fd) <= 1e-6 * max(np.linalg.norm(g), 1e-300) + 1e-9 * surf.scale


def test_hessian_finite_differences(srspm1):
    surf = extract_cubic(srspm1, C_REF)
    p = np.array([0.3, -0.2, 1.7])
    h = 1e-5
    fd = np.stack([(surf.gradient(p + h * e) - surf.gradient(p - h * e)) / (2 * h) for e in np.eye(3)])
    assert np.allclose(surf.hessian(p), fd, atol=1e-8)


def test_shift_coefficients():
    rng = np.random.default_rng(8)
    a = rng.normal(size=16)
    p0 = rng.normal(size=3)
    q = rng.normal(size=(20, 3))
    assert np.allclose(monomial_matrix(q) @ shift_coefficients(a, p0), monomial_matrix(q + p0) @ a, atol=1e-12)


def test_neutral_axis_cubic():
    a = np.zeros(16)
    a[12:16] = [1, 0, 0, -8]
    s = CubicSurface(a)
    assert np.array_equal(neutral_axis_cubic(s).coeffs, [1, 0, 0, -8])
    assert not is_neutral_position_safe(s, 2.0)
    assert is_neutral_position_safe(s, 2.5)
    assert not is_neutral_position_safe(s, 2.5, tol=np.inf)
    assert np.allclose(neutral_axis_cubic(s).real_roots(), [2.0])


def test_neutral_axis_cubic_reference(srspm1):
    surf = extract_cubic(srspm1, C_REF)
    ax = neutral_axis_cubic(surf)
    assert np.array_equal(ax.coeffs, surf.a[12:16])
    assert is_neutral_position_safe(surf, 2.5)
    assert np.isclose(ax(2.5), surf.evaluate(P0), rtol=1e-14)


def test_threefold_symmetry_of_surface(srspm1):
    Rz = rotation_z(2 * np.pi / 3)
    rng = np.random.default_rng(10)
    for _ in range(5):
        c = rng.normal(size=3) * 0.2
        s1 = extract_cubic(srspm1, c)
        s2 = extract_cubic(srspm1, Rz @ c)
        p = _points(rng, 200)
        g1 = s1.evaluate(p)
        g2 = s2.evaluate(p @ Rz.T)
        assert np.abs(g1 - g2).max() <= 1e-8 * np.abs(g1).max()


def test_sign_invariant_zero_set():
    rng = np.random.default_rng(11)
    for _ in range(10):
        arch, c = random_instance(rng)
        surf = extract_cubic(arch, c)
        p = _points(rng, 200)
        det = np.array([wrench_determinant(arch, Pose(q, c)) for q in p])
        g = surf.evaluate(p)
        big = np.abs(g) > 1e-6 * np.abs(g).max()
        s = np.sign(det[big] * g[big])
        assert np.all(s == s[0])


def test_sample_points_deterministic():
    assert np.array_equal(sample_points(), sample_points())
    assert np.linalg.cond(monomial_matrix(sample_points())) < 1e10
