import numpy as np
import pytest

from srspm_sfs.errors import ArchitectureSingular, DegenerateLeg, DomainError
from srspm_sfs.geometry import (
    Pose,
    architecture_unchecked,
    axis_angle_matrix,
    leg_lengths,
    make_architecture,
    platform_vertices,
    rodrigues_from_axis_angle,
    rotation_from_rodrigues,
    rotation_z,
)

from conftest import C_REF, TABLE1


def test_make_architecture_table1():
    a = make_architecture(*TABLE1["srspm1"])
    assert (a.r_m, a.gamma_f, a.gamma_m) == (0.5, 0.5328, 0.7073)
    make_architecture(*TABLE1["srspm4"])


@pytest.mark.parametrize("args,exc", [
    ((0.5, 0.6, 0.6), ArchitectureSingular),
    ((0.0, 0.5, 0.6), DomainError),
    ((-1.0, 0.5, 0.6), DomainError),
    ((0.5, 0.0, 0.6), DomainError),
    ((0.5, 2.1, 0.6), DomainError),
    ((0.5, np.nan, 0.6), DomainError),
])
def test_make_architecture_rejects(args, exc):
    with pytest.raises(exc):
        make_architecture(*args)


def test_vertex_examples():
    v = platform_vertices(make_architecture(0.5, np.pi / 3, 0.2))
    assert np.allclose(v.b[0], [0.5, -np.sqrt(3) / 2, 0], atol=1e-15)
    v = platform_vertices(make_architecture(0.5, 0.2, np.pi / 3))
    assert np.allclose(v.t[1], [0.25, 0.25 * np.sqrt(3), 0], atol=1e-15)
    gf = 0.5328
    v = platform_vertices(make_architecture(*TABLE1["srspm1"]))
    ang = 2 * np.pi / 3 - gf
    assert np.allclose(v.b[2], [np.cos(ang), np.sin(ang), 0], atol=1e-15)
    assert np.allclose(np.linalg.norm(v.b, axis=1), 1.0, atol=1e-15)
    assert np.allclose(np.linalg.norm(v.t, axis=1), 0.5, atol=1e-15)


def test_threefold_vertex_symmetry():
    v = platform_vertices(make_architecture(*TABLE1["srspm2"]))
    Rz = rotation_z(2 * np.pi / 3)
    assert np.allclose(np.roll(v.b, -2, axis=0), v.b @ Rz.T, atol=1e-12)
    assert np.allclose(np.roll(v.t, -2, axis=0), v.t @ Rz.T, atol=1e-12)


def test_rotation_examples():
    assert np.array_equal(rotation_from_rodrigues([0, 0, 0]), np.eye(3))
    R = rotation_from_rodrigues([0, 0, 1])
    assert np.allclose(R, [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-15)
    c = C_REF
    phi = 2 * np.arctan(np.linalg.norm(c))
    assert np.allclose(rotation_from_rodrigues(c), axis_angle_matrix(c / np.linalg.norm(c), phi), atol=1e-12)


def test_rotation_orthogonal_random():
    rng = np.random.default_rng(3)
    C = rng.normal(size=(500, 3)) * rng.uniform(0, 5, (500, 1))
    R = rotation_from_rodrigues(C)
    eye = np.einsum("nji,njk->nik", R, R)
    assert np.abs(eye - np.eye(3)).max() <= 1e-12
    assert np.abs(np.linalg.det(R) - 1).max() <= 1e-12


def test_rodrigues_from_axis_angle():
    assert np.allclose(rodrigues_from_axis_angle([0, 0, 1], np.pi / 2), [0, 0, 1])
    assert np.allclose(rodrigues_from_axis_angle([1, 0, 0], np.pi / 3), [np.tan(np.pi / 6), 0, 0])
    k = np.array([1.0, 2.0, 3.0]) / np.sqrt(14.0)
    c = rodrigues_from_axis_angle(k, 0.4)
    assert abs(np.linalg.norm(c) - np.tan(0.2)) < 1e-15
    rng = np.random.default_rng(0)
    for _ in range(100):
        k = rng.normal(size=3)
        k /= np.linalg.norm(k)
        phi = rng.uniform(1e-3, np.pi - 1e-3)
        R1 = rotation_from_rodrigues(rodrigues_from_axis_angle(k, phi))
        assert np.abs(R1 - axis_angle_matrix(k, phi)).max() <= 1e-12


@pytest.mark.parametrize("k,phi", [([0, 0, 1], 0.0), ([0, 0, 1], np.pi), ([0, 0, 2], 0.3), ([0, 0, 1], -0.1)])
def test_rodrigues_from_axis_angle_rejects(k, phi):
    with pytest.raises(DomainError):
        rodrigues_from_axis_angle(k, phi)


def test_leg_lengths_symmetric_pose():
    a = make_architecture(*TABLE1["srspm1"])
    L = leg_lengths(a, Pose([0, 0, 2.5], [0, 0, 0]))
    ref = np.sqrt(2.5**2 + 1 + 0.25 - 2 * 0.5 * np.cos(0.5328 - 0.7073))
    assert np.abs(L - ref).max() <= 1e-12
    assert abs(ref - 2.5525) < 5e-5


def test_leg_lengths_unchecked_radially_aligned():
    a = architecture_unchecked(0.5, 0.6, 0.6)
    for z in (0.5, 1.0, 2.5):
        L = leg_lengths(a, Pose([0, 0, z], [0, 0, 0]))
        assert np.allclose(L, np.sqrt(z * z + 0.25), atol=1e-12)


def test_leg_lengths_brute_force():
    a = make_architecture(*TABLE1["srspm2"])
    p, c = np.array([0.1, -0.2, 2.0]), np.array([0.05, 0.0, 0.1])
    v = platform_vertices(a)
    R = rotation_from_rodrigues(c)
    ref = [np.linalg.norm(p + R @ v.t[i] - v.b[i]) for i in range(6)]
    assert np.allclose(leg_lengths(a, Pose(p, c)), ref, atol=1e-14)


def test_degenerate_leg():
    a = make_architecture(1.0, 0.3, 0.5)
    v = platform_vertices(a)
    # put MP vertex 0 onto FP vertex 0 with identity orientation
    p = v.b[0] - v.t[0]
    with pytest.raises(DegenerateLeg):
        leg_lengths(a, Pose(p, [0, 0, 0]))


def test_pose_validation():
    with pytest.raises(DomainError):
        Pose([0, 0, np.inf], [0, 0, 0])
    pose = Pose([0, 0, 1], [0, 0, 1])
    assert abs(pose.angle - np.pi / 2) < 1e-15
