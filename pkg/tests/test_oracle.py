import numpy as np
import pytest

from srspm_sfs.errors import DomainError, OracleInconclusive
from srspm_sfs.oracle import OracleGrid, emptiness_probe, oracle_closest, oracle_distance, surface_points
from srspm_sfs.solver import sfs_radius
from srspm_sfs.surface import CubicSurface, extract_cubic

from conftest import C_REF, P0


def _plane(n, d):
    a = np.zeros(16)
    a[[6, 11, 14]] = n
    a[15] = -d
    return CubicSurface(a)


def test_grid_validation():
    with pytest.raises(DomainError):
        OracleGrid(1.0, 0.0)
    with pytest.raises(DomainError):
        OracleGrid(0.001, 0.01)


def test_plane_z1():
    d = oracle_distance(_plane([0, 0, 1], 1.0), [0, 0, 2.5], OracleGrid(4.0, 0.01))
    assert abs(d - 1.5) <= 0.01


def test_transformed_plane():
    rng = np.random.default_rng(31)
    for _ in range(5):
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        off = rng.uniform(-1, 1)
        p0 = np.array([0, 0, 2.5])
        exact = abs(n @ p0 - off)
        d = oracle_distance(_plane(n, off), p0, OracleGrid(4.0, 0.01))
        assert exact - 1e-12 <= d <= exact + 0.01


def test_points_lie_on_surface(srspm1):
    s = extract_cubic(srspm1, C_REF)
    pts = surface_points(s, P0, 2.5, 0.05)
    assert pts.shape[0] > 1000
    assert np.abs(s.evaluate(pts)).max() <= 1e-12 * s.scale * 30


def test_expansion_and_inconclusive():
    far = _plane([0, 0, 1], -20.0)  # z = -20
    d = oracle_distance(far, [0, 0, 0], OracleGrid(4.0, 0.5, 4))
    assert abs(d - 20.0) < 1e-9
    empty = CubicSurface(np.r_[np.zeros(13), 1.0, 0.0, 1.0])  # z^2 + 1
    with pytest.raises(OracleInconclusive):
        oracle_closest(empty, [0, 0, 0], OracleGrid(1.0, 0.1, 1))


def test_oracle_upper_bounds_solver(srspm1):
    s = extract_cubic(srspm1, C_REF)
    r = sfs_radius(srspm1, C_REF, P0).radius
    d = oracle_distance(s, P0, OracleGrid(4.0, 0.005))
    assert r <= d <= r + 0.01


def test_emptiness_probe(srspm1):
    r = sfs_radius(srspm1, C_REF, P0).radius
    s = extract_cubic(srspm1, C_REF)
    probe = emptiness_probe(s, P0, r)
    assert probe["n_points"] >= 100_000 and probe["empty"]
    assert not emptiness_probe(s, P0, r * 1.01)["empty"]


def test_reference_case_oracle_value(srspm1):
    """Published radius for the reference orientation, at oracle resolution 0.005."""
    d = oracle_distance(extract_cubic(srspm1, C_REF), P0, OracleGrid(4.0, 0.005))
    assert abs(d - 1.9864) <= 0.01
