import json

import numpy as np
import pytest

import importlib
from srspm_sfs.errors import SweepFailed
from srspm_sfs.geometry import make_architecture
from srspm_sfs.sampling import WorkspaceSpec, sample_workspace, single_sample
from srspm_sfs.solver import sfs_radius
from srspm_sfs.surface import extract_cubic, neutral_axis_cubic
from srspm_sfs.sweep import compare, sweep, write_curve, write_dump, write_summary

from conftest import C_REF, P0, TABLE1

sweep_mod = importlib.import_module("srspm_sfs.sweep")


@pytest.fixture(scope="module")
def small():
    return sample_workspace(WorkspaceSpec.from_degrees(1, 30, 3, 40))


@pytest.fixture(scope="module")
def small_result(small):
    return sweep(make_architecture(*TABLE1["srspm2"]), small, 2.5, chunk_size=64)


def test_invariants(small, small_result):
    r = small_result
    assert r.n_samples == small.n_samples
    assert r.r2 == r.radii.min() == r.cumulative_min[-1]
    assert np.all(np.diff(r.cumulative_min) <= 0)
    assert np.all(r.per_shell_min >= r.cumulative_min)
    assert r.radii[r.argmin_index] == r.r2
    assert r.argmin_index == int(np.nonzero(r.radii == r.r2)[0][0])
    assert r.n_certified == r.n_safe == r.n_samples
    assert r.compute_time <= r.wall_time


def test_matches_single_calls(small, small_result):
    arch = make_architecture(*TABLE1["srspm2"])
    # batched coefficient extraction differs from the single path only in rounding
    for i in (0, 17, small.n_samples - 1):
        assert sfs_radius(arch, small.c[i], P0).radius == pytest.approx(small_result.radii[i], rel=1e-8)


@pytest.mark.parametrize("workers", [4, 16])
def test_deterministic_across_workers(small, small_result, workers):
    arch = make_architecture(*TABLE1["srspm2"])
    r = sweep(arch, small, 2.5, workers=workers, chunk_size=64)
    assert r.radii.tobytes() == small_result.radii.tobytes()
    assert r.r2 == small_result.r2 and r.argmin_index == small_result.argmin_index
    assert r.per_shell_min.tobytes() == small_result.per_shell_min.tobytes()


def test_restriction_property(small):
    arch = make_architecture(*TABLE1["srspm3"])
    lo = sample_workspace(WorkspaceSpec.from_degrees(1, 16, 3, 40))
    hi = sample_workspace(WorkspaceSpec.from_degrees(1, 28, 3, 40))
    assert sweep(arch, hi, 2.5).r2 <= sweep(arch, lo, 2.5).r2


def test_single_sample_reduction(srspm1):
    r = sweep(srspm1, single_sample(C_REF), 2.5)
    assert r.r2 == sfs_radius(srspm1, C_REF, P0).radius
    assert r.n_samples == 1


def test_center_on_surface_gives_zero(srspm1):
    roots = neutral_axis_cubic(extract_cubic(srspm1, C_REF)).real_roots()
    z0 = float(roots.max())
    assert z0 > 0
    r = sweep(srspm1, single_sample(C_REF), z0)
    assert r.r2 == 0.0 and r.status_counts["CenterOnSurface"] == 1


def test_sweep_failed(monkeypatch, srspm1):
    real = sweep_mod.solve_batch

    def broken(coeffs, p0, options=sweep_mod.DEFAULT_OPTIONS):
        sol = real(coeffs, p0, options)
        sol.status[1] = 2
        return sol

    monkeypatch.setattr(sweep_mod, "solve_batch", broken)
    s = sample_workspace(WorkspaceSpec.from_degrees(10, 10, 1, 5))
    with pytest.raises(SweepFailed) as info:
        sweep(srspm1, s, 2.5)
    assert [f["index"] for f in info.value.failures] == [1]


def test_compare_rows(small):
    a = make_architecture(*TABLE1["srspm1"])
    one = compare([a], small, 2.5)
    ref = sweep(a, small, 2.5)
    assert len(one.rows) == 1 and one.rows[0].r2 == ref.r2
    two = compare({"x": a, "y": a}, small, 2.5)
    assert two.rows[0].radii.tobytes() == two.rows[1].radii.tobytes()


def test_outputs(tmp_path, small, small_result):
    write_summary(small_result, tmp_path / "s.json")
    data = json.loads((tmp_path / "s.json").read_text())
    for key in ("architecture", "z0", "n_samples", "r2", "argmin", "wall_time_s"):
        assert key in data
    assert set(data["argmin"]) >= {"phi_deg", "k", "c"}
    write_curve(small_result, tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "phi_deg,per_shell_min,cumulative_min" and len(lines) == 11
    write_dump(small_result, small, tmp_path / "d.csv")
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0] == "phi_deg,kx,ky,kz,radius" and len(lines) == small.n_samples + 1


def test_reference_single_sample_published(srspm1):
    """Published single-orientation radius, reduced over a one-element set."""
    assert abs(sweep(srspm1, single_sample(C_REF), 2.5).r2 - 1.9864) <= 5e-4
