"""Singularity-free spheres of semi-regular Stewart-Gough platforms."""
from .errors import (
    ArchitectureSingular,
    CenterOnSurface,
    ConfigError,
    DegenerateLeg,
    DomainError,
    IllConditioned,
    NoRealContact,
    OracleInconclusive,
    SFSError,
    SolverIncomplete,
    SweepFailed,
)
from .geometry import (
    Architecture,
    Pose,
    architecture_unchecked,
    leg_lengths,
    make_architecture,
    platform_vertices,
    rodrigues_from_axis_angle,
    rotation_from_rodrigues,
)
from .oracle import OracleGrid, emptiness_probe, oracle_distance, surface_points
from .sampling import SampleSet, WorkspaceSpec, regular_sphere_points, sample_workspace
from .solver import SFSResult, SolverOptions, Status, closest_point, sfs_radius
from .surface import (
    CubicSurface,
    evaluate,
    extract_cubic,
    gradient,
    is_neutral_position_safe,
    neutral_axis_cubic,
    scaled_g_value,
    wrench_determinant,
    wrench_matrix,
)
from .sweep import SweepResult, compare, sweep

__version__ = "0.1.0"
