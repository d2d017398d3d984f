"""Run configuration: a JSON object holding architectures, sampling and tolerances."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError, DomainError
from .geometry import Architecture, make_architecture
from .oracle import OracleGrid
from .sampling import WorkspaceSpec
from .solver import SolverOptions


@dataclass(frozen=True)
class ArchitectureEntry:
    name: str
    r_m: float
    gamma_f: float
    gamma_m: float

    def build(self) -> Architecture:
        return make_architecture(self.r_m, self.gamma_f, self.gamma_m)


@dataclass(frozen=True)
class WorkspaceConfig:
    phi_min_deg: float = 1.0
    phi_max_deg: float = 30.0
    delta_phi_deg: float = 1.0
    per_shell_target: int = 10_000

    def spec(self) -> WorkspaceSpec:
        return WorkspaceSpec.from_degrees(self.phi_min_deg, self.phi_max_deg,
                                          self.delta_phi_deg, self.per_shell_target)


@dataclass(frozen=True)
class OracleConfig:
    half_width: float = 4.0
    resolution: float = 0.01
    max_expansions: int = 4


@dataclass(frozen=True)
class SolverConfig:
    imag_tol: float = 1e-4
    residual_tol: float = 1e-8
    oracle: OracleConfig = field(default_factory=OracleConfig)

    def options(self) -> SolverOptions:
        o = self.oracle
        return SolverOptions(imag_tol=self.imag_tol, residual_tol=self.residual_tol,
                             oracle=OracleGrid(o.half_width, o.resolution, o.max_expansions))


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "results"
    dump_samples: bool = False


@dataclass(frozen=True)
class RunConfig:
    architectures: tuple
    workspace: WorkspaceConfig = field(default_factory=WorkspaceConfig)
    z0: float = 2.5
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def architecture(self, name: str) -> Architecture:
        for entry in self.architectures:
            if entry.name == name:
                return entry.build()
        known = ", ".join(e.name for e in self.architectures)
        raise ConfigError(f"unknown architecture {name!r} (known: {known})")

    def named_architectures(self) -> dict:
        return {e.name: e.build() for e in self.architectures}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["architectures"] = [asdict(e) for e in self.architectures]
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _section(d: dict, key: str, cls):
    raw = d.get(key, {})
    if not isinstance(raw, dict):
        raise ConfigError(f"'{key}' must be an object")
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigError(f"bad '{key}' section: {exc}") from exc


def from_dict(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(d) - {"architectures", "workspace", "z0", "solver", "output"}
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    archs = d.get("architectures")
    if not isinstance(archs, list) or not archs:
        raise ConfigError("'architectures' must be a non-empty list")
    try:
        entries = tuple(ArchitectureEntry(str(a["name"]), float(a["r_m"]), float(a["gamma_f"]),
                                          float(a["gamma_m"])) for a in archs)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad architecture entry: {exc}") from exc
    if len({e.name for e in entries}) != len(entries):
        raise ConfigError("architecture names must be unique")
    ws = _section(d, "workspace", WorkspaceConfig)
    solver_raw = dict(d.get("solver", {}))
    oracle = _section(solver_raw, "oracle", OracleConfig)
    solver_raw["oracle"] = oracle
    try:
        solver = SolverConfig(**solver_raw)
    except TypeError as exc:
        raise ConfigError(f"bad 'solver' section: {exc}") from exc
    out = _section(d, "output", OutputConfig)
    try:
        z0 = float(d.get("z0", 2.5))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad z0: {exc}") from exc
    cfg = RunConfig(entries, ws, z0, solver, out)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    tols = [cfg.solver.imag_tol, cfg.solver.residual_tol, cfg.solver.oracle.half_width,
            cfg.solver.oracle.resolution]
    if not all(t > 0 for t in tols):
        raise ConfigError("all tolerances must be positive")
    if not cfg.z0 > 0:
        raise ConfigError("z0 must be positive")
    try:
        for e in cfg.architectures:
            e.build()
        cfg.workspace.spec()
        cfg.solver.options()
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return from_dict(data)


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text)


def default_config_text() -> str:
    return resources.files("srspm_sfs").joinpath("data/paper.cfg").read_text()


def default_config() -> RunConfig:
    return loads(default_config_text())
