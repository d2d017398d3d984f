"""Command-line front end.

Angles given on the command line (``--phi-*``) are in degrees; Rodrigues
vectors are dimensionless.  Every error class maps to its own exit code.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .errors import ConfigError, SFSError
from .oracle import oracle_closest, surface_points
from .sampling import sample_workspace, single_sample
from .solver import sfs_for_surface
from .surface import MONOMIAL_NAMES, extract_cubic, held_out_residual
from .sweep import compare, sweep, write_curve, write_dump, write_summary

EXIT_IO = 13
EXIT_USAGE = 2

_PLOT_SCRIPT = '''"""Plot r2 against the maximum rotation angle from the curve CSV files."""
import csv
import glob

import matplotlib.pyplot as plt

for path in sorted(glob.glob("curve_*.csv")):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    phi = [float(r["phi_deg"]) for r in rows]
    plt.plot(phi, [float(r["cumulative_min"]) for r in rows], marker="o", ms=3,
             label=path[6:-4])
plt.xlabel("phi (deg)")
plt.ylabel("r2")
plt.legend()
plt.grid(True, alpha=0.3)
plt.savefig("r2_curves.png", dpi=150)
'''


def _vec3(text: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}") from exc
    if v.size != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return v


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(type(o).__name__)


def _emit(obj, out_dir: Path | None, filename: str) -> None:
    text = json.dumps(obj, indent=2, default=_json_default)
    print(text)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / filename).write_text(text + "\n")


def _common(default) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=default,
                        help="JSON run configuration (default: bundled paper.cfg)")
    common.add_argument("--out", type=Path, default=default,
                        help="output directory (overrides the configuration)")
    return common


def build_parser() -> argparse.ArgumentParser:
    # subcommands suppress their defaults so flags given before the subcommand survive
    common = _common(argparse.SUPPRESS)
    ap = argparse.ArgumentParser(prog="srspm-sfs", description=__doc__.splitlines()[0], parents=[_common(None)])
    ap.add_argument("--emit-default-config", action="store_true",
                    help="print the bundled configuration and exit")
    sub = ap.add_subparsers(dest="command")

    def arch_arg(p, required=True):
        p.add_argument("--arch", required=required, help="architecture name from the configuration")

    p = sub.add_parser("surface", parents=[common], help="cubic singularity-surface coefficients")
    arch_arg(p)
    p.add_argument("--c", type=_vec3, required=True, help="Rodrigues vector c1,c2,c3")
    p.add_argument("--cloud", action="store_true",
                   help="also write surface points from the oracle grid (surface_cloud.csv)")
    p.add_argument("--z0", type=float, help="cloud centre height (default from configuration)")

    p = sub.add_parser("sfs", parents=[common], help="singularity-free sphere for one orientation")
    arch_arg(p)
    p.add_argument("--c", type=_vec3, required=True, help="Rodrigues vector c1,c2,c3")
    p.add_argument("--z0", type=float, help="neutral height")
    p.add_argument("--oracle-check", action="store_true", help="also run the brute-force grid oracle")

    for name, helptext in (("sweep", "workspace radius r2 for one architecture"),
                           ("compare", "r2 for every configured architecture over the same samples")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name == "sweep":
            arch_arg(p)
        p.add_argument("--z0", type=float, help="neutral height")
        p.add_argument("--threads", type=int, default=1, help="worker processes (0 = all cores)")
        p.add_argument("--per-shell", type=int, help="override the per-shell direction target")
        p.add_argument("--phi-max", type=float, help="override the maximum rotation angle, degrees")
        p.add_argument("--dump-samples", action="store_true",
                       help="write the samples and per-sample radii as CSV")

    p = sub.add_parser("dump-samples", parents=[common], help="write the workspace samples as CSV")
    p.add_argument("--per-shell", type=int, help="override the per-shell direction target")
    p.add_argument("--phi-max", type=float, help="override the maximum rotation angle, degrees")
    return ap


def _load_config(args) -> cfgmod.RunConfig:
    if args.config is None:
        return cfgmod.default_config()
    return cfgmod.load(args.config)


def _out_dir(args, cfg) -> Path:
    return args.out if args.out is not None else Path(cfg.output.directory)


def _workspace(args, cfg):
    ws = cfg.workspace
    kw = {}
    if getattr(args, "per_shell", None) is not None:
        kw["per_shell_target"] = args.per_shell
    if getattr(args, "phi_max", None) is not None:
        kw["phi_max_deg"] = args.phi_max
    if kw:
        ws = cfgmod.WorkspaceConfig(**{**ws.__dict__, **kw})
    return sample_workspace(ws.spec())


def _cmd_surface(args, cfg):
    arch = cfg.architecture(args.arch)
    surf = extract_cubic(arch, args.c)
    rng = np.random.default_rng(0)
    pts = rng.uniform([-2, -2, 0.5], [2, 2, 4.5], size=(1000, 3))
    out = surf.as_dict()
    out["ordering"] = "index: monomial -> " + ", ".join(f"{i}: {m}" for i, m in enumerate(MONOMIAL_NAMES))
    out["held_out_relative_residual"] = held_out_residual(surf, pts)
    out_dir = args.out
    if args.cloud:
        z0 = cfg.z0 if args.z0 is None else args.z0
        cloud = surface_points(surf, [0.0, 0.0, z0], 2.5, 0.05)
        out_dir = out_dir or _out_dir(args, cfg)
        out_dir.mkdir(parents=True, exist_ok=True)
        np.savetxt(out_dir / "surface_cloud.csv", cloud, delimiter=",", header="x,y,z", comments="")
        out["cloud_points"] = int(cloud.shape[0])
    _emit(out, out_dir, "surface.json")
    return 0


def _cmd_sfs(args, cfg):
    arch = cfg.architecture(args.arch)
    z0 = cfg.z0 if args.z0 is None else args.z0
    opts = cfg.solver.options()
    t0 = time.perf_counter()
    surf = extract_cubic(arch, args.c)
    res = sfs_for_surface(surf, [0.0, 0.0, z0], args.c, opts)
    out = res.as_dict()
    out["time_s"] = time.perf_counter() - t0
    if args.oracle_check:
        pt, dist = oracle_closest(surf, [0.0, 0.0, z0], opts.oracle)
        out["oracle"] = {"distance": dist, "point": pt, "resolution": opts.oracle.resolution,
                         "difference": dist - res.radius}
    _emit(out, args.out, "sfs.json")
    return 0


def _write_sweep_outputs(res, samples, out_dir: Path, dump: bool, tag: str):
    out_dir.mkdir(parents=True, exist_ok=True)
    write_summary(res, out_dir / f"summary_{tag}.json")
    write_curve(res, out_dir / f"curve_{tag}.csv")
    if dump:
        write_dump(res, samples, out_dir / f"radii_{tag}.csv")


def _cmd_sweep(args, cfg):
    arch = cfg.architecture(args.arch)
    z0 = cfg.z0 if args.z0 is None else args.z0
    samples = _workspace(args, cfg)
    res = sweep(arch, samples, z0, workers=args.threads, options=cfg.solver.options(),
                keep_radii=True, name=args.arch)
    out_dir = _out_dir(args, cfg)
    dump = args.dump_samples or cfg.output.dump_samples
    _write_sweep_outputs(res, samples, out_dir, dump, args.arch)
    if dump:
        samples.write_csv(out_dir / "samples.csv")
    print(json.dumps(res.summary(), indent=2, default=_json_default))
    return 0


def _cmd_compare(args, cfg):
    z0 = cfg.z0 if args.z0 is None else args.z0
    samples = _workspace(args, cfg)
    table = compare(cfg.named_architectures(), samples, z0, workers=args.threads,
                    options=cfg.solver.options())
    out_dir = _out_dir(args, cfg)
    dump = args.dump_samples or cfg.output.dump_samples
    for res in table.rows:
        _write_sweep_outputs(res, samples, out_dir, dump, res.name)
    if dump:
        samples.write_csv(out_dir / "samples.csv")
    (out_dir / "plot_curves.py").write_text(_PLOT_SCRIPT)
    summary = table.summary()
    (out_dir / "compare.json").write_text(json.dumps(summary, indent=2, default=_json_default) + "\n")
    for res in table.rows:
        print(f"{res.name:>10s}  r2 = {res.r2:.4f}  ({res.n_samples} samples, {res.wall_time:.1f} s)")
    print("ranking: " + " > ".join(table.ranking))
    return 0


def _cmd_dump_samples(args, cfg):
    samples = _workspace(args, cfg)
    out_dir = _out_dir(args, cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    samples.write_csv(out_dir / "samples.csv")
    print(json.dumps({"n_samples": samples.n_samples, "per_shell_count": samples.per_shell_count,
                      "shells": int(samples.shell_phi.size), "path": str(out_dir / "samples.csv")}))
    return 0


_COMMANDS = {
    "surface": _cmd_surface,
    "sfs": _cmd_sfs,
    "sweep": _cmd_sweep,
    "compare": _cmd_compare,
    "dump-samples": _cmd_dump_samples,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    try:
        if args.emit_default_config:
            cfg = _load_config(args)
            sys.stdout.write(cfg.dumps())
            return 0
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        cfg = _load_config(args)
        return _COMMANDS[args.command](args, cfg)
    except SFSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: I/O: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
