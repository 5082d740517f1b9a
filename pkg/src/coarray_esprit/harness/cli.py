"""Command line entry point.

Subcommands: ``geometry``, ``simulate``, ``bound``, ``sweep`` and the presets
``exp1``, ``exp2``, ``exp3``.
"""

import argparse
import logging
import sys
from dataclasses import fields

import numpy as np

from ..analysis import BoundIngredients, bound_report, matched_distance, resolution_snapshots
from ..array_model import coarray, freq_to_doa, parse_geometry, steering_matrix
from ..covariance_pipeline import covariance_set, dump_covariance_set
from ..errors import ConfigError, EspritError, GeometryError
from ..esprit import estimate_from_da
from ..linalg_kernels import singular_values, spectral_norm
from ..signal_sim import REFERENCE_FREQS, SourceScene, sample_snapshots
from .config import ExperimentConfig, load_config, parse_value, preset
from .sweep import fit_loglog_slope, format_aggregate_table, plot_curves, run_sweep, write_plot_data

log = logging.getLogger("coarray_esprit")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_GEOMETRY = 4
EXIT_NUMERIC = 5

REFERENCE_OMEGA = "0,1,6,9,11,13"
REFERENCE_FREQ_TEXT = ",".join(str(f) for f in REFERENCE_FREQS)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: usage error: {message}")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_scene_args(p, sigma_default=1.0):
    p.add_argument("--omega", default=REFERENCE_OMEGA, help="sensor positions, e.g. 0,1,6,9,11,13")
    p.add_argument("--freqs", type=_float_list, default=list(REFERENCE_FREQS), help="source frequencies in [0,1)")
    p.add_argument("--powers", type=_float_list, default=None, help="source powers (default: all 1)")
    p.add_argument("--sigma", type=float, default=sigma_default, help="noise standard deviation")


def _add_config_args(p):
    """One flag per config key, spelled both ``--l_grid`` and ``--l-grid``."""
    for f in fields(ExperimentConfig):
        names = {f"--{f.name}", f"--{f.name.replace('_', '-')}"}
        p.add_argument(*sorted(names), dest=f.name, default=None, metavar="VALUE")


def build_parser():
    parser = _Parser(prog="coarray-esprit", description="DA-/SS-ESPRIT with sparse linear arrays")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("geometry", help="coarray, aperture and steering-matrix constants")
    _add_scene_args(p)

    p = sub.add_parser("simulate", help="run one trial and print estimates against truth")
    _add_scene_args(p)
    p.add_argument("--L", "-L", dest="n_snapshots", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=["DA", "SS", "both"], default="both")
    p.add_argument("--dump-cov", metavar="PATH", default=None, help="write the covariance chain as text")

    p = sub.add_parser("bound", help="print the error bound report")
    _add_scene_args(p)
    p.add_argument("--L", "-L", dest="n_snapshots", type=int, default=10000)
    p.add_argument("--delta", type=float, default=None, help="also print the resolution snapshot threshold")

    p = sub.add_parser("sweep", help="run a Monte Carlo sweep from a config file and/or flags")
    p.add_argument("--config", default=None, help="flat key = value config file")
    _add_config_args(p)
    p.add_argument("--emit-plot-data", metavar="DIR", default=None)

    for name in ("exp1", "exp2", "exp3"):
        p = sub.add_parser(name, help=f"desk-scale preset {name}")
        p.add_argument("--config", default=None)
        _add_config_args(p)
        p.add_argument("--full-range", action="store_true", help="extend the snapshot grid down to L = 1")
        p.add_argument("--emit-plot-data", metavar="DIR", default=None)
    return parser


def _scene(args):
    geom = parse_geometry(args.omega)
    scene = SourceScene(tuple(args.freqs), None if args.powers is None else tuple(args.powers), args.sigma**2)
    return geom, scene


def cmd_geometry(args):
    geom, scene = _scene(args)
    ca = coarray(geom)
    s = singular_values(steering_matrix(range(ca.m_contig), scene.freqs))
    print(f"omega = {geom}")
    print(f"N_S = {geom.n_sensors}")
    print(f"N = {geom.n_virtual}")
    print(f"coarray = {','.join(str(d) for d in ca.differences)}")
    print(f"M = {ca.m_contig}")
    print(f"K = {scene.k}")
    sk = s[scene.k - 1] if scene.k <= s.size else 0.0
    print(f"sigma_K(A_M) = {sk:.12g}")
    print(f"norm(A_Omega) = {spectral_norm(steering_matrix(geom.omega, scene.freqs)):.12g}")
    return EXIT_OK


def cmd_simulate(args):
    geom, scene = _scene(args)
    y = sample_snapshots(geom, scene, args.n_snapshots, args.seed)
    cs = covariance_set(y)
    if args.dump_cov:
        dump_covariance_set(cs, args.dump_cov)
    truth = np.sort(scene.freqs)
    print(f"truth     freqs = {' '.join(f'{f:.6f}' for f in truth)}")
    print(f"truth     doas  = {' '.join(f'{freq_to_doa(f):.2f}' for f in truth)}")
    variants = ("DA", "SS") if args.variant == "both" else (args.variant,)
    for v in variants:
        est = estimate_from_da(cs.r_da_hat, scene.k, v)
        f = np.sort(est.freqs)
        print(f"{v}-ESPRIT  freqs = {' '.join(f'{x:.6f}' for x in f)}")
        print(f"{v}-ESPRIT  md    = {matched_distance(f, truth):.6e}")
    return EXIT_OK


def cmd_bound(args):
    geom, scene = _scene(args)
    report = bound_report(geom, scene, args.n_snapshots)
    sys.stdout.write(report.to_text())
    if args.delta is not None:
        ing = BoundIngredients.from_problem(geom, scene, args.n_snapshots)
        print(f"resolution_snapshots = {resolution_snapshots(ing, args.delta):.12g}")
    return EXIT_OK


def _overrides(args):
    out = {}
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            out[f.name] = parse_value(f.name, v)
    return out


def _run(cfg, emit_dir):
    out = run_sweep(cfg)
    print(format_aggregate_table(out.aggregates))
    if cfg.plot_x == "L":
        for key, pts in plot_curves(out.aggregates, "L").items():
            if len(pts) >= 3 and all(y > 0 for _, y in pts):
                print(f"slope {key}: {fit_loglog_slope(pts):.3f}")
    n_err = sum(r.error_flag for r in out.results)
    print(f"trials = {len(out.results)}, failed = {n_err}")
    print(f"wrote {out.csv_path} and {out.aggregate_path}")
    if emit_dir:
        for path in write_plot_data(out.aggregates, emit_dir, cfg.experiment_id, cfg.plot_x):
            print(f"wrote {path}")
    return EXIT_OK


def cmd_sweep(args):
    cfg = load_config(args.config, _overrides(args))
    return _run(cfg, args.emit_plot_data)


def cmd_preset(args):
    cfg = load_config(args.config, _overrides(args), base=preset(args.command, args.full_range))
    return _run(cfg, args.emit_plot_data)


COMMANDS = {
    "geometry": cmd_geometry,
    "simulate": cmd_simulate,
    "bound": cmd_bound,
    "sweep": cmd_sweep,
    "exp1": cmd_preset,
    "exp2": cmd_preset,
    "exp3": cmd_preset,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return EXIT_OK
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except GeometryError as exc:
        print(f"error: invalid geometry: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EspritError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
