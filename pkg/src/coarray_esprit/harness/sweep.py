"""Seeded Monte Carlo sweeps over (variant, separation, noise, snapshots) grids."""

import csv
import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..analysis import BoundIngredients, matched_distance, md_bound, md_bound_unclamped
from ..covariance_pipeline import da_lags, da_toeplitz, sample_covariance
from ..errors import ConfigError, EspritError
from ..esprit import da_ss_condition, estimate_from_da
from ..signal_sim import SourceScene, sample_snapshots
from .config import ExperimentConfig, scene_for_delta

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "experiment_id", "variant", "L", "sigma2", "delta", "trial", "seed",
    "md", "md_bound", "da_ss_equal", "error_flag", "elapsed_ms",
)
AGGREGATE_COLUMNS = (
    "experiment_id", "variant", "L", "sigma2", "delta",
    "trials", "mean_md", "median_md", "md_bound", "error_rate", "da_ss_equal_rate",
)
FAILED_MD = 0.5


@dataclass(frozen=True)
class GridPoint:
    experiment_id: str
    variant: str
    n_snapshots: int
    sigma2: float
    delta: float  # nan outside separation sweeps


@dataclass(frozen=True)
class TrialResult:
    experiment_id: str
    variant: str
    n_snapshots: int
    sigma2: float
    delta: float
    trial: int
    seed: int
    md: float
    md_bound: float
    da_ss_equal: bool
    error_flag: bool
    elapsed_ms: float
    md_bound_unclamped: float = math.nan

    @property
    def point(self) -> GridPoint:
        return GridPoint(self.experiment_id, self.variant, self.n_snapshots, self.sigma2, self.delta)

    def csv_row(self) -> list:
        return [
            self.experiment_id, self.variant, str(self.n_snapshots), _num(self.sigma2), _num(self.delta),
            str(self.trial), str(self.seed), _num(self.md), _num(self.md_bound),
            str(int(self.da_ss_equal)), str(int(self.error_flag)), _num(self.elapsed_ms),
        ]


def _num(x: float) -> str:
    return f"{x:.12g}"


def trial_seed(base_seed: int, trial_index: int) -> int:
    """64-bit seed of one trial, a function of (base_seed, trial_index) only."""
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(trial_index),))
    return int(ss.generate_state(1, np.uint64)[0])


def grid_points(cfg: ExperimentConfig) -> list:
    deltas = cfg.delta_grid if cfg.delta_grid is not None else (math.nan,)
    return [
        GridPoint(cfg.experiment_id, v, int(n), float(s) ** 2, float(d))
        for v, d, s, n in itertools.product(cfg.variants, deltas, cfg.sigma_grid, cfg.l_grid)
    ]


def point_scene(cfg: ExperimentConfig, point: GridPoint) -> SourceScene:
    scene = cfg.scene.with_noise(point.sigma2)
    if not math.isnan(point.delta):
        scene = scene_for_delta(scene, point.delta, cfg.delta_anchor)
    return scene


def run_trial(cfg: ExperimentConfig, point: GridPoint, trial_index: int) -> TrialResult:
    """Simulate, estimate and score one trial; estimator failures become md = 0.5 rows."""
    geom = cfg.geometry
    scene = point_scene(cfg, point)
    ing = BoundIngredients.from_problem(geom, scene, point.n_snapshots)
    seed = trial_seed(cfg.base_seed, trial_index)
    t0 = time.perf_counter()
    y = sample_snapshots(geom, scene, point.n_snapshots, seed)
    r_da = da_toeplitz(da_lags(sample_covariance(y), geom))
    equal = da_ss_condition(r_da, scene.k)
    try:
        est = estimate_from_da(r_da, scene.k, point.variant)
        md = matched_distance(est.freqs, scene.freqs)
        failed = False
    except EspritError as exc:
        log.debug("trial %d at %s failed: %s", trial_index, point, exc)
        md, failed = FAILED_MD, True
    elapsed = (time.perf_counter() - t0) * 1e3 if cfg.record_timing else 0.0
    return TrialResult(
        experiment_id=point.experiment_id,
        variant=point.variant,
        n_snapshots=point.n_snapshots,
        sigma2=point.sigma2,
        delta=point.delta,
        trial=trial_index,
        seed=seed,
        md=md,
        md_bound=md_bound(ing),
        da_ss_equal=equal,
        error_flag=failed,
        elapsed_ms=elapsed,
        md_bound_unclamped=md_bound_unclamped(ing),
    )


def _run_point(args):
    cfg, idx, point = args
    return idx, [run_trial(cfg, point, t) for t in range(cfg.trials)]


def run_trials(cfg: ExperimentConfig) -> list:
    """All trial results, ordered by (grid point, trial) regardless of worker count."""
    cfg.validate()
    points = grid_points(cfg)
    jobs = [(cfg, i, p) for i, p in enumerate(points)]
    if cfg.workers == 1:
        chunks = [_run_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_run_point, jobs))
    chunks.sort(key=lambda c: c[0])
    return [r for _, rows in chunks for r in rows]


@dataclass(frozen=True)
class Aggregate:
    point: GridPoint
    trials: int
    mean_md: float
    median_md: float
    md_bound: float
    error_rate: float
    da_ss_equal_rate: float

    def csv_row(self) -> list:
        p = self.point
        return [
            p.experiment_id, p.variant, str(p.n_snapshots), _num(p.sigma2), _num(p.delta), str(self.trials),
            _num(self.mean_md), _num(self.median_md), _num(self.md_bound),
            _num(self.error_rate), _num(self.da_ss_equal_rate),
        ]


def aggregate(results: list) -> list:
    groups = {}
    for r in results:
        groups.setdefault(r.point, []).append(r)
    out = []
    for point, rows in groups.items():
        md = np.array([r.md for r in rows])
        out.append(
            Aggregate(
                point=point,
                trials=len(rows),
                mean_md=float(md.mean()),
                median_md=float(np.median(md)),
                md_bound=max(r.md_bound for r in rows),
                error_rate=float(np.mean([r.error_flag for r in rows])),
                da_ss_equal_rate=float(np.mean([r.da_ss_equal for r in rows])),
            )
        )
    return out


def write_csv(path, header, rows) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise ConfigError(f"cannot write output file {path}: {exc}") from exc


def aggregate_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".aggregate.csv")


def read_trials_csv(path) -> list:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def fit_loglog_slope(points) -> float:
    """Least-squares slope of log10(md) against log10(x)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("need at least 3 (x, md) points")
    if np.any(pts <= 0):
        raise ValueError("log-log fit needs positive x and md values")
    slope, _ = np.polyfit(np.log10(pts[:, 0]), np.log10(pts[:, 1]), 1)
    return float(slope)


def curve_key(p: GridPoint, plot_x: str):
    if plot_x == "L":
        return (p.variant, p.sigma2, p.delta)
    return (p.variant, p.n_snapshots, p.delta)


def plot_curves(aggs: list, plot_x: str = "L") -> dict:
    """Group aggregates into (x, mean md) curves keyed by the fixed parameters."""
    curves = {}
    for a in aggs:
        x = a.point.n_snapshots if plot_x == "L" else a.point.sigma2
        curves.setdefault(curve_key(a.point, plot_x), []).append((x, a.mean_md))
    return {k: sorted(v) for k, v in curves.items()}


def write_plot_data(aggs: list, out_dir, experiment_id: str, plot_x: str = "L") -> list:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for key, pts in plot_curves(aggs, plot_x).items():
        variant, fixed, delta = key
        fixed_name = f"sigma2_{fixed:g}" if plot_x == "L" else f"L_{fixed}"
        name = f"{experiment_id}_{variant}_{fixed_name}"
        if not math.isnan(delta):
            name += f"_delta_{delta:g}"
        path = out_dir / f"{name}.txt"
        path.write_text("".join(f"{_num(x)} {_num(y)}\n" for x, y in pts))
        written.append(path)
    return written


@dataclass
class SweepOutput:
    results: list
    aggregates: list
    csv_path: Path | None
    aggregate_path: Path | None


def run_sweep(cfg: ExperimentConfig, write: bool = True) -> SweepOutput:
    results = run_trials(cfg)
    aggs = aggregate(results)
    csv_path = agg_path = None
    if write:
        csv_path = cfg.resolved_output_path()
        write_csv(csv_path, CSV_COLUMNS, [r.csv_row() for r in results])
        agg_path = aggregate_path(csv_path)
        write_csv(agg_path, AGGREGATE_COLUMNS, [a.csv_row() for a in aggs])
    return SweepOutput(results, aggs, csv_path, agg_path)


def format_aggregate_table(aggs: list) -> str:
    lines = [f"{'variant':>7} {'L':>7} {'sigma2':>10} {'delta':>7} {'trials':>6} {'mean_md':>12} "
             f"{'median_md':>12} {'md_bound':>9} {'err':>6}"]
    for a in aggs:
        p = a.point
        lines.append(
            f"{p.variant:>7} {p.n_snapshots:>7d} {p.sigma2:>10.4g} {p.delta:>7.3g} {a.trials:>6d} "
            f"{a.mean_md:>12.4e} {a.median_md:>12.4e} {a.md_bound:>9.3g} {a.error_rate:>6.3f}"
        )
    return "\n".join(lines)
