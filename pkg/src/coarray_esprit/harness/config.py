"""Experiment configuration: dataclass, flat key-value file format and presets."""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from ..array_model import SlaGeometry, coarray, reference_mra, parse_geometry
from ..errors import ConfigError, EspritError, GeometryError
from ..signal_sim import REFERENCE_FREQS, SourceScene

OUTPUT_DIR_ENV = "COARRAY_ESPRIT_OUTPUT_DIR"
VARIANTS = ("DA", "SS", "both")
REFERENCE_DELTAS = (0.018, 0.036, 0.071, 0.143)


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "results"))


def half_decade_grid(lo_exp: float, hi_exp: float) -> tuple:
    """Integer snapshot counts 10^lo, 10^(lo+0.5), ..., 10^hi (rounded)."""
    n = int(round((hi_exp - lo_exp) * 2)) + 1
    return tuple(int(round(10**e)) for e in np.linspace(lo_exp, hi_exp, n))


@dataclass
class ExperimentConfig:
    experiment_id: str = "sweep"
    omega: tuple = reference_mra().omega
    n_virtual: int | None = None
    freqs: tuple = REFERENCE_FREQS
    powers: tuple | None = None
    variant: str = "DA"
    l_grid: tuple = half_decade_grid(2, 4)
    sigma_grid: tuple = (1.0,)
    delta_grid: tuple | None = None
    delta_anchor: float = 0.8
    trials: int = 200
    base_seed: int = 20240101
    output_path: str | None = None
    workers: int = 1
    record_timing: bool = True
    plot_x: str = "L"

    @property
    def geometry(self) -> SlaGeometry:
        return SlaGeometry(tuple(self.omega), self.n_virtual)

    @property
    def scene(self) -> SourceScene:
        """Template scene; the noise power of each grid point comes from ``sigma_grid``."""
        return SourceScene(tuple(self.freqs), None if self.powers is None else tuple(self.powers), 0.0)

    @property
    def variants(self) -> tuple:
        return ("DA", "SS") if self.variant == "both" else (self.variant,)

    def resolved_output_path(self) -> Path:
        if self.output_path:
            return Path(self.output_path)
        return default_output_dir() / f"{self.experiment_id}.csv"

    def validate(self) -> "ExperimentConfig":
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not self.l_grid or not self.sigma_grid:
            raise ConfigError("l_grid and sigma_grid must be non-empty")
        if self.delta_grid is not None and len(self.delta_grid) == 0:
            raise ConfigError("delta_grid, when given, must be non-empty")
        if any(int(n) < 1 for n in self.l_grid):
            raise ConfigError(f"snapshot counts must be >= 1: {self.l_grid}")
        if any(s < 0 for s in self.sigma_grid):
            raise ConfigError(f"noise std values must be >= 0: {self.sigma_grid}")
        if self.delta_grid is not None and any(not 0 < d < 1 for d in self.delta_grid):
            raise ConfigError(f"separations must lie in (0, 1): {self.delta_grid}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.plot_x not in ("L", "sigma2"):
            raise ConfigError(f"plot_x must be 'L' or 'sigma2', got {self.plot_x!r}")
        geom = self.geometry
        m = coarray(geom).m_contig
        try:
            k = self.scene.k
            for d in self.delta_grid or ():
                scene_for_delta(self.scene, d, self.delta_anchor)
        except EspritError as exc:
            raise ConfigError(f"invalid scene: {exc}") from exc
        if k > m - 1:
            raise ConfigError(f"K={k} sources exceed M-1={m - 1} for geometry {geom}")
        return self


def scene_for_delta(scene: SourceScene, delta: float, anchor: float = 0.8) -> SourceScene:
    """Replace the last source frequency with ``anchor + delta``."""
    freqs = list(scene.freqs)
    freqs[-1] = anchor + delta
    return SourceScene(tuple(freqs), scene.powers, scene.noise_power)


def _int_list(v):
    return tuple(int(float(x)) for x in _split(v))


def _float_list(v):
    return tuple(float(x) for x in _split(v))


def _split(v):
    return [tok.strip() for tok in str(v).split(",") if tok.strip()]


def _optional(parser):
    def parse(v):
        if str(v).strip().lower() in ("", "none"):
            return None
        return parser(v)

    return parse


def _bool(v):
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


PARSERS = {
    "experiment_id": str,
    "omega": lambda v: parse_geometry(str(v)).omega,
    "n_virtual": _optional(int),
    "freqs": _float_list,
    "powers": _optional(_float_list),
    "variant": str,
    "l_grid": _int_list,
    "sigma_grid": _float_list,
    "delta_grid": _optional(_float_list),
    "delta_anchor": float,
    "trials": int,
    "base_seed": int,
    "output_path": _optional(str),
    "workers": int,
    "record_timing": _bool,
    "plot_x": str,
}
assert set(PARSERS) == {f.name for f in fields(ExperimentConfig)}


def parse_value(key: str, value: str):
    if key not in PARSERS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return PARSERS[key](value)
    except GeometryError:
        raise
    except EspritError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, lists are comma-separated."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = parse_value(key, value)
    return out


def load_config(path, overrides: dict | None = None, base: ExperimentConfig | None = None) -> ExperimentConfig:
    values = {}
    if path is not None:
        try:
            values.update(parse_config_text(Path(path).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values.update(overrides or {})
    cfg = replace(base or ExperimentConfig(), **values)
    return cfg.validate()


def format_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, (tuple, list)):
            v = ",".join(str(x) for x in v)
        lines.append(f"{f.name} = {'none' if v is None else v}")
    return "\n".join(lines) + "\n"


def preset(name: str, full_range: bool = False) -> ExperimentConfig:
    """Desk-scale versions of the three reference experiments."""
    lo = 0 if full_range else 1
    if name == "exp1":
        return ExperimentConfig(
            experiment_id="exp1", sigma_grid=(0.0, 0.3, 1.0, 3.0), l_grid=half_decade_grid(lo, 4)
        )
    if name == "exp2":
        sigma2 = np.logspace(-2, 2, 9)
        return ExperimentConfig(
            experiment_id="exp2",
            l_grid=(100, 1000, 10000),
            sigma_grid=tuple(float(np.sqrt(s)) for s in sigma2),
            plot_x="sigma2",
        )
    if name == "exp3":
        return ExperimentConfig(
            experiment_id="exp3", sigma_grid=(1.0,), delta_grid=REFERENCE_DELTAS, l_grid=half_decade_grid(lo, 4)
        )
    raise ConfigError(f"unknown preset {name!r}")
