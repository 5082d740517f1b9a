"""Synthetic snapshots for uncorrelated Gaussian sources and exact covariances."""

from dataclasses import dataclass, field

import numpy as np

from .array_model import SlaGeometry, canonical_freqs, steering_matrix
from .errors import DimensionError, PreconditionError

REFERENCE_FREQS = (0.1, 0.25, 0.35, 0.45, 0.6, 0.7, 0.8, 0.9)

# sub-stream tags for the source and noise draws of one trial
STREAM_SOURCE = 0
STREAM_NOISE = 1


@dataclass(frozen=True)
class SourceScene:
    freqs: tuple
    powers: tuple | None = None
    noise_power: float = 0.0

    def __post_init__(self):
        f = canonical_freqs(self.freqs)
        if f.size < 1:
            raise PreconditionError("a scene needs at least one source")
        if np.unique(f).size != f.size:
            raise PreconditionError(f"source frequencies must be distinct mod 1: {f.tolist()}")
        p = np.ones(f.size) if self.powers is None else np.asarray(self.powers, dtype=float)
        if p.shape != f.shape:
            raise DimensionError(f"{f.size} frequencies but {p.size} powers")
        if np.any(p <= 0):
            raise PreconditionError("source powers must be positive")
        if self.noise_power < 0:
            raise PreconditionError("noise power must be non-negative")
        object.__setattr__(self, "freqs", tuple(float(x) for x in f))
        object.__setattr__(self, "powers", tuple(float(x) for x in p))
        object.__setattr__(self, "noise_power", float(self.noise_power))

    @property
    def k(self) -> int:
        return len(self.freqs)

    @property
    def p_max(self) -> float:
        return max(self.powers)

    @property
    def p_min(self) -> float:
        return min(self.powers)

    def with_noise(self, noise_power: float) -> "SourceScene":
        return SourceScene(self.freqs, self.powers, noise_power)


def reference_scene(noise_power: float = 1.0) -> SourceScene:
    """Eight unit-power sources at the reference frequency set."""
    return SourceScene(REFERENCE_FREQS, None, noise_power)


@dataclass(frozen=True)
class SnapshotMatrix:
    data: np.ndarray = field(repr=False)
    geometry: SlaGeometry
    seed: int

    def __post_init__(self):
        if self.data.ndim != 2 or self.data.shape[0] != self.geometry.n_sensors:
            raise DimensionError(
                f"snapshot matrix has shape {self.data.shape}, expected ({self.geometry.n_sensors}, L)"
            )
        if self.data.shape[1] < 1:
            raise DimensionError("need at least one snapshot")

    @property
    def n_snapshots(self) -> int:
        return self.data.shape[1]


def _generator(seed, stream):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def complex_gaussian_matrix(rows: int, cols: int, seed: int, stream: int = 0) -> np.ndarray:
    """i.i.d. CN(0, 1) entries: real and imaginary parts independent N(0, 1/2)."""
    if rows < 1 or cols < 1:
        raise DimensionError(f"dimensions must be positive, got {rows}x{cols}")
    rng = _generator(seed, stream)
    z = rng.standard_normal((2, rows, cols))
    return (z[0] + 1j * z[1]) * np.sqrt(0.5)


def sample_snapshots(geom: SlaGeometry, scene: SourceScene, n_snapshots: int, seed: int) -> SnapshotMatrix:
    """Draw ``Y = A_Omega S + E`` with independent source and noise streams."""
    if n_snapshots < 1:
        raise DimensionError("need at least one snapshot")
    a = steering_matrix(geom.omega, scene.freqs)
    s = complex_gaussian_matrix(scene.k, n_snapshots, seed, STREAM_SOURCE)
    s *= np.sqrt(np.asarray(scene.powers))[:, None]
    y = a @ s
    if scene.noise_power > 0:
        e = complex_gaussian_matrix(geom.n_sensors, n_snapshots, seed, STREAM_NOISE)
        y += np.sqrt(scene.noise_power) * e
    return SnapshotMatrix(data=y, geometry=geom, seed=int(seed))


def true_lags(scene: SourceScene, m: int) -> np.ndarray:
    """Covariance lags r_0..r_{m-1}; r_0 carries the noise power."""
    j = np.arange(m)
    r = np.exp(2j * np.pi * np.outer(j, scene.freqs)) @ np.asarray(scene.powers)
    r[0] = sum(scene.powers) + scene.noise_power
    return r


def true_covariance_ula(scene: SourceScene, m: int) -> np.ndarray:
    """m x m Hermitian Toeplitz covariance of the ULA {0..m-1}."""
    if m < 1:
        raise DimensionError("m must be positive")
    r = true_lags(scene, m)
    d = np.arange(m)[:, None] - np.arange(m)[None, :]
    out = np.where(d >= 0, r[np.abs(d)], np.conj(r[np.abs(d)]))
    return out


def restrict_covariance(r, geom) -> np.ndarray:
    """Principal submatrix of ``r`` on the sensor positions of ``geom``.

    ``geom`` may also be a plain index sequence (e.g. a single position).
    """
    r = np.asarray(r)
    pos = geom.positions if isinstance(geom, SlaGeometry) else np.asarray(geom, dtype=int)
    if r.ndim != 2 or r.shape[0] != r.shape[1] or r.shape[0] < pos.max() + 1 or pos.min() < 0:
        raise DimensionError(f"covariance of shape {r.shape} cannot be restricted to positions {pos.tolist()}")
    return r[np.ix_(pos, pos)]


def true_covariance(geom: SlaGeometry, scene: SourceScene) -> np.ndarray:
    """Exact array covariance R_Omega."""
    return restrict_covariance(true_covariance_ula(scene, geom.omega[-1] + 1), geom)
