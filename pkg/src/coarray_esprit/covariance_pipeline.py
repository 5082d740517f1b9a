"""Direct augmentation and spatial smoothing of sparse-array covariances.

The chain is ``R_omega_hat -> lags -> R_da_hat -> R_ss_hat``. No loading or
PSD projection is applied to the DA estimate; it may be indefinite.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .array_model import SlaGeometry, coarray
from .errors import DimensionError, GeometryError
from .signal_sim import SnapshotMatrix


@dataclass(frozen=True)
class LagVector:
    """Averaged lags r_0..r_{M-1} and the number of sensor pairs behind each."""

    lags: np.ndarray
    counts: np.ndarray

    @property
    def m(self) -> int:
        return self.lags.size


@dataclass(frozen=True)
class CovarianceSet:
    r_omega_hat: np.ndarray = field(repr=False)
    r_da_hat: np.ndarray = field(repr=False)
    r_ss_hat: np.ndarray = field(repr=False)
    m: int


def sample_covariance(y) -> np.ndarray:
    """``Y Y^H / L`` for a snapshot matrix (or a bare N_S x L array)."""
    data = y.data if isinstance(y, SnapshotMatrix) else np.asarray(y, dtype=complex)
    if data.ndim == 1:
        data = data[:, None]
    n_snap = data.shape[1]
    if n_snap < 1:
        raise DimensionError("need at least one snapshot")
    r = data @ data.conj().T / n_snap
    return 0.5 * (r + r.conj().T)


def lag_pairs(geom: SlaGeometry, m: int) -> list:
    """For each lag mu < m, the ordered index pairs (j, l) with Omega_j - Omega_l = mu."""
    pos = geom.positions
    out = [[] for _ in range(m)]
    for j, pj in enumerate(pos):
        for l, pl in enumerate(pos):
            d = pj - pl
            if 0 <= d < m:
                out[d].append((j, l))
    return out


def da_lags(r_hat, geom: SlaGeometry, m: int | None = None) -> LagVector:
    """Average the sample-covariance entries that share each lag 0..m-1."""
    r_hat = np.asarray(r_hat, dtype=complex)
    n_s = geom.n_sensors
    if r_hat.shape != (n_s, n_s):
        raise DimensionError(f"R_hat has shape {r_hat.shape}, expected ({n_s}, {n_s})")
    if m is None:
        m = coarray(geom).m_contig
    pairs = lag_pairs(geom, m)
    lags = np.empty(m, dtype=complex)
    counts = np.empty(m, dtype=int)
    for mu, pl in enumerate(pairs):
        if not pl:
            raise GeometryError(
                f"lag {mu} is missing from the coarray of {geom}; contiguous aperture is {coarray(geom).m_contig}"
            )
        rows, cols = zip(*pl)
        lags[mu] = r_hat[list(rows), list(cols)].mean()
        counts[mu] = len(pl)
    lags[0] = lags[0].real
    return LagVector(lags=lags, counts=counts)


def da_toeplitz(lags: LagVector) -> np.ndarray:
    """Hermitian Toeplitz matrix with r_{j-l} below and conj(r_{l-j}) above the diagonal."""
    r = np.asarray(lags.lags if isinstance(lags, LagVector) else lags, dtype=complex)
    m = r.size
    d = np.arange(m)[:, None] - np.arange(m)[None, :]
    return np.where(d >= 0, r[np.abs(d)], np.conj(r[np.abs(d)]))


def ss_covariance(r_da, m: int | None = None) -> np.ndarray:
    """Spatially smoothed covariance ``R_da^2 / M``."""
    r_da = np.asarray(r_da, dtype=complex)
    if r_da.ndim != 2 or r_da.shape[0] != r_da.shape[1]:
        raise DimensionError(f"R_da must be square, got {r_da.shape}")
    if m is None:
        m = r_da.shape[0]
    r = r_da @ r_da / m
    return 0.5 * (r + r.conj().T)


def covariance_set(y: SnapshotMatrix, m: int | None = None) -> CovarianceSet:
    r_omega = sample_covariance(y)
    lv = da_lags(r_omega, y.geometry, m)
    r_da = da_toeplitz(lv)
    return CovarianceSet(r_omega_hat=r_omega, r_da_hat=r_da, r_ss_hat=ss_covariance(r_da), m=lv.m)


def format_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


def dump_matrix(a) -> str:
    return "\n".join(" ".join(format_complex(z) for z in row) for row in np.atleast_2d(a))


def dump_covariance_set(cs: CovarianceSet, path=None) -> str:
    """Text dump: a ``# name rows cols`` header line, then one row per line."""
    blocks = []
    for name in ("r_omega_hat", "r_da_hat", "r_ss_hat"):
        a = getattr(cs, name)
        blocks.append(f"# {name} {a.shape[0]} {a.shape[1]}\n{dump_matrix(a)}")
    text = "\n".join(blocks) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_covariance_dump(text: str) -> dict:
    out, name, rows = {}, None, []
    for line in text.splitlines():
        if line.startswith("#"):
            if name is not None:
                out[name] = np.array(rows, dtype=complex)
            name, rows = line[1:].split()[0], []
        elif line.strip():
            rows.append([complex(tok) for tok in line.split()])
    if name is not None:
        out[name] = np.array(rows, dtype=complex)
    return out
