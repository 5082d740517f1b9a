"""Sparse linear array geometry, coarray, steering matrices and DOA mapping.

Positions are integers in half-wavelength units inside a virtual
N-element ULA. Spatial frequencies live on the unit circle [0, 1).
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GeometryError, PreconditionError


@dataclass(frozen=True)
class SlaGeometry:
    omega: tuple
    n_virtual: int | None = None

    def __post_init__(self):
        omega = tuple(int(x) for x in self.omega)
        if len(omega) < 2:
            raise GeometryError("a sparse array needs at least 2 sensors")
        if omega[0] < 0:
            raise GeometryError(f"sensor positions must be non-negative, got {omega[0]}")
        if any(b <= a for a, b in zip(omega, omega[1:])):
            raise GeometryError(f"sensor positions must be strictly increasing: {omega}")
        n = omega[-1] + 1 if self.n_virtual is None else int(self.n_virtual)
        if n < omega[-1] + 1:
            raise GeometryError(f"virtual ULA size {n} cannot hold sensor at {omega[-1]}")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "n_virtual", n)

    @property
    def n_sensors(self) -> int:
        return len(self.omega)

    @property
    def positions(self) -> np.ndarray:
        return np.asarray(self.omega, dtype=int)

    def __str__(self):
        return ",".join(str(x) for x in self.omega)


@dataclass(frozen=True)
class Coarray:
    differences: tuple
    m_contig: int


def parse_geometry(text: str) -> SlaGeometry:
    """Parse the comma-separated form used on the command line, e.g. ``0,1,6,9,11,13``."""
    try:
        omega = [int(tok) for tok in text.replace(" ", "").split(",") if tok != ""]
    except ValueError as exc:
        raise GeometryError(f"cannot parse geometry {text!r}: expected comma-separated integers") from exc
    return SlaGeometry(tuple(omega))


def reference_mra() -> SlaGeometry:
    """Six-sensor minimum redundancy array with contiguous coarray 0..13."""
    return SlaGeometry((0, 1, 6, 9, 11, 13))


def ula(n: int) -> SlaGeometry:
    return SlaGeometry(tuple(range(n)))


def nested(n1: int, n2: int) -> SlaGeometry:
    """Two-level nested array: inner ULA 0..n1-1, outer positions (n1+1)*k - 1 for k = 1..n2."""
    inner = set(range(n1))
    outer = {(n1 + 1) * k - 1 for k in range(1, n2 + 1)}
    return SlaGeometry(tuple(sorted(inner | outer)))


def coprime(m: int, n: int) -> SlaGeometry:
    """Coprime pair: n*i for i < m together with m*j for j < 2n."""
    if np.gcd(m, n) != 1:
        raise GeometryError(f"coprime array needs gcd(m, n) = 1, got m={m}, n={n}")
    pos = {n * i for i in range(m)} | {m * j for j in range(2 * n)}
    return SlaGeometry(tuple(sorted(pos)))


def coarray(geom: SlaGeometry) -> Coarray:
    pos = geom.positions
    diffs = pos[:, None] - pos[None, :]
    diff_set = np.unique(diffs[diffs >= 0])
    present = set(int(d) for d in diff_set)
    m = 0
    while m in present:
        m += 1
    return Coarray(differences=tuple(int(d) for d in diff_set), m_contig=m)


def canonical_freqs(freqs) -> np.ndarray:
    """Reduce frequencies mod 1 into [0, 1)."""
    f = np.mod(np.atleast_1d(np.asarray(freqs, dtype=float)), 1.0)
    f[f >= 1.0] = 0.0  # tiny negatives round up to exactly 1.0
    return f


def steering_matrix(indices: Sequence[int], freqs) -> np.ndarray:
    """Vandermonde-type matrix with entries ``exp(i 2 pi n_j f_k)``."""
    idx = np.asarray(indices, dtype=int)
    if idx.ndim != 1 or np.any(idx < 0):
        raise PreconditionError("steering indices must be a 1-D non-negative integer vector")
    f = canonical_freqs(freqs)
    if np.unique(f).size != f.size:
        raise PreconditionError(f"duplicate frequencies after mod-1 reduction: {f.tolist()}")
    return np.exp(2j * np.pi * np.outer(idx, f))


def doa_to_freq(theta_deg: float) -> float:
    if not -90.0 <= theta_deg < 90.0:
        raise PreconditionError(f"DOA must lie in [-90, 90) degrees, got {theta_deg}")
    return float(canonical_freqs(0.5 * np.sin(np.deg2rad(theta_deg)))[0])


def freq_to_doa(f: float) -> float:
    """Inverse of :func:`doa_to_freq`.

    ``f = 0.5`` sits on the boundary and maps to -90 degrees.
    """
    if not 0.0 <= f < 1.0:
        raise PreconditionError(f"frequency must lie in [0, 1), got {f}")
    fp = f if f < 0.5 else f - 1.0
    return float(np.rad2deg(np.arcsin(2.0 * fp)))
