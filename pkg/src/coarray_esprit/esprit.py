"""ESPRIT on augmented coarray covariances (DA and SS variants)."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .array_model import coarray
from .covariance_pipeline import da_lags, da_toeplitz, sample_covariance, ss_covariance
from .errors import CapabilityError, DegenerateEigenvalueError, DimensionError, RankError
from .linalg_kernels import as_matrix, eig_general, hermitian_eig, pseudo_inverse, singular_values
from .signal_sim import SnapshotMatrix

MIN_MODULUS = 1e-12


class Variant(str, Enum):
    DA = "DA"
    SS = "SS"


@dataclass(frozen=True)
class FrequencyEstimate:
    freqs: np.ndarray
    esprit_eigs: np.ndarray
    subspace: np.ndarray = field(repr=False)


def signal_subspace(r_hat, k: int) -> np.ndarray:
    """Eigenvectors of the k algebraically largest eigenvalues of ``r_hat``."""
    r_hat = as_matrix(r_hat, "R_hat")
    if k < 1 or k >= r_hat.shape[0]:
        raise DimensionError(f"need 1 <= K < p, got K={k} with p={r_hat.shape[0]}")
    return hermitian_eig(r_hat).eigenvectors[:, :k]


def esprit_freqs(u) -> FrequencyEstimate:
    """Recover frequencies from the shift invariance of a signal subspace basis.

    Parameters
    ----------
    u : (p, K) array
        Isometric basis of the estimated signal subspace, ``p >= K + 1``.

    Raises
    ------
    RankError
        If the basis with its last row removed has rank below K.
    DegenerateEigenvalueError
        If some rotation eigenvalue has modulus below 1e-12, since its phase
        (hence the frequency) is undefined.
    """
    u = as_matrix(u, "U")
    p, k = u.shape
    if p < k + 1:
        raise DimensionError(f"ESPRIT needs p >= K+1, got p={p}, K={k}")
    u1, u2 = u[:-1], u[1:]
    s = singular_values(u1)
    if s[-1] <= max(u1.shape) * np.finfo(float).eps * s[0]:
        raise RankError(f"shifted subspace basis has rank below K={k}")
    z = eig_general(pseudo_inverse(u1) @ u2)
    if np.any(np.abs(z) < MIN_MODULUS):
        raise DegenerateEigenvalueError(f"ESPRIT eigenvalue with modulus {np.abs(z).min():.3g}; frequency undefined")
    f = np.mod(np.angle(z / np.abs(z)) / (2 * np.pi), 1.0)
    f[f >= 1.0] = 0.0
    return FrequencyEstimate(freqs=f, esprit_eigs=z, subspace=u)


def da_ss_condition(r_da, k: int) -> bool:
    """True when lambda_K(R_da) > |lambda_M(R_da)|, i.e. DA and SS pick the same subspace."""
    lam = hermitian_eig(r_da).eigenvalues
    return bool(lam[k - 1] > abs(lam[-1]))


def estimate_from_da(r_da, k: int, variant=Variant.DA) -> FrequencyEstimate:
    """Run the chosen variant starting from an (estimated or exact) DA covariance."""
    variant = Variant(variant)
    m = r_da.shape[0]
    if k > m - 1:
        raise CapabilityError(f"K={k} sources exceed the capability K <= M-1 = {m - 1}")
    r = ss_covariance(r_da, m) if variant is Variant.SS else r_da
    return esprit_freqs(signal_subspace(r, k))


def estimate(y: SnapshotMatrix, k: int, variant=Variant.DA) -> FrequencyEstimate:
    """Full DA-/SS-ESPRIT pipeline from raw snapshots."""
    m = coarray(y.geometry).m_contig
    if k > m - 1:
        raise CapabilityError(f"K={k} sources exceed the capability K <= M-1 = {m - 1} of array {y.geometry}")
    r_da = da_toeplitz(da_lags(sample_covariance(y), y.geometry, m))
    return estimate_from_da(r_da, k, variant)
