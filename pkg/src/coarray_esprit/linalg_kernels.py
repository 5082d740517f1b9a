"""Dense complex linear-algebra primitives.

Thin contracts over LAPACK (through numpy): every routine checks shapes,
rejects non-finite input and returns results in a deterministic form so
that golden tests are stable across runs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalError, PreconditionError

TOL_EIG = 1e-10
TOL_HERM = 1e-8

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class HermitianEig:
    """Eigenvalues sorted descending; column j of ``eigenvectors`` pairs with ``eigenvalues[j]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a, name="matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name} has non-finite entries")
    return arr


def _require_square(a, name):
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")


def normalize_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is real positive."""
    v = np.array(vectors, dtype=complex, copy=True)
    idx = np.argmax(np.abs(v), axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    mags = np.abs(pivots)
    phases = np.ones_like(pivots)
    nz = mags > 0
    phases[nz] = pivots[nz] / mags[nz]
    v /= phases[None, :]
    v[idx, np.arange(v.shape[1])] = np.abs(v[idx, np.arange(v.shape[1])])
    return v


def hermitian_eig(h, tol_herm: float = TOL_HERM) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.

    The input is symmetrized as ``(H + H^H)/2`` before factoring. Ties keep
    LAPACK's ascending order reversed stably, and eigenvectors are
    phase-normalized (see :func:`normalize_phase`).
    """
    h = as_matrix(h, "H")
    _require_square(h, "H")
    scale = spectral_norm(h) if h.size > 1 else abs(h[0, 0])
    if np.linalg.norm(h - h.conj().T, 2) > tol_herm * max(scale, np.finfo(float).tiny):
        raise PreconditionError("H is not Hermitian within tolerance")
    hs = 0.5 * (h + h.conj().T)
    try:
        w, v = np.linalg.eigh(hs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver did not converge for {h.shape[0]}x{h.shape[0]} matrix") from exc
    order = np.argsort(-w, kind="stable")
    return HermitianEig(eigenvalues=w[order], eigenvectors=normalize_phase(v[:, order]))


def eig_general(m) -> np.ndarray:
    """Eigenvalues of a small general square matrix (Hessenberg + shifted QR)."""
    m = as_matrix(m, "M")
    _require_square(m, "M")
    if m.shape[0] > 64:
        raise DimensionError(f"eig_general is sized for K <= 64, got {m.shape[0]}")
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration did not converge for {m.shape[0]}x{m.shape[0]} matrix") from exc


def pseudo_inverse(a, rank_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse by truncated SVD.

    Singular values ``<= rank_tol`` are dropped. The default threshold is
    ``max(m, n) * eps * sigma_1(A)``.
    """
    a = as_matrix(a, "A")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for {a.shape[0]}x{a.shape[1]} matrix") from exc
    if rank_tol is None:
        rank_tol = max(a.shape) * _EPS * (s[0] if s.size else 0.0)
    keep = s > rank_tol
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (vh.conj().T * inv_s[None, :]) @ u.conj().T


def singular_values(a) -> np.ndarray:
    a = as_matrix(a, "A")
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge for {a.shape[0]}x{a.shape[1]} matrix") from exc


def spectral_norm(a) -> float:
    return float(singular_values(a)[0])


def is_isometry(u, tol: float = TOL_EIG) -> bool:
    u = np.asarray(u, dtype=complex)
    r = u.shape[1]
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(r), 2) <= tol * max(1, r))


def orthonormal_basis(a) -> np.ndarray:
    """Orthonormal basis of range(A) for full-column-rank A."""
    q, _ = np.linalg.qr(as_matrix(a, "A"))
    return q


def subspace_dist(u, v, tol: float = TOL_EIG) -> float:
    """Sine of the largest canonical angle between range(U) and range(V).

    Evaluated as ``||(I - V V^H) U||``, which equals
    ``max_j sin(arccos sigma_j(U^H V))`` for isometric U, V of equal shape
    but keeps full relative accuracy for nearly identical subspaces.
    """
    u = as_matrix(u, "U")
    v = as_matrix(v, "V")
    if u.shape != v.shape:
        raise DimensionError(f"U and V must have equal shapes, got {u.shape} and {v.shape}")
    if not (is_isometry(u, tol) and is_isometry(v, tol)):
        raise PreconditionError("subspace_dist requires isometric U and V (U^H U = I)")
    if u.shape[1] == u.shape[0]:
        return 0.0
    # symmetrize so dist(U, V) == dist(V, U) bit-for-bit up to rounding
    d_uv = np.linalg.norm(u - v @ (v.conj().T @ u), 2)
    d_vu = np.linalg.norm(v - u @ (u.conj().T @ v), 2)
    return float(min(1.0, 0.5 * (d_uv + d_vu)))
