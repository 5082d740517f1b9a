"""Error metrics and nonasymptotic error bounds for DA-/SS-ESPRIT.

Bound constants grow like 2^(4K); prefactors are assembled in log space and
exponentiated once so that moderate K does not overflow intermediate
products.
"""

import functools
import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .array_model import SlaGeometry, coarray, steering_matrix
from .errors import DimensionError, PreconditionError
from .linalg_kernels import singular_values, spectral_norm
from .signal_sim import SourceScene

BRUTE_FORCE_MAX_K = 9


def wraparound_dist(f: float, g: float) -> float:
    d = abs(f - g) % 1.0
    return min(d, 1.0 - d)


def _wrap_matrix(a, b):
    d = np.abs(a[:, None] - b[None, :]) % 1.0
    return np.minimum(d, 1.0 - d)


def matched_distance_bruteforce(t_hat, t) -> float:
    """Bottleneck matching by enumerating all K! permutations."""
    t_hat, t = _check_sets(t_hat, t)
    d = _wrap_matrix(t_hat, t)
    perms = _permutations(t.size)
    return float(d[perms, np.arange(t.size)].max(axis=1).min())


@functools.lru_cache(maxsize=None)
def _permutations(k: int) -> np.ndarray:
    """All k! permutations as rows of an index table."""
    table = np.array(list(itertools.permutations(range(k))), dtype=np.intp)
    table.setflags(write=False)
    return table


def matched_distance_cyclic(t_hat, t) -> float:
    """Bottleneck matching over the K cyclic alignments of the two sorted sets.

    On the circle an optimal bottleneck matching can always be taken to
    preserve cyclic order, so K candidate pairings suffice.
    """
    t_hat, t = _check_sets(t_hat, t)
    a = np.sort(t_hat)
    b = np.sort(t)
    d = _wrap_matrix(a, b)
    k = b.size
    cols = np.arange(k)
    return float(min(d[(cols + s) % k, cols].max() for s in range(k)))


def matched_distance(t_hat, t) -> float:
    """Minimum over permutations of the maximum wrap-around frequency error."""
    t_hat, t = _check_sets(t_hat, t)
    if t.size <= BRUTE_FORCE_MAX_K:
        return matched_distance_bruteforce(t_hat, t)
    return matched_distance_cyclic(t_hat, t)


def _check_sets(t_hat, t):
    a = np.mod(np.atleast_1d(np.asarray(t_hat, dtype=float)), 1.0)
    b = np.mod(np.atleast_1d(np.asarray(t, dtype=float)), 1.0)
    if a.size != b.size:
        raise DimensionError(f"frequency sets differ in size: {a.size} vs {b.size}")
    if a.size == 0:
        raise DimensionError("frequency sets are empty")
    return a, b


def min_separation(t) -> float:
    t = np.mod(np.atleast_1d(np.asarray(t, dtype=float)), 1.0)
    if t.size < 2:
        raise DimensionError("minimum separation needs at least two frequencies")
    d = _wrap_matrix(t, t)
    np.fill_diagonal(d, np.inf)
    return float(d.min())


@dataclass(frozen=True)
class BoundIngredients:
    """Every quantity that enters the error bounds."""

    sigma_k_am: float
    norm_a_omega: float
    p_min: float
    p_max: float
    n_s: int
    m: int
    k: int
    n_snapshots: int
    noise_power: float

    @classmethod
    def from_problem(cls, geom: SlaGeometry, scene: SourceScene, n_snapshots: int) -> "BoundIngredients":
        m = coarray(geom).m_contig
        a_m = steering_matrix(range(m), scene.freqs)
        a_omega = steering_matrix(geom.omega, scene.freqs)
        s = singular_values(a_m)
        sigma_k = float(s[scene.k - 1]) if scene.k <= s.size else 0.0
        return cls(
            sigma_k_am=sigma_k,
            norm_a_omega=spectral_norm(a_omega),
            p_min=scene.p_min,
            p_max=scene.p_max,
            n_s=geom.n_sensors,
            m=m,
            k=scene.k,
            n_snapshots=int(n_snapshots),
            noise_power=scene.noise_power,
        )

    @property
    def signal_level(self) -> float:
        """p_max * ||A_Omega||^2."""
        return self.p_max * self.norm_a_omega**2


def _check_aperture(ing: BoundIngredients):
    if ing.m < ing.k + 1:
        raise PreconditionError(f"bound requires M >= K+1, got M={ing.m}, K={ing.k}")
    if ing.sigma_k_am <= 0 or ing.p_min <= 0:
        raise PreconditionError("bound requires sigma_K(A_M) > 0 and p_min > 0")


def _exp_or_inf(log_value: float) -> float:
    try:
        return math.exp(log_value)
    except OverflowError:
        return math.inf


def subspace_error_bound(ing: BoundIngredients) -> float:
    """Davis-Kahan based bound on dist(U_hat, U) for the DA signal subspace."""
    _check_aperture(ing)
    if ing.n_snapshots < ing.n_s:
        raise PreconditionError(f"bound requires L >= N_S, got L={ing.n_snapshots}, N_S={ing.n_s}")
    return (
        16 * ing.n_s * math.sqrt(ing.m) / (ing.p_min * ing.sigma_k_am**2)
        * (ing.signal_level + ing.noise_power) / math.sqrt(ing.n_snapshots)
    )


def md_bound_unclamped(ing: BoundIngredients) -> float:
    _check_aperture(ing)
    k = ing.k
    log_val = (
        (2 * k + 9) * math.log(2)
        + math.log(ing.n_s * ing.m)
        + 1.5 * math.log(k)
        - math.log(ing.p_min)
        - 3 * math.log(ing.sigma_k_am)
        + math.log(max(ing.noise_power, ing.signal_level))
        - 0.5 * math.log(ing.n_snapshots)
    )
    return _exp_or_inf(log_val)


def md_bound(ing: BoundIngredients) -> float:
    """Matched-distance bound for DA- and SS-ESPRIT, clamped to 1."""
    return min(1.0, md_bound_unclamped(ing))


def resolution_snapshots(ing: BoundIngredients, delta: float) -> float:
    """Snapshot count above which resolution ``delta`` is guaranteed.

    ``ing.n_snapshots`` is ignored.
    """
    if not 0 < delta <= 0.5:
        raise PreconditionError(f"separation must lie in (0, 0.5], got {delta}")
    _check_aperture(ing)
    k = ing.k
    log_val = (
        (4 * k + 20) * math.log(2)
        + 2 * math.log(ing.n_s * ing.m)
        + 3 * math.log(k)
        - 2 * math.log(ing.p_min)
        - 6 * math.log(ing.sigma_k_am)
        - 2 * math.log(delta)
        + 2 * math.log(max(ing.noise_power, ing.signal_level))
    )
    return _exp_or_inf(log_val)


def gauss_cov_bound(p: int, n: int, u: float, sigma_norm: float) -> float:
    """Deviation bound for a Gaussian sample covariance.

    Holds with probability at least ``1 - 2 exp(-n u^2 / 2)``.
    """
    if n < 1 or u <= 0:
        raise PreconditionError(f"need n >= 1 and u > 0, got n={n}, u={u}")
    x = math.sqrt(p / n) + u
    return (2 * x + x * x) * sigma_norm


def gauss_cov_failure_prob(n: int, u: float) -> float:
    return 2 * math.exp(-n * u * u / 2)


def sample_cov_bound(ing: BoundIngredients) -> float:
    """``8 sqrt(N_S / L) (p_max ||A_Omega||^2 + sigma^2)``, valid for L >= N_S."""
    return 8 * math.sqrt(ing.n_s / ing.n_snapshots) * (ing.signal_level + ing.noise_power)


def esprit_md_from_dist(ing: BoundIngredients, dist: float) -> float:
    """Matched distance implied by a subspace error ``dist`` for ESPRIT on an M-element ULA."""
    k = ing.k
    return 2 ** (2 * k + 4) * math.sqrt(k**3 * ing.m) / ing.sigma_k_am * dist


def probability_floor(n_s: int) -> float:
    return 1 - 2 * math.exp(-n_s / 2)


@dataclass(frozen=True)
class BoundReport:
    subspace_bound: float
    md_bound: float
    md_bound_unclamped: float
    probability_floor: float
    ingredients: BoundIngredients

    def to_text(self) -> str:
        """Flat ``key = value`` block."""
        rows = {
            "subspace_bound": self.subspace_bound,
            "md_bound": self.md_bound,
            "md_bound_unclamped": self.md_bound_unclamped,
            "probability_floor": self.probability_floor,
        }
        rows.update(asdict(self.ingredients))
        return "\n".join(f"{key} = {_fmt(val)}" for key, val in rows.items()) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def bound_report(geom: SlaGeometry, scene: SourceScene, n_snapshots: int) -> BoundReport:
    ing = BoundIngredients.from_problem(geom, scene, n_snapshots)
    try:
        sub = subspace_error_bound(ing)
    except PreconditionError:
        sub = math.nan
    return BoundReport(
        subspace_bound=sub,
        md_bound=md_bound(ing),
        md_bound_unclamped=md_bound_unclamped(ing),
        probability_floor=probability_floor(ing.n_s),
        ingredients=ing,
    )
