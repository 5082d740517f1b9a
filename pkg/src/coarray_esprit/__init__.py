"""DA-ESPRIT and SS-ESPRIT direction finding with sparse linear arrays."""

from .analysis import (
    BoundIngredients,
    bound_report,
    matched_distance,
    md_bound,
    min_separation,
    subspace_error_bound,
    wraparound_dist,
)
from .array_model import SlaGeometry, coarray, doa_to_freq, freq_to_doa, reference_mra, steering_matrix, ula
from .covariance_pipeline import da_lags, da_toeplitz, sample_covariance, ss_covariance
from .esprit import Variant, estimate, estimate_from_da, esprit_freqs, signal_subspace
from .signal_sim import SourceScene, reference_scene, sample_snapshots, true_covariance_ula

__version__ = "0.1.0"
