"""Non-local means filtering for Poisson-noise images.

Photon-limited images carry signal-dependent noise: each pixel is a Poisson
count whose variance equals the underlying intensity.  This package filters
such images with patch-based exponentially weighted averages whose similarity
statistic subtracts the Poisson noise floor, plus a Gaussian post-smoothing
pass for very low-count regions.  It also ships the theoretical companions:
an oracle estimator driven by the clean image, a pixel-split estimator whose
weights are independent of the averaged samples, quality metrics, and a
Monte-Carlo harness that checks the predicted convergence rates.
"""

from .denoiser import PoissonNLMDenoiser
from .estimators import (
    Bandwidth,
    adaptive_estimate,
    classic_nlm,
    exp_weights,
    oracle_estimate,
    split_adaptive_estimate,
)
from .grid import (
    PixelSplit,
    WindowSpec,
    as_count_image,
    as_intensity_image,
    checkerboard_split,
    symmetrize_pad,
    window_pixels,
)
from .io import ParseError, load_run_config, read_image, write_image
from .kernels import KernelChoice, kernel_weights
from .metrics import mse, nmise, oracle_upper_bound, psnr
from .noise import derive_seed, residual, sample_poisson
from .phantoms import PHANTOMS, phantom, recommended_config
from .pipeline import (
    FilterConfig,
    MetricsReport,
    classic_nlm_image,
    denoise,
    nlmpf_step1,
    nlmpf_step2,
    oracle_image,
)
from .similarity import (
    estimated_similarity,
    local_mean,
    oracle_similarity,
    split_estimated_similarity,
    split_local_mean,
)
from .theory import (
    HolderSpec,
    RateResult,
    c0,
    holder_phantom,
    optimal_h,
    rate_experiment,
    similarity_concentration_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "Bandwidth",
    "FilterConfig",
    "HolderSpec",
    "KernelChoice",
    "MetricsReport",
    "ParseError",
    "PHANTOMS",
    "PixelSplit",
    "PoissonNLMDenoiser",
    "RateResult",
    "WindowSpec",
    "adaptive_estimate",
    "as_count_image",
    "as_intensity_image",
    "c0",
    "checkerboard_split",
    "classic_nlm",
    "classic_nlm_image",
    "denoise",
    "derive_seed",
    "estimated_similarity",
    "exp_weights",
    "holder_phantom",
    "kernel_weights",
    "load_run_config",
    "local_mean",
    "mse",
    "nlmpf_step1",
    "nlmpf_step2",
    "nmise",
    "optimal_h",
    "oracle_estimate",
    "oracle_image",
    "oracle_similarity",
    "oracle_upper_bound",
    "phantom",
    "psnr",
    "rate_experiment",
    "read_image",
    "recommended_config",
    "residual",
    "sample_poisson",
    "similarity_concentration_experiment",
    "split_adaptive_estimate",
    "split_estimated_similarity",
    "split_local_mean",
    "symmetrize_pad",
    "window_pixels",
    "write_image",
]
