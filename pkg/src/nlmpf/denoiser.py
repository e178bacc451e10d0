"""Scikit-learn style wrapper around the two-step Poisson filter.

The filter is stateless (nothing is learned from data), so ``fit`` only
validates parameters; ``transform`` denoises a single count image or a stack
of them.  Inheriting ``BaseEstimator`` provides ``get_params``/``set_params``
so the denoiser drops into pipelines and parameter searches.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .grid import as_count_image
from .pipeline import FilterConfig, denoise


class PoissonNLMDenoiser(TransformerMixin, BaseEstimator):
    """Two-step non-local means denoiser for Poisson count images.

    Parameters
    ----------
    search, patch : int
        Full widths of the search window and comparison patch (odd).
    d : int
        Radius of the post-smoothing window; 0 disables step 2.
    delta : float
        Count threshold under which step 2 re-smooths a pixel.
    mu : float
        Adaptive bandwidth factor; per-pixel H^2 is ``mu * sqrt(local mean)``.
    h_g : float
        Gaussian width for the gaussian patch kernel and the step-2 window.
    kernel : {"k0", "gaussian", "rect"}
        Patch-weighting kernel of the similarity distance.
    variant : {"plain", "split"}
        "split" uses the checkerboard pixel split (weights from odd-parity
        pixels, average over even-parity ones).
    n_jobs : int or None
        Worker threads for the per-pixel map; None uses all cores.  The
        result does not depend on this value.

    Examples
    --------
    >>> den = PoissonNLMDenoiser(search=13, patch=3, d=2, mu=0.6, h_g=1.0)
    >>> restored = den.fit_transform(counts)
    """

    def __init__(self, search=19, patch=13, d=3, delta=15.0, mu=1.0, h_g=2.5,
                 kernel="k0", variant="plain", n_jobs=1):
        self.search = search
        self.patch = patch
        self.d = d
        self.delta = delta
        self.mu = mu
        self.h_g = h_g
        self.kernel = kernel
        self.variant = variant
        self.n_jobs = n_jobs

    def _config(self) -> FilterConfig:
        return FilterConfig(search=self.search, patch=self.patch, d=self.d,
                            delta=self.delta, mu=self.mu, h_g=self.h_g,
                            kernel=self.kernel, variant=self.variant)

    def fit(self, X, y=None):
        """Validate parameters and the input shape; the filter learns nothing."""
        self._config()
        self._check_input(X)
        return self

    def transform(self, X) -> np.ndarray:
        """Denoise a count image (2D) or a stack of them (3D, first axis)."""
        cfg = self._config()
        X = self._check_input(X)
        if X.ndim == 2:
            return denoise(X, cfg, n_jobs=self.n_jobs)
        return np.stack([denoise(img, cfg, n_jobs=self.n_jobs) for img in X])

    @staticmethod
    def _check_input(X) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim == 2:
            as_count_image(X)
            return X
        if X.ndim == 3:
            for img in X:
                as_count_image(img)
            return X
        raise ValueError(f"expected a 2D image or 3D stack, got shape {X.shape}")
