"""Convergence-rate constants and the Monte-Carlo experiment harness.

For intensities satisfying the local Hoelder condition
``|f(x) - f(y)| <= L * ||x - y||_inf**beta`` with sup intensity ``Gamma``,
the oracle estimator run with search half-width

    h = (Gamma / (4*beta*L^2))^(1/(2*beta+2)) * n^(-1/(2*beta+2))

(grid units; ``round(N*h)`` pixels) has mean squared error bounded by
``c0 * n^(-2*beta/(2*beta+2))``.  The harness samples Poisson images from a
fixed smooth phantom family, runs an estimator at the prescribed bandwidths,
and fits the empirical log-log rate, so the bound and the rate can be
checked numerically at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimators import Bandwidth, exp_weights, split_adaptive_estimate
from .grid import WindowSpec, window_pixels
from .kernels import KernelChoice
from .noise import derive_seed, sample_poisson
from .similarity import estimated_similarity, local_mean, oracle_similarity

ESTIMATORS = ("oracle", "split_adaptive")


@dataclass(frozen=True)
class HolderSpec:
    """Smoothness class: exponent ``beta``, constant ``L``, sup intensity ``Gamma``."""

    beta: float = 1.0
    L: float = 1.0
    Gamma: float = 4.0

    def __post_init__(self):
        if self.beta <= 0 or self.L <= 0 or self.Gamma <= 0:
            raise ValueError("beta, L and Gamma must all be positive")


def c0(spec: HolderSpec) -> float:
    """Constant of the oracle MSE bound c0 * n^(-2*beta/(2*beta+2)).

    This is the exact minimum of ``4*L^2*h^(2*beta) + Gamma/(h^2*n)`` over
    ``h``, stripped of the ``n`` power: ``(1+beta) * (4*L^2)^(1/(beta+1)) *
    Gamma^(beta/(beta+1)) / beta^(beta/(beta+1))``.  For ``beta = 1`` this is
    ``4*L*sqrt(Gamma)``.
    """
    b = spec.beta
    return float(
        (1.0 + b)
        * (4.0 * spec.L**2) ** (1.0 / (b + 1.0))
        * spec.Gamma ** (b / (b + 1.0))
        / b ** (b / (b + 1.0))
    )


def optimal_h(n: int, spec: HolderSpec) -> tuple[float, int]:
    """Rate-optimal search half-width for an n-pixel grid.

    Returns the width ``h`` in grid units together with the corresponding
    pixel radius ``round(sqrt(n) * h)``.

    Raises
    ------
    ValueError
        If ``n`` is not a positive perfect square.
    """
    side = _grid_side(n)
    b = spec.beta
    h = (spec.Gamma / (4.0 * b * spec.L**2)) ** (1.0 / (2 * b + 2)) * n ** (-1.0 / (2 * b + 2))
    return float(h), int(round(side * h))


def holder_phantom(side: int, spec: HolderSpec) -> np.ndarray:
    """Fixed smooth phantom satisfying the Hoelder-1 condition of ``spec``.

    ``f(u, v) = (Gamma - B) + B*sin(2*pi*u)*sin(2*pi*v)`` on the unit square
    with amplitude ``B = min(L/(4*pi), Gamma/2)``, sampled at grid points
    ``u = (i+1)/N``.  The sum of the coordinate-wise slopes is at most
    ``4*pi*B <= L``, so the L-inf Lipschitz constant is at most ``L``; the
    values stay in ``[Gamma - 2B, Gamma]``.
    """
    if side < 1:
        raise ValueError("side must be positive")
    amp = min(spec.L / (4.0 * math.pi), spec.Gamma / 2.0)
    u = (np.arange(side, dtype=np.float64) + 1.0) / side
    s = np.sin(2.0 * math.pi * u)
    return (spec.Gamma - amp) + amp * np.outer(s, s)


@dataclass
class RateResult:
    """Per-size Monte-Carlo statistics and the fitted log-log rate."""

    sizes: list[int]
    mse: list[float]
    mse_std: list[float]
    fitted_slope: float
    theory_slope: float
    bound: list[float]
    pixel_mse: list[np.ndarray] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.sizes[:-1], self.sizes[1:])):
            raise ValueError("sizes must be strictly increasing")
        if any(v <= 0 for v in self.mse):
            raise ValueError("per-size statistics must be positive")

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.mse[:-1], self.mse[1:]))

    def to_csv(self, path) -> None:
        """Write columns n, mse_mean, mse_std, bound_c0_rate."""
        with open(path, "w", encoding="ascii") as fh:
            fh.write("n,mse_mean,mse_std,bound_c0_rate\n")
            for n, m, s, b in zip(self.sizes, self.mse, self.mse_std, self.bound):
                fh.write(f"{n},{m:.9g},{s:.9g},{b:.9g}\n")


def rate_experiment(
    spec: HolderSpec,
    estimator: str,
    sizes,
    trials: int,
    seed: int,
    samples_per_side: int = 8,
    alpha: float = 0.25,
    bandwidth: Bandwidth | None = None,
) -> RateResult:
    """Monte-Carlo MSE of an estimator across grid sizes, with fitted rate.

    For each pixel count ``n`` in ``sizes`` the harness builds the phantom,
    draws ``trials`` independent count images (per-cell seeds derived from
    ``(seed, n, trial)``, so results do not depend on evaluation order), runs
    the estimator at the rate-optimal search radius on a grid of interior
    sample pixels, and records squared errors.

    ``estimator`` is ``"oracle"`` (bandwidth defaults to a constant just
    above ``sqrt(2)*L*h^beta``) or ``"split_adaptive"`` (bandwidth defaults
    to the adaptive ``mu=1`` rule; its patch radius scales as ``n^-alpha``).
    """
    sizes = _check_sizes(sizes)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}; choose from {ESTIMATORS}")
    per_size_mse: list[float] = []
    per_size_std: list[float] = []
    per_pixel: list[np.ndarray] = []
    for n in sizes:
        side = _grid_side(n)
        f = holder_phantom(side, spec)
        _, radius = optimal_h(n, spec)
        radius = max(1, radius)
        if estimator == "split_adaptive":
            patch_radius = max(1, int(round(side * n ** (-alpha))))
            margin = radius + patch_radius
            bw = bandwidth or Bandwidth.adaptive(1.0)
        else:
            patch_radius = 0
            margin = radius
            h_grid = radius / side
            bw = bandwidth or Bandwidth.constant(1.1 * math.sqrt(2.0) * spec.L * h_grid**spec.beta)
        centers = _sample_centers(side, margin, samples_per_side)
        wspec = WindowSpec(radius, patch_radius)
        errors = np.empty((len(centers), trials))
        if estimator == "oracle":
            # oracle weights depend only on the phantom: compute once per pixel
            flat_idx, weights = _oracle_tables(f, centers, wspec, bw)
            truth = np.array([f[c] for c in centers])
            for t in range(trials):
                y = sample_poisson(f, derive_seed(seed, n, t)).astype(np.float64)
                win = y.ravel()[flat_idx]
                anchors = np.array([y[c] for c in centers])
                est = anchors + np.sum(weights * (win - anchors[:, None]), axis=1)
                errors[:, t] = est - truth
        else:
            for t in range(trials):
                y = sample_poisson(f, derive_seed(seed, n, t))
                for p, c in enumerate(centers):
                    errors[p, t] = split_adaptive_estimate(y, c, wspec, bw) - f[c]
        sq = errors**2
        per_size_mse.append(float(sq.mean()))
        per_size_std.append(float(sq.mean(axis=0).std(ddof=1)) if trials > 1 else 0.0)
        per_pixel.append(sq.mean(axis=1))
    theory_slope = -2.0 * spec.beta / (2.0 * spec.beta + 2.0)
    bound = [c0(spec) * n**theory_slope for n in sizes]
    return RateResult(
        sizes=list(sizes),
        mse=per_size_mse,
        mse_std=per_size_std,
        fitted_slope=_fit_slope(sizes, per_size_mse),
        theory_slope=theory_slope,
        bound=bound,
        pixel_mse=per_pixel,
    )


def similarity_concentration_experiment(
    spec: HolderSpec,
    sizes,
    trials: int,
    seed: int,
    alpha: float = 0.25,
    constant_phantom: bool = True,
) -> RateResult:
    """Concentration of the estimated similarity around the true one.

    Tracks, per trial, ``max_x |rho_hat^2(x) - rho^2(x)|`` over the search
    window at the grid center, with the patch radius scaling as
    ``n^-alpha``; reports the empirical 99th percentile per size.  The
    expected log-log slope is about ``-(1/2 - alpha)``.
    """
    sizes = _check_sizes(sizes)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rect = KernelChoice.rectangular()
    stats: list[float] = []
    stds: list[float] = []
    for n in sizes:
        side = _grid_side(n)
        if constant_phantom:
            f = np.full((side, side), spec.Gamma)
        else:
            f = holder_phantom(side, spec)
        _, radius = optimal_h(n, spec)
        radius = max(1, radius)
        patch_radius = max(1, int(round(side * n ** (-alpha))))
        wspec = WindowSpec(radius, patch_radius)
        center = (side // 2, side // 2)
        rho2 = oracle_similarity(f, center, wspec)
        per_trial = np.empty(trials)
        for t in range(trials):
            y = sample_poisson(f, derive_seed(seed, n, t))
            fbar = local_mean(y, center, radius)
            rho2_hat = estimated_similarity(y, center, wspec, rect, fbar)
            per_trial[t] = np.abs(rho2_hat - rho2).max()
        stats.append(float(np.quantile(per_trial, 0.99)))
        stds.append(float(per_trial.std(ddof=1)) if trials > 1 else 0.0)
    theory_slope = -(0.5 - alpha)
    reference = [stats[0] * (n / sizes[0]) ** theory_slope for n in sizes]
    return RateResult(
        sizes=list(sizes),
        mse=stats,
        mse_std=stds,
        fitted_slope=_fit_slope(sizes, stats),
        theory_slope=theory_slope,
        bound=reference,
    )


def _grid_side(n: int) -> int:
    if n < 1:
        raise ValueError("pixel count must be positive")
    side = math.isqrt(int(n))
    if side * side != n:
        raise ValueError(f"pixel count {n} is not a perfect square")
    return side


def _check_sizes(sizes) -> list[int]:
    sizes = [int(s) for s in sizes]
    if len(sizes) < 2:
        raise ValueError("need at least two sizes to fit a rate")
    if any(b <= a for a, b in zip(sizes[:-1], sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    return sizes


def _fit_slope(sizes, values) -> float:
    return float(np.polyfit(np.log(np.asarray(sizes, dtype=float)),
                            np.log(np.asarray(values, dtype=float)), 1)[0])


def _sample_centers(side: int, margin: int, per_side: int) -> list[tuple[int, int]]:
    if 2 * margin >= side:
        raise ValueError(f"margin {margin} leaves no interior on a {side}x{side} grid")
    coords = np.unique(np.linspace(margin, side - 1 - margin, per_side).round().astype(int))
    return [(int(i), int(j)) for i in coords for j in coords]


def _oracle_tables(f: np.ndarray, centers, wspec: WindowSpec, bw: Bandwidth):
    """Flat window indices and oracle weights for each sample center."""
    side = f.shape[0]
    h2 = bw.squared()
    flat_idx = np.empty((len(centers), wspec.search_size), dtype=np.int64)
    weights = np.empty((len(centers), wspec.search_size))
    for p, c in enumerate(centers):
        pix = window_pixels(side, c, wspec.search_radius_px)
        flat_idx[p] = pix[:, 0] * side + pix[:, 1]
        sim = oracle_similarity(f, c, wspec)
        weights[p] = exp_weights(sim, h2).ravel()
    return flat_idx, weights
