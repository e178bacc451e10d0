import math

import numpy as np
import pytest

import reference as ref
from nlmpf import (
    Bandwidth,
    KernelChoice,
    WindowSpec,
    adaptive_estimate,
    classic_nlm,
    derive_seed,
    estimated_similarity,
    exp_weights,
    local_mean,
    oracle_estimate,
    oracle_similarity,
    sample_poisson,
    split_adaptive_estimate,
    split_estimated_similarity,
)

RECT = KernelChoice.rectangular()


class TestExpWeights:
    def test_flat_similarity_gives_uniform(self):
        w = exp_weights(np.zeros((5, 5)), 2.0)
        assert np.allclose(w, 1.0 / 25.0, rtol=1e-15)

    def test_two_point_example(self):
        h2 = 1.7
        w = exp_weights(np.array([0.0, h2 * math.log(2.0)]), h2)
        assert w[0] == pytest.approx(2.0 / 3.0, rel=1e-12)
        assert w[1] == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_normalization(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            w = exp_weights(rng.uniform(0, 50, (7, 7)), rng.uniform(0.1, 5))
            assert abs(w.sum() - 1.0) <= 1e-12
            assert (w >= 0).all()

    def test_inf_similarity_gets_zero_weight(self):
        sim = np.array([0.0, np.inf, 1.0])
        w = exp_weights(sim, 1.0)
        assert w[1] == 0.0
        assert abs(w.sum() - 1.0) <= 1e-12

    def test_huge_similarities_do_not_underflow_to_nan(self):
        w = exp_weights(np.array([1e6, 2e6]), 1.0)
        assert np.isfinite(w).all() and abs(w.sum() - 1.0) <= 1e-12

    def test_nonpositive_bandwidth_rejected(self):
        with pytest.raises(ValueError):
            exp_weights(np.zeros(3), 0.0)


class TestBandwidth:
    def test_constant_mode(self):
        assert Bandwidth.constant(2.0).squared() == 4.0

    def test_adaptive_mode_and_floor(self):
        bw = Bandwidth.adaptive(1.5)
        assert bw.squared(4.0) == pytest.approx(3.0, rel=1e-15)
        assert bw.squared(0.0) == pytest.approx(1e-6, rel=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError):
            Bandwidth("linear", 1.0)
        with pytest.raises(ValueError):
            Bandwidth.constant(-1.0)
        with pytest.raises(ValueError):
            Bandwidth.adaptive(1.0).squared()


class TestOracleEstimate:
    def test_constant_clean_and_counts(self):
        est = oracle_estimate(np.full((5, 5), 3.0), np.full((5, 5), 3),
                              (2, 2), WindowSpec(1, 0), Bandwidth.constant(1.0))
        assert est == 3.0

    def test_constant_clean_gives_window_mean(self):
        rng = np.random.default_rng(2)
        y = rng.integers(0, 9, (5, 5))
        est = oracle_estimate(np.full((5, 5), 2.0), y, (2, 2),
                              WindowSpec(1, 0), Bandwidth.constant(1.0))
        assert est == pytest.approx(y[1:4, 1:4].mean(), rel=1e-14)

    def test_three_by_three_hand_case(self):
        f = np.array([[0.0, 1.0, 2.0], [3.0, 4.0, 5.0], [6.0, 7.0, 8.0]])
        y = np.array([[1, 0, 2], [4, 5, 3], [7, 6, 9]])
        # direct evaluation of the exponential weighting, H = 1
        num = den = 0.0
        for a in range(-1, 2):
            for b in range(-1, 2):
                rho2 = (f[1 + a, 1 + b] - f[1, 1]) ** 2
                w = math.exp(-rho2)
                num += w * y[1 + a, 1 + b]
                den += w
        est = oracle_estimate(f, y, (1, 1), WindowSpec(1, 0), Bandwidth.constant(1.0))
        assert est == pytest.approx(num / den, rel=1e-13)


class TestAdaptiveEstimate:
    def test_constant_counts_fixed_point(self):
        est = adaptive_estimate(np.full((7, 7), 6), (3, 3), WindowSpec(2, 1),
                                RECT, Bandwidth.adaptive(1.0))
        assert est == 6.0

    def test_degenerate_window_returns_center(self):
        y = np.arange(25).reshape(5, 5)
        est = adaptive_estimate(y, (2, 3), WindowSpec(0, 0), RECT, Bandwidth.adaptive(1.0))
        assert est == float(y[2, 3])

    def test_noisy_constant_interior_concentration(self):
        f = np.full((32, 32), 4.0)
        spec = WindowSpec(3, 1)
        tol = 5.0 * math.sqrt(4.0 / spec.search_size)
        bad = 0
        for t in range(40):
            y = sample_poisson(f, derive_seed(5, t))
            est = adaptive_estimate(y, (16, 16), spec, RECT, Bandwidth.adaptive(1.0))
            bad += abs(est - 4.0) > tol
        assert bad <= 2  # "most seeds"

    def test_integer_shift_equivariance_without_compensation(self):
        rng = np.random.default_rng(9)
        y = rng.integers(0, 8, (7, 7))
        spec = WindowSpec(2, 1)
        bw = Bandwidth.constant(1.3)
        # the similarity statistic is exactly invariant (integer differences)
        sim0 = estimated_similarity(y, (3, 3), spec, RECT, 0.0)
        sim5 = estimated_similarity(y + 5, (3, 3), spec, RECT, 0.0)
        assert np.array_equal(sim0, sim5)
        base = adaptive_estimate(y, (3, 3), spec, RECT, bw, fbar=0.0)
        shifted = adaptive_estimate(y + 5, (3, 3), spec, RECT, bw, fbar=0.0)
        # identical weights, so the estimate shifts by k up to one rounding
        assert abs(shifted - (base + 5.0)) <= 2 * np.spacing(base + 5.0)

    def test_shift_compensation_through_recomputed_fbar(self):
        # the patch-distance part is exactly shift-invariant (integer
        # differences), the recomputed local mean absorbs the shift, so the
        # centered statistic moves by exactly -2k
        rng = np.random.default_rng(10)
        y = rng.integers(0, 8, (9, 9))
        spec = WindowSpec(2, 1)
        k = 7
        fb0 = local_mean(y, (4, 4), 2)
        fb1 = local_mean(y + k, (4, 4), 2)
        assert fb1 == pytest.approx(fb0 + k, rel=1e-14)
        dist0 = estimated_similarity(y, (4, 4), spec, RECT, 0.0, positive_part=False)
        dist1 = estimated_similarity(y + k, (4, 4), spec, RECT, 0.0, positive_part=False)
        assert np.array_equal(dist0, dist1)
        raw0 = estimated_similarity(y, (4, 4), spec, RECT, fb0, positive_part=False)
        raw1 = estimated_similarity(y + k, (4, 4), spec, RECT, fb1, positive_part=False)
        assert np.allclose(raw1, raw0 - 2.0 * k, rtol=0, atol=1e-10)


class TestSplitAdaptiveEstimate:
    def test_constant_counts_fixed_point(self):
        est = split_adaptive_estimate(np.full((7, 7), 2), (3, 3),
                                      WindowSpec(2, 1), Bandwidth.adaptive(1.0))
        assert est == 2.0

    def test_weights_supported_on_even_offsets(self):
        rng = np.random.default_rng(11)
        y = rng.integers(0, 9, (9, 9))
        sim = split_estimated_similarity(y, (4, 4), WindowSpec(2, 1))
        w = exp_weights(sim, 1.0)
        offs = np.arange(-2, 3)
        odd = (np.add.outer(offs, offs) % 2).astype(bool)
        assert (w[odd] == 0).all()
        assert w[~odd].sum() == pytest.approx(1.0, abs=1e-12)

    def test_matches_brute_force(self):
        y = np.array([
            [2, 7, 1, 8, 2],
            [8, 1, 8, 2, 8],
            [4, 5, 9, 0, 4],
            [5, 2, 3, 5, 3],
            [6, 0, 2, 6, 1],
        ])
        est = split_adaptive_estimate(y, (2, 2), WindowSpec(1, 1), Bandwidth.adaptive(1.0))
        want = ref.split_pixel([[int(v) for v in r] for r in y], 2, 2, 1, 1, 1.0)
        assert est == pytest.approx(want, rel=1e-12)


class TestClassicNlm:
    def test_constant_counts(self):
        assert classic_nlm(np.full((5, 5), 4), (2, 2), WindowSpec(1, 1), RECT, 2.0) == 4.0

    def test_reduces_to_adaptive_with_zero_fbar(self):
        rng = np.random.default_rng(12)
        y = rng.integers(0, 10, (7, 7))
        spec = WindowSpec(2, 1)
        a = classic_nlm(y, (3, 3), spec, RECT, 1.4)
        b = adaptive_estimate(y, (3, 3), spec, RECT, Bandwidth.constant(1.4), fbar=0.0)
        assert a == b

    def test_matches_brute_force(self):
        y = np.array([
            [1, 3, 5, 7, 9],
            [2, 4, 6, 8, 0],
            [9, 7, 5, 3, 1],
            [0, 8, 6, 4, 2],
            [5, 5, 5, 5, 5],
        ])
        est = classic_nlm(y, (2, 2), WindowSpec(1, 1), KernelChoice.k0(), 2.0)
        want = ref.classic_pixel([[int(v) for v in r] for r in y], 2, 2, 1, 1, "k0", 1.0, 2.0)
        assert est == pytest.approx(want, rel=1e-12)

    def test_nonpositive_bandwidth_rejected(self):
        with pytest.raises(ValueError):
            classic_nlm(np.ones((3, 3), dtype=int), (1, 1), WindowSpec(1, 0), RECT, 0.0)


class TestRangePreservation:
    @pytest.mark.parametrize("variant", ["plain", "split", "classic", "oracle"])
    def test_estimates_stay_in_window_range(self, variant):
        rng = np.random.default_rng(13)
        spec = WindowSpec(2, 1)
        for _ in range(15):
            y = rng.integers(0, 20, (9, 9))
            c = tuple(rng.integers(0, 9, 2))
            if variant == "plain":
                est = adaptive_estimate(y, c, spec, RECT, Bandwidth.adaptive(1.0))
            elif variant == "split":
                est = split_adaptive_estimate(y, c, spec, Bandwidth.adaptive(1.0))
            elif variant == "classic":
                est = classic_nlm(y, c, spec, RECT, 1.0)
            else:
                f = rng.uniform(0, 6, (9, 9))
                est = oracle_estimate(f, y, c, spec, Bandwidth.constant(1.0))
            lo, hi = y.min(), y.max()
            tol = 1e-10 * (1.0 + hi)
            assert lo - tol <= est <= hi + tol


def test_weight_maps_normalize_across_all_variants():
    rng = np.random.default_rng(14)
    y = rng.integers(0, 11, (9, 9))
    f = rng.uniform(0, 5, (9, 9))
    spec = WindowSpec(2, 1)
    c = (4, 4)
    fbar = local_mean(y, c, 2)
    maps = [
        oracle_similarity(f, c, spec),
        estimated_similarity(y, c, spec, RECT, fbar),
        split_estimated_similarity(y, c, spec),
        estimated_similarity(y, c, spec, KernelChoice.k0(), 0.0, positive_part=False),
    ]
    for sim in maps:
        w = exp_weights(sim, 1.7)
        assert abs(w.sum() - 1.0) <= 1e-12
