import numpy as np
import pytest

import reference as ref
from nlmpf import (
    KernelChoice,
    WindowSpec,
    derive_seed,
    estimated_similarity,
    local_mean,
    oracle_similarity,
    sample_poisson,
    split_estimated_similarity,
    split_local_mean,
)

RECT = KernelChoice.rectangular()


class TestOracleSimilarity:
    def test_constant_image_all_zero(self):
        sim = oracle_similarity(np.full((7, 7), 2.0), (3, 3), WindowSpec(2, 0))
        assert (sim == 0).all()

    def test_squared_difference(self):
        f = np.full((5, 5), 1.0)
        f[2, 3] = 3.0
        sim = oracle_similarity(f, (2, 2), WindowSpec(1, 0))
        assert sim[1, 2] == 4.0

    def test_ramp_gives_squared_offsets(self):
        f = np.tile(np.arange(7, dtype=float), (7, 1))  # f(i, j) = j
        sim = oracle_similarity(f, (3, 3), WindowSpec(2, 0))
        offs = np.arange(-2, 3, dtype=float)
        assert np.array_equal(sim, np.tile(offs**2, (5, 1)))


class TestLocalMean:
    def test_constant(self):
        assert local_mean(np.full((5, 5), 6), (2, 2), 1) == 6.0

    def test_three_by_three_mean(self):
        y = np.arange(1, 10).reshape(3, 3)
        assert local_mean(y, (1, 1), 1) == 5.0

    def test_corner_uses_reflected_multiset(self):
        y = np.arange(1, 10).reshape(3, 3)
        # by hand: reflected window at (0,0) repeats the corner block
        pix = [(0, 0), (0, 0), (0, 1), (0, 0), (0, 0), (0, 1), (1, 0), (1, 0), (1, 1)]
        expected = sum(y[p] for p in pix) / 9.0
        assert local_mean(y, (0, 0), 1) == pytest.approx(expected, rel=1e-15)


class TestEstimatedSimilarity:
    def test_constant_image_is_zero(self):
        y = np.full((7, 7), 5)
        sim = estimated_similarity(y, (3, 3), WindowSpec(2, 1), RECT, fbar=5.0)
        assert (sim == 0).all()

    def test_single_pixel_patch_raw_difference(self):
        y = np.full((5, 5), 2)
        y[2, 4] = 5
        sim = estimated_similarity(y, (2, 2), WindowSpec(2, 0), RECT, fbar=0.0)
        assert sim[2, 4] == 9.0

    @pytest.mark.parametrize("kind", ["rect", "k0", "gaussian"])
    def test_matches_brute_force_on_hand_images(self, kind):
        kernel = KernelChoice.gaussian(1.7) if kind == "gaussian" else KernelChoice(kind)
        images = [
            np.array([
                [0, 1, 2, 3, 4],
                [5, 4, 3, 2, 1],
                [0, 2, 4, 6, 8],
                [1, 1, 2, 2, 3],
                [9, 0, 9, 0, 9],
            ]),
            np.arange(25).reshape(5, 5) % 7,
        ]
        for y in images:
            fbar = local_mean(y, (2, 2), 1)
            sim = estimated_similarity(y, (2, 2), WindowSpec(1, 1), kernel, fbar)
            rows = [[int(v) for v in row] for row in y]
            for a in range(-1, 2):
                for b in range(-1, 2):
                    dist = ref.patch_distance(rows, 2, 2, a, b, 1, kind, 1.7)
                    want = max(dist - 2.0 * fbar, 0.0)
                    assert sim[1 + a, 1 + b] == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_positive_part_holds_everywhere(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            y = rng.integers(0, 10, (9, 9))
            c = tuple(rng.integers(0, 9, 2))
            sim = estimated_similarity(y, c, WindowSpec(2, 1), RECT,
                                       fbar=local_mean(y, c, 2))
            assert (sim >= 0).all()

    def test_negative_fbar_rejected(self):
        with pytest.raises(ValueError):
            estimated_similarity(np.ones((5, 5), dtype=int), (2, 2),
                                 WindowSpec(1, 1), RECT, fbar=-1.0)

    def test_centered_statistic_mean_near_zero_on_constant_field(self):
        # before the positive part, E[patch mean - 2*fbar] = 0 when f is flat
        f = np.full((11, 11), 4.0)
        spec = WindowSpec(2, 1)
        vals = []
        for t in range(300):
            y = sample_poisson(f, derive_seed(31, t))
            fbar = local_mean(y, (5, 5), 2)
            raw = estimated_similarity(y, (5, 5), spec, RECT, fbar, positive_part=False)
            vals.append(raw[3, 3])
        vals = np.asarray(vals)
        sigma = vals.std(ddof=1) / np.sqrt(len(vals))
        assert abs(vals.mean()) <= 3 * sigma


class TestSplitSimilarity:
    def test_constant_is_zero_on_even_offsets(self):
        y = np.full((9, 9), 3)
        sim = split_estimated_similarity(y, (4, 4), WindowSpec(2, 1))
        offs = np.arange(-2, 3)
        odd = (np.add.outer(offs, offs) % 2).astype(bool)
        assert (sim[~odd] == 0).all()
        assert np.isinf(sim[odd]).all()

    def test_patch_parity_counts_partition(self):
        spec = WindowSpec(2, 2)
        offs = np.arange(-2, 3)
        odd = (np.add.outer(offs, offs) % 2).astype(bool)
        assert int(odd.sum()) + int((~odd).sum()) == spec.patch_size

    def test_matches_brute_force(self):
        y = np.array([
            [3, 1, 4, 1, 5],
            [9, 2, 6, 5, 3],
            [5, 8, 9, 7, 9],
            [3, 2, 3, 8, 4],
            [6, 2, 6, 4, 3],
        ])
        spec = WindowSpec(1, 1)
        sim = split_estimated_similarity(y, (2, 2), spec)
        rows = [[int(v) for v in row] for row in y]
        fbar = ref.odd_window_mean(rows, 2, 2, 1)
        assert split_local_mean(y, (2, 2), 1) == pytest.approx(fbar, rel=1e-15)
        for a in range(-1, 2):
            for b in range(-1, 2):
                if (a + b) % 2 == 1:
                    assert np.isinf(sim[1 + a, 1 + b])
                else:
                    dist = ref.odd_patch_distance(rows, 2, 2, a, b, 1)
                    want = max(dist - 2.0 * fbar, 0.0)
                    assert sim[1 + a, 1 + b] == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_zero_patch_radius_rejected(self):
        with pytest.raises(ValueError):
            split_estimated_similarity(np.ones((5, 5), dtype=int), (2, 2), WindowSpec(1, 0))
        with pytest.raises(ValueError):
            split_local_mean(np.ones((5, 5), dtype=int), (2, 2), 0)
