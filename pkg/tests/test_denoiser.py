import numpy as np
import pytest
from sklearn.base import clone

from nlmpf import FilterConfig, PoissonNLMDenoiser, denoise, phantom, sample_poisson


@pytest.fixture
def counts():
    return sample_poisson(phantom("galaxy", 24), 17)


def test_get_set_params_roundtrip():
    den = PoissonNLMDenoiser(search=13, patch=3, mu=0.6)
    params = den.get_params()
    assert params["search"] == 13
    assert params["mu"] == 0.6
    den.set_params(mu=1.0, d=0)
    assert den.mu == 1.0 and den.d == 0


def test_clone_preserves_params(counts):
    den = PoissonNLMDenoiser(search=5, patch=3, d=1, kernel="gaussian", h_g=1.5)
    twin = clone(den)
    assert twin.get_params() == den.get_params()
    assert np.array_equal(twin.fit_transform(counts), den.fit_transform(counts))


def test_transform_matches_function_api(counts):
    den = PoissonNLMDenoiser(search=5, patch=3, d=1, mu=0.8)
    out = den.fit(counts).transform(counts)
    want = denoise(counts, FilterConfig(search=5, patch=3, d=1, mu=0.8))
    assert np.array_equal(out, want)


def test_stack_transform(counts):
    den = PoissonNLMDenoiser(search=5, patch=3, d=0)
    stack = np.stack([counts, counts + 1])
    out = den.fit_transform(stack)
    assert out.shape == stack.shape
    assert np.array_equal(out[0], denoise(counts, FilterConfig(search=5, patch=3, d=0)))


def test_invalid_params_raise_on_fit(counts):
    with pytest.raises(ValueError):
        PoissonNLMDenoiser(search=4).fit(counts)
    with pytest.raises(ValueError):
        PoissonNLMDenoiser(variant="split", patch=1).fit(counts)


def test_invalid_input_raises(counts):
    den = PoissonNLMDenoiser(search=5, patch=3)
    with pytest.raises(ValueError):
        den.fit(np.ones((2, 2, 2, 2)))
    with pytest.raises(ValueError):
        den.transform(np.full((6, 6), -1))
