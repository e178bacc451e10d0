import numpy as np
import pytest

from nlmpf import PHANTOMS, phantom, recommended_config

EXPECTED_RANGES = {
    "spots": (0.03, 4.99),
    "galaxy": (0.0, 5.0),
    "ridges": (0.05, 0.85),
    "barbara": (0.93, 15.73),
    "cells": (0.53, 16.93),
}


@pytest.mark.parametrize("name", sorted(PHANTOMS))
def test_ranges_and_validity(name):
    f = phantom(name, 128)
    lo, hi = EXPECTED_RANGES[name]
    assert f.shape == (128, 128)
    assert f.min() >= lo - 1e-9
    assert f.max() <= hi + 1e-9
    assert f.max() > 0.5 * hi  # actually uses its dynamic range
    assert np.isfinite(f).all()


@pytest.mark.parametrize("name", sorted(PHANTOMS))
def test_deterministic(name):
    assert np.array_equal(phantom(name, 64), phantom(name, 64))


def test_recommended_configs_match_quoted_settings():
    spots = recommended_config("spots")
    assert (spots.search, spots.patch, spots.d, spots.h_g, spots.mu) == (19, 13, 3, 2.5, 1.0)
    galaxy = recommended_config("galaxy")
    assert (galaxy.search, galaxy.patch, galaxy.d, galaxy.mu) == (13, 3, 2, 0.6)
    ridges = recommended_config("ridges")
    assert (ridges.search, ridges.patch, ridges.d, ridges.mu) == (9, 21, 4, 0.4)
    barbara = recommended_config("barbara")
    assert (barbara.search, barbara.patch, barbara.d, barbara.mu) == (15, 21, 0, 1.0)
    cells = recommended_config("cells")
    assert (cells.search, cells.patch, cells.d, cells.mu) == (7, 13, 2, 1.0)
    for name in PHANTOMS:
        cfg = recommended_config(name)
        assert cfg.delta == 15.0
        assert cfg.kernel == "k0"


def test_unknown_name_rejected():
    with pytest.raises(ValueError):
        phantom("checker")
    with pytest.raises(ValueError):
        recommended_config("checker")
