"""Synthetic low-count test scenes and their recommended filter settings.

Five deterministic generators mimic the standard photon-limited benchmark
scenes (spots of varying radii, a galaxy, smooth ridges, a textured portrait
stand-in, fluorescent tubules) at matching intensity ranges.  They are pure
functions of the pixel coordinates, so a scene is reproduced bit-exactly on
every run.

``recommended_config(name)`` returns the filter settings commonly quoted for
each scene (search/patch widths, step-2 radius, bandwidth factor).
"""

from __future__ import annotations

import numpy as np

from .pipeline import FilterConfig


def spots(side: int = 256) -> np.ndarray:
    """Gaussian spots of progressively varying radius and amplitude.

    Background 0.03, peak amplitudes spanning roughly [0.08, 4.99].
    """
    f = np.full((side, side), 0.03)
    ii, jj = _coords(side)
    radii = (1.5, 2.5, 4.0, 6.0, 9.0)
    n_spots = 25
    for k in range(n_spots):
        # low-discrepancy placement keeps spots spread out and deterministic
        cy = (0.12 + 0.6180339887 * k) % 1.0 * 0.84 + 0.08
        cx = (0.38 + 0.7548776662 * k) % 1.0 * 0.84 + 0.08
        r = radii[k % len(radii)]
        amp = 0.05 + (4.96 - 0.05) * k / (n_spots - 1)
        d2 = (ii - cy * side) ** 2 + (jj - cx * side) ** 2
        f += amp * np.exp(-d2 / (2.0 * r * r))
    return np.minimum(f, 4.99)


def galaxy(side: int = 256) -> np.ndarray:
    """Elliptical galaxy-like profile with a small companion; range [0, 5]."""
    ii, jj = _coords(side)
    y = (ii - 0.52 * side) / side
    x = (jj - 0.48 * side) / side
    ang = np.pi / 6.0
    u = np.cos(ang) * x + np.sin(ang) * y
    v = -np.sin(ang) * x + np.cos(ang) * y
    r = np.sqrt((u / 0.30) ** 2 + (v / 0.16) ** 2)
    core = 5.0 * np.exp(-4.0 * r)
    arm = 0.8 * np.exp(-6.0 * np.abs(r - 0.6)) * (0.5 + 0.5 * np.cos(6.0 * np.arctan2(v, u)))
    blob = 1.2 * np.exp(-(((ii - 0.2 * side) ** 2 + (jj - 0.78 * side) ** 2) / (2.0 * (0.02 * side) ** 2)))
    f = core + arm * (r < 1.2) + blob
    f[f < 5e-3] = 0.0
    return np.minimum(f, 5.0)


def ridges(side: int = 256) -> np.ndarray:
    """Nine vertical ridges with peaks progressing 0.1 to 0.5 plus an
    inclined ridge of peak 0.3, on background 0.05.

    Where the inclined ridge crosses the strongest vertical one the
    intensities add, so the range is about [0.05, 0.85].
    """
    f = np.full((side, side), 0.05)
    ii, jj = _coords(side)
    width = 0.018 * side
    for k in range(9):
        col = (k + 1) * side / 10.0
        amp = 0.10 + 0.40 * k / 8.0
        f += amp * np.exp(-((jj - col) ** 2) / (2.0 * width**2))
    diag = 0.30 * np.exp(-((jj - (0.10 * side + 0.85 * ii)) ** 2) / (2.0 * width**2))
    return f + diag


def barbara(side: int = 256) -> np.ndarray:
    """Textured stand-in with oriented oscillations; range [0.93, 15.73]."""
    ii, jj = _coords(side)
    u = ii / side
    v = jj / side
    tex = (
        np.sin(2 * np.pi * (18.0 * v + 6.0 * u * v))
        + 0.8 * np.sin(2 * np.pi * (12.0 * (u + v)))
        + 0.6 * np.sin(2 * np.pi * (26.0 * u * (1.0 + 0.3 * v)))
    )
    base = 1.5 * np.cos(2 * np.pi * 1.3 * (u - 0.3)) + 1.2 * u
    raw = tex + base
    return _rescale(raw, 0.93, 15.73)


def cells(side: int = 256) -> np.ndarray:
    """Bright curved tubules over a dim background; range [0.53, 16.93]."""
    ii, jj = _coords(side)
    f = np.zeros((side, side))
    sigma = 0.010 * side
    curves = (
        (0.20, 0.10, 0.55, 2.2, 0.12),
        (0.45, 0.85, -0.35, 1.6, 0.18),
        (0.70, 0.15, 0.80, 2.8, 0.10),
        (0.85, 0.70, -0.60, 1.2, 0.15),
        (0.35, 0.45, 0.25, 3.1, 0.08),
    )
    ts = np.linspace(0.0, 1.0, 400)
    for y0, x0, slope, freq, amp in curves:
        px = (x0 + ts * 0.9) % 1.0
        py = (y0 + slope * ts + amp * np.sin(2 * np.pi * freq * ts)) % 1.0
        for cy, cx in zip(py, px):
            d2 = (ii - cy * side) ** 2 + (jj - cx * side) ** 2
            np.maximum(f, np.exp(-d2 / (2.0 * sigma * sigma)), out=f)
    body = 0.15 * np.exp(-(((ii / side - 0.5) ** 2 + (jj / side - 0.5) ** 2) / 0.18))
    return _rescale(f + body, 0.53, 16.93)


PHANTOMS = {
    "spots": spots,
    "galaxy": galaxy,
    "ridges": ridges,
    "barbara": barbara,
    "cells": cells,
}

_RECOMMENDED = {
    "spots": dict(search=19, patch=13, d=3, h_g=2.5, mu=1.0),
    "galaxy": dict(search=13, patch=3, d=2, h_g=1.0, mu=0.6),
    "ridges": dict(search=9, patch=21, d=4, h_g=0.5, mu=0.4),
    "barbara": dict(search=15, patch=21, d=0, h_g=1.0, mu=1.0),
    "cells": dict(search=7, patch=13, d=2, h_g=2.0, mu=1.0),
}


def phantom(name: str, side: int = 256) -> np.ndarray:
    """Generate a named phantom scene."""
    try:
        return PHANTOMS[name](side)
    except KeyError:
        raise ValueError(f"unknown phantom {name!r}; choose from {sorted(PHANTOMS)}") from None


def recommended_config(name: str) -> FilterConfig:
    """Filter settings commonly quoted for the named scene."""
    try:
        return FilterConfig(**_RECOMMENDED[name])
    except KeyError:
        raise ValueError(f"unknown phantom {name!r}; choose from {sorted(_RECOMMENDED)}") from None


def _coords(side: int):
    return np.meshgrid(np.arange(side, dtype=np.float64),
                       np.arange(side, dtype=np.float64), indexing="ij")


def _rescale(arr: np.ndarray, lo: float, hi: float) -> np.ndarray:
    amin, amax = float(arr.min()), float(arr.max())
    return lo + (hi - lo) * (arr - amin) / (amax - amin)
