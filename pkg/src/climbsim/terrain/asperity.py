"""Asperity extraction from a sampled terrain patch.

An asperity is a strict local maximum of the height lattice.  Its tip
radius comes from a least-squares paraboloid fit to the 3x3 neighborhood
(reciprocal of the mean curvature, peaks only).  Its normal angle is the
steepest descending slope found walking the 8 lattice rays down the flank
of the bump: that facet is what a spine tip actually bears against, and
the 3x3 gradient at a peak is zero by construction so it cannot carry
this information.
"""

from __future__ import annotations

import math

import numpy as np

from .params import Asperity, TerrainPatch

# Longest flank walk, in lattice steps. Keeps the angle a local property
# of the bump instead of picking up distant valleys.
_MAX_WALK = 16

_NEIGHBOR_DIRS = [
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
]


def _paraboloid_pinv(spacing: float) -> np.ndarray:
    """Pseudo-inverse of the 3x3 quadratic design matrix (shared by all fits)."""
    rows = []
    for dv in (-spacing, 0.0, spacing):
        for du in (-spacing, 0.0, spacing):
            rows.append([1.0, du, dv, du * du, du * dv, dv * dv])
    return np.linalg.pinv(np.asarray(rows))


def _steepest_flank_slope(heights: np.ndarray, i: int, j: int, spacing: float) -> float:
    """Max descending slope along the 8 rays from peak (i, j)."""
    ny, nx = heights.shape
    best = 0.0
    for di, dj in _NEIGHBOR_DIRS:
        step_len = spacing * math.hypot(di, dj)
        prev = heights[i, j]
        for s in range(1, _MAX_WALK + 1):
            ii, jj = i + s * di, j + s * dj
            if not (0 <= ii < ny and 0 <= jj < nx):
                break
            h = heights[ii, jj]
            if h >= prev:
                break
            slope = (prev - h) / step_len
            if slope > best:
                best = slope
            prev = h
    return best


def extract_asperities(patch: TerrainPatch) -> list:
    """All strict interior local maxima of the patch, as Asperity records.

    Peaks whose paraboloid fit is flat or non-concave are skipped.
    Returned in row-major lattice order, deterministic for a given patch.
    """
    h = patch.heights
    ny, nx = h.shape
    pinv = _paraboloid_pinv(patch.spacing)
    out = []
    interior = h[1:-1, 1:-1]
    strict_max = np.ones_like(interior, dtype=bool)
    for di, dj in _NEIGHBOR_DIRS:
        strict_max &= interior > h[1 + di : ny - 1 + di, 1 + dj : nx - 1 + dj]
    for i, j in zip(*np.nonzero(strict_max)):
        i, j = int(i) + 1, int(j) + 1
        window = h[i - 1 : i + 2, j - 1 : j + 2].ravel()
        coeffs = pinv @ window
        mean_curv = -(coeffs[3] + coeffs[5])  # -(z_xx + z_yy) / 2 at the peak
        if mean_curv <= 0.0:
            continue
        tip_radius = 1.0 / mean_curv
        angle = math.atan(_steepest_flank_slope(h, i, j, patch.spacing))
        out.append(
            Asperity(
                x=float(patch.xs[j]),
                y=float(patch.ys[i]),
                z=float(h[i, j]),
                tip_radius=tip_radius,
                normal_angle=angle,
            )
        )
    return out
