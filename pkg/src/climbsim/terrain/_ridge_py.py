"""Pure numpy ridge-sum kernel (fallback when the compiled one is absent).

Accumulates scale terms in the same (ridge, frequency) order as the
compiled kernel so both backends agree per point to float round-off.
"""

from __future__ import annotations

import numpy as np


def ridge_sum(x, y, cos_ridge, sin_ridge, wavenum, decay, phase, cos_phase):
    """Evaluate the unscaled ridge superposition at points (x, y).

    Parameters are 1-D float64 arrays: the point coordinates, per-ridge
    direction cosines, per-scale wavenumbers 2*pi*freq_scale**n / L and
    amplitude decays, plus the (ridge, scale) phase table and its cosines.
    Returns the height sum (before the closed-form amplitude factor).
    """
    acc = np.zeros_like(x)
    ridge_n = cos_ridge.shape[0]
    for m in range(ridge_n):
        proj = x * cos_ridge[m] + y * sin_ridge[m]
        for n in range(wavenum.shape[0]):
            acc += decay[n] * (cos_phase[m, n] - np.cos(wavenum[n] * proj + phase[m, n]))
    return acc


def ridge_sum_grid(xs, ys, cos_ridge, sin_ridge, wavenum, decay, phase, cos_phase):
    """Unscaled ridge superposition on the lattice ys x xs, shape (ny, nx).

    On a lattice the scale argument splits along the axes, so each
    (ridge, scale) term costs nx + ny trig evaluations plus a rank-one
    update instead of nx * ny evaluations.  Per-element operation order
    matches the compiled kernel exactly.
    """
    acc = np.zeros((ys.shape[0], xs.shape[0]))
    for m in range(cos_ridge.shape[0]):
        for n in range(wavenum.shape[0]):
            wc = wavenum[n] * cos_ridge[m]
            ws = wavenum[n] * sin_ridge[m]
            ax = wc * xs
            ay = ws * ys + phase[m, n]
            cos_ax, sin_ax = np.cos(ax), np.sin(ax)
            cos_ay, sin_ay = np.cos(ay), np.sin(ay)
            cross = (
                cos_ax[None, :] * cos_ay[:, None]
                - sin_ax[None, :] * sin_ay[:, None]
            )
            acc += decay[n] * (cos_phase[m, n] - cross)
    return acc
