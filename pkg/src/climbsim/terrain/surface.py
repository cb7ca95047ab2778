"""Surface synthesis: multiscale ridge superposition.

The height field is

    z(x, y) = C * sum_{m=1..M} sum_{n=0..n_max} gamma^((Ds-3) n)
              * (cos(phi_mn) - cos(2 pi gamma^n rho_m / L + phi_mn))

where rho_m = x cos(pi m / M) + y sin(pi m / M) is the coordinate along
ridge direction m (equal to the polar form rho cos(theta - pi m / M)),
and the amplitude follows the closed form

    C = L * (G / L)^(Ds - 2) * sqrt(ln(gamma) / M).

Phases phi_mn are drawn once per parameter set from a named counter-based
stream keyed by ``phase_seed``, so identical parameters always produce an
identical surface.  Two kernels implement the double sum: a compiled one
and a numpy fallback, selected at import time.
"""

from __future__ import annotations

import math

import numpy as np

from .. import rng
from ..errors import ParameterDomainError
from .params import TerrainParams, TerrainPatch
from . import _ridge_py

_BACKENDS = {"python": _ridge_py}
try:  # compiled kernel is optional; interfaces are identical either way
    from . import _ridge_c

    _BACKENDS["compiled"] = _ridge_c
    _active = "compiled"
except ImportError:
    _active = "python"


def active_backend() -> str:
    """Name of the kernel in use: 'compiled' or 'python'."""
    return _active


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str) -> None:
    """Select the ridge-sum kernel (mainly for benchmarks and tests)."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}, have {sorted(_BACKENDS)}")
    _active = name


def amplitude_scale(params: TerrainParams) -> float:
    """Closed-form height amplitude C for the given parameters."""
    g_ratio = params.roughness_amp / params.sample_length
    return (
        params.sample_length
        * g_ratio ** (params.fractal_dim - 2.0)
        * math.sqrt(math.log(params.freq_scale) / params.ridge_count)
    )


def nyquist_index(sample_length: float, spacing: float, freq_scale: float) -> int:
    """Highest frequency index resolvable on a grid of the given spacing.

    Chosen so freq_scale**n * spacing / sample_length stays at or below 1.
    """
    if spacing <= 0 or sample_length <= 0:
        raise ParameterDomainError("spacing and sample_length must be > 0")
    if spacing >= sample_length:
        return 0
    return int(math.floor(math.log(sample_length / spacing) / math.log(freq_scale)))


def ridge_phases(params: TerrainParams) -> np.ndarray:
    """Phase table, shape (ridge_count, max_freq_index + 1), in [0, 2 pi)."""
    gen = rng.stream(params.phase_seed, "terrain-phases")
    return gen.uniform(
        0.0, 2.0 * np.pi, size=(params.ridge_count, params.max_freq_index + 1)
    )


def _tables(params: TerrainParams):
    m_idx = np.arange(1, params.ridge_count + 1, dtype=np.float64)
    ridge_angle = np.pi * m_idx / params.ridge_count
    n_idx = np.arange(params.max_freq_index + 1, dtype=np.float64)
    wavenum = 2.0 * np.pi * params.freq_scale**n_idx / params.sample_length
    decay = params.freq_scale ** ((params.fractal_dim - 3.0) * n_idx)
    phase = ridge_phases(params)
    return (
        np.ascontiguousarray(np.cos(ridge_angle)),
        np.ascontiguousarray(np.sin(ridge_angle)),
        np.ascontiguousarray(wavenum),
        np.ascontiguousarray(decay),
        np.ascontiguousarray(phase),
        np.ascontiguousarray(np.cos(phase)),
    )


def height_at(params: TerrainParams, x, y):
    """Surface height at (x, y); accepts scalars or equal-shape arrays."""
    scalar = np.isscalar(x) and np.isscalar(y)
    xf = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel())
    yf = np.ascontiguousarray(np.atleast_1d(np.asarray(y, dtype=np.float64)).ravel())
    if xf.shape != yf.shape:
        raise ParameterDomainError("x and y must have matching shapes")
    amp = amplitude_scale(params)
    if amp == 0.0:
        out = np.zeros_like(xf)
    else:
        kernel = _BACKENDS[_active]
        out = amp * np.asarray(kernel.ridge_sum(xf, yf, *_tables(params)))
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(x))


def generate_patch(
    params: TerrainParams, extent: float, spacing: float
) -> TerrainPatch:
    """Sample the surface on a square lattice [0, extent] x [0, extent].

    The lattice must tile evenly: extent/spacing within 1e-9 of an integer.
    """
    if spacing <= 0 or extent <= 0:
        raise ParameterDomainError("extent and spacing must be > 0")
    steps = extent / spacing
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise ParameterDomainError(
            f"extent {extent} is not an integer multiple of spacing {spacing}"
        )
    npts = int(round(steps)) + 1
    xs = np.arange(npts, dtype=np.float64) * spacing
    ys = np.arange(npts, dtype=np.float64) * spacing
    amp = amplitude_scale(params)
    if amp == 0.0:
        heights = np.zeros((npts, npts))
    else:
        # lattice arguments factor along the axes, so the grid kernel needs
        # O(nx + ny) trig calls per scale term instead of O(nx * ny); its
        # round-off differs slightly from pointwise height_at evaluation
        kernel = _BACKENDS[_active]
        heights = amp * np.asarray(kernel.ridge_sum_grid(xs, ys, *_tables(params)))
    return TerrainPatch(
        params=params,
        spacing=spacing,
        extent=extent,
        xs=xs,
        ys=ys,
        heights=heights,
    )


def rms_height(patch: TerrainPatch) -> float:
    """Root-mean-square height about the patch mean."""
    h = patch.heights
    return float(np.sqrt(np.mean((h - h.mean()) ** 2)))
