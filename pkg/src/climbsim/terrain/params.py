"""Terrain parameter and data types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterDomainError


@dataclass(frozen=True)
class TerrainParams:
    """Parameters of the multiscale ridge-superposition surface.

    The surface is a weighted sum of cosine ridges over ``ridge_count``
    orientations and geometrically spaced spatial frequencies
    ``freq_scale**n / sample_length`` for ``n = 0 .. max_freq_index``.

    Attributes
    ----------
    fractal_dim : float
        Surface fractal dimension, strictly between 2 and 3.
    roughness_amp : float
        Amplitude parameter G in meters; 0 gives a perfectly flat surface.
    sample_length : float
        Longest spatial wavelength L in meters.
    freq_scale : float
        Frequency ratio between successive scales, > 1.
    ridge_count : int
        Number of ridge orientations M, >= 1.
    max_freq_index : int
        Highest frequency index n_max, >= 0.
    phase_seed : int
        Seed of the counter-based stream the ridge phases are drawn from.
    """

    fractal_dim: float = 2.5
    roughness_amp: float = 1.0e-5
    sample_length: float = 1.0e-3
    freq_scale: float = 1.5
    ridge_count: int = 10
    max_freq_index: int = 12
    phase_seed: int = 0

    def __post_init__(self):
        if not 2.0 < self.fractal_dim < 3.0:
            raise ParameterDomainError(
                f"fractal_dim must be in (2, 3), got {self.fractal_dim}"
            )
        if self.roughness_amp < 0:
            raise ParameterDomainError(
                f"roughness_amp must be >= 0, got {self.roughness_amp}"
            )
        if self.sample_length <= 0:
            raise ParameterDomainError(
                f"sample_length must be > 0, got {self.sample_length}"
            )
        if self.freq_scale <= 1.0:
            raise ParameterDomainError(
                f"freq_scale must be > 1, got {self.freq_scale}"
            )
        if self.ridge_count < 1:
            raise ParameterDomainError(
                f"ridge_count must be >= 1, got {self.ridge_count}"
            )
        if self.max_freq_index < 0:
            raise ParameterDomainError(
                f"max_freq_index must be >= 0, got {self.max_freq_index}"
            )


@dataclass
class TerrainPatch:
    """A sampled square patch of synthetic terrain.

    ``heights[i, j]`` is the surface height at ``(x=xs[j], y=ys[i])``.
    """

    params: TerrainParams
    spacing: float
    extent: float
    xs: np.ndarray
    ys: np.ndarray
    heights: np.ndarray

    def __post_init__(self):
        if self.spacing <= 0:
            raise ParameterDomainError(f"spacing must be > 0, got {self.spacing}")
        if self.extent <= 0:
            raise ParameterDomainError(f"extent must be > 0, got {self.extent}")
        ny, nx = self.heights.shape
        if nx != self.xs.size or ny != self.ys.size:
            raise ParameterDomainError(
                f"heights shape {self.heights.shape} does not match "
                f"axes ({self.ys.size}, {self.xs.size})"
            )
        expected = round(self.extent / self.spacing) + 1
        if nx != expected or ny != expected:
            raise ParameterDomainError(
                f"grid {ny}x{nx} inconsistent with extent/spacing (expected {expected})"
            )
        if not np.all(np.isfinite(self.heights)):
            raise ParameterDomainError("heights contain non-finite values")

    @property
    def shape(self) -> tuple:
        return self.heights.shape


@dataclass(frozen=True)
class Asperity:
    """A surface bump a spine could hook: position, tip radius, flank angle.

    ``normal_angle`` is the angle in radians between the steepest flank
    facet's normal and the mean surface normal; ``tip_radius`` comes from
    the paraboloid curvature of the 3x3 neighborhood around the peak.
    """

    x: float
    y: float
    z: float
    tip_radius: float
    normal_angle: float

    def __post_init__(self):
        if self.tip_radius <= 0:
            raise ParameterDomainError(
                f"tip_radius must be > 0, got {self.tip_radius}"
            )
        if not 0.0 <= self.normal_angle <= np.pi:
            raise ParameterDomainError(
                f"normal_angle must be in [0, pi], got {self.normal_angle}"
            )
