"""Microspine grip mechanics.

A spine tip hooks an asperity when two things hold: the asperity is at
least as blunt as the tip (contact radius rule), and the asperity's flank
faces steeply enough that the loaded spine does not slide off (contact
angle rule).  Engaged contacts in simulation draw their capacity from an
empirical band; the contact-stress capacity formula is provided for
sensitivity analysis, with its material prefactor overridable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import ParameterDomainError
from .terrain.params import Asperity

# Empirical per-contact capacity band, newtons.
DEFAULT_CAPACITY_BAND = (1.0, 2.0)


@dataclass(frozen=True)
class SpineSpec:
    """One spine: tip/shaft geometry, load direction, friction, material.

    Angles in radians, lengths in meters, stresses in pascals.
    """

    tip_radius: float = 17.0e-6
    shaft_diameter: float = 250.0e-6
    load_angle: float = math.radians(3.5)
    friction: float = 0.25
    tensile_strength: float = 1.5e9
    elastic_modulus: float = 200.0e9

    def __post_init__(self):
        if self.tip_radius <= 0:
            raise ParameterDomainError(f"tip_radius must be > 0, got {self.tip_radius}")
        if self.shaft_diameter <= 0:
            raise ParameterDomainError(
                f"shaft_diameter must be > 0, got {self.shaft_diameter}"
            )
        if not 0 <= self.load_angle < math.pi / 2:
            raise ParameterDomainError(
                f"load_angle must be in [0, pi/2), got {self.load_angle}"
            )
        if self.friction <= 0:
            raise ParameterDomainError(f"friction must be > 0, got {self.friction}")
        if self.tensile_strength <= 0 or self.elastic_modulus <= 0:
            raise ParameterDomainError("material constants must be > 0")


@dataclass(frozen=True)
class SpineArray:
    """The set of spines on one robot's skin.

    ``area_density`` records attachment density per square meter of skin;
    it is bookkeeping for configs, not used by the engagement rules.
    """

    spines: tuple
    area_density: float = 5000.0

    def __post_init__(self):
        if len(self.spines) == 0:
            raise ParameterDomainError("spine array must not be empty")
        if self.area_density <= 0:
            raise ParameterDomainError(
                f"area_density must be > 0, got {self.area_density}"
            )

    def __len__(self) -> int:
        return len(self.spines)

    @classmethod
    def uniform(
        cls,
        count: int,
        tip_radius_min: float = 12.0e-6,
        tip_radius_max: float = 25.0e-6,
        area_density: float = 5000.0,
        **spec_kwargs,
    ) -> "SpineArray":
        """Array of ``count`` spines with tip radii spanning the given range.

        Radii are spread evenly from min to max inclusive, so every batch
        covers the whole manufacturing tolerance band.
        """
        if count < 1:
            raise ParameterDomainError(f"count must be >= 1, got {count}")
        if not 0 < tip_radius_min <= tip_radius_max:
            raise ParameterDomainError(
                f"need 0 < tip_radius_min <= tip_radius_max, "
                f"got {tip_radius_min}, {tip_radius_max}"
            )
        radii = np.linspace(tip_radius_min, tip_radius_max, count)
        spines = tuple(SpineSpec(tip_radius=float(r), **spec_kwargs) for r in radii)
        return cls(spines=spines, area_density=area_density)


@dataclass
class GripState:
    """Result of one grip attempt: which contacts engaged and their capacities."""

    engaged_count: int
    capacities: np.ndarray  # newtons, one entry per engaged contact

    def __post_init__(self):
        self.capacities = np.asarray(self.capacities, dtype=np.float64)
        if self.engaged_count != self.capacities.size:
            raise ParameterDomainError(
                f"engaged_count {self.engaged_count} != "
                f"len(capacities) {self.capacities.size}"
            )
        if np.any(self.capacities < 0):
            raise ParameterDomainError("capacities must be non-negative")

    @property
    def total_capacity(self) -> float:
        return float(self.capacities.sum())

    def to_json(self) -> dict:
        return {
            "engaged_count": self.engaged_count,
            "capacities": [float(c) for c in self.capacities],
            "total_capacity": self.total_capacity,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GripState":
        return cls(
            engaged_count=int(doc["engaged_count"]),
            capacities=np.asarray(doc["capacities"], dtype=np.float64),
        )


def min_engagement_angle(spec: SpineSpec) -> float:
    """Smallest asperity flank angle the spine can hold without sliding.

    theta_min = load_angle + arccot(friction); radians.
    """
    return spec.load_angle + math.atan(1.0 / spec.friction)


def max_spine_load(spec: SpineSpec, asperity: Asperity, kappa: float | None = None) -> float:
    """Contact-stress load capacity of one spine/asperity pair, newtons.

    Uses the effective contact radius 1/R = 1/r_spine + 1/r_asperity and a
    cubic stress prefactor kappa derived from the spine material; pass
    ``kappa`` to override the material value.  Sensitivity-analysis API:
    simulated capacities come from the empirical band instead.
    """
    if kappa is None:
        if spec.friction >= 0.5:
            raise ParameterDomainError(
                "material prefactor undefined for friction >= 0.5; pass kappa"
            )
        kappa = (
            math.pi * spec.tensile_strength / (1.0 - 2.0 * spec.friction)
        ) ** 3 / (2.0 * spec.elastic_modulus**2)
    if kappa <= 0:
        raise ParameterDomainError(f"kappa must be > 0, got {kappa}")
    radius = 1.0 / (1.0 / spec.tip_radius + 1.0 / asperity.tip_radius)
    return kappa * radius * radius


def can_engage(spec: SpineSpec, asperity: Asperity) -> bool:
    """True when the spine can hook the asperity: blunt enough and steep enough."""
    return (
        asperity.tip_radius >= spec.tip_radius
        and asperity.normal_angle >= min_engagement_angle(spec)
    )


def engagement_fractions(array: SpineArray, asperities) -> np.ndarray:
    """Per-spine fraction of the asperity population it can engage."""
    if len(asperities) == 0:
        return np.zeros(len(array))
    radii = np.array([a.tip_radius for a in asperities])
    angles = np.array([a.normal_angle for a in asperities])
    out = np.empty(len(array))
    for k, spec in enumerate(array.spines):
        ok = (radii >= spec.tip_radius) & (angles >= min_engagement_angle(spec))
        out[k] = ok.mean()
    return out


def sample_grip(
    array: SpineArray,
    asperities,
    seed,
    capacity_band: tuple = DEFAULT_CAPACITY_BAND,
) -> GripState:
    """Sample one landing's grip against an asperity population.

    Each spine drags across the surface and lands on one asperity drawn
    uniformly from the census; it engages iff that pairing passes
    ``can_engage``.  Engaged contacts draw capacity uniformly from
    ``capacity_band``.  ``seed`` is an int or a numpy Generator.
    """
    lo, hi = capacity_band
    if not 0 <= lo <= hi:
        raise ParameterDomainError(f"bad capacity band {capacity_band}")
    gen = seed if isinstance(seed, np.random.Generator) else rng.stream(seed, "grip")
    if len(asperities) == 0:
        return GripState(engaged_count=0, capacities=np.empty(0))
    radii = np.array([a.tip_radius for a in asperities])
    angles = np.array([a.normal_angle for a in asperities])
    picks = gen.integers(0, len(asperities), size=len(array))
    engaged = np.array(
        [
            radii[p] >= spec.tip_radius
            and angles[p] >= min_engagement_angle(spec)
            for p, spec in zip(picks, array.spines)
        ]
    )
    count = int(engaged.sum())
    capacities = gen.uniform(lo, hi, size=count)
    return GripState(engaged_count=count, capacities=capacities)
