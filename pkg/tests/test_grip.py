import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from climbsim import rng
from climbsim.errors import ParameterDomainError
from climbsim.grip import (
    DEFAULT_CAPACITY_BAND,
    GripState,
    SpineArray,
    SpineSpec,
    can_engage,
    engagement_fractions,
    max_spine_load,
    min_engagement_angle,
    sample_grip,
)
from climbsim.terrain import Asperity, extract_asperities


def spec(load_deg, friction):
    return SpineSpec(load_angle=math.radians(load_deg), friction=friction)


def test_min_engagement_angle_handbook_points():
    assert math.degrees(min_engagement_angle(spec(5.0, 0.15))) == pytest.approx(
        86.47, abs=0.1
    )
    assert math.degrees(min_engagement_angle(spec(5.0, 0.25))) == pytest.approx(
        80.96, abs=0.1
    )
    assert math.degrees(min_engagement_angle(spec(3.5, 0.25))) == pytest.approx(
        79.46, abs=0.1
    )


@settings(max_examples=40, deadline=None)
@given(
    load=st.floats(0.5, 15.0),
    mu_lo=st.floats(0.05, 0.6),
    extra=st.floats(0.01, 0.5),
)
def test_more_friction_lowers_the_threshold(load, mu_lo, extra):
    steep = min_engagement_angle(spec(load, mu_lo))
    shallow = min_engagement_angle(spec(load, mu_lo + extra))
    assert shallow < steep


def asperity(angle_deg, radius=20e-6):
    return Asperity(x=0, y=0, z=0, tip_radius=radius, normal_angle=math.radians(angle_deg))


def test_can_engage_threshold():
    s = spec(3.5, 0.25)  # threshold 79.46 deg
    assert can_engage(s, asperity(85.0))
    assert not can_engage(s, asperity(70.0))


def test_max_spine_load_positive_and_kappa_scales():
    s = SpineSpec()
    a = asperity(85.0)
    assert max_spine_load(s, a) > 0
    # capacity is linear in the stress prefactor and quadratic in the
    # effective contact radius
    one = max_spine_load(s, a, kappa=1.0)
    assert max_spine_load(s, a, kappa=2.0) == pytest.approx(2.0 * one, rel=1e-12)
    blunt = asperity(85.0, radius=40.0e-6)
    assert max_spine_load(s, blunt, kappa=1.0) > one


def test_engagement_fraction_bounds(rough_patch):
    asperities = extract_asperities(rough_patch)
    fractions = engagement_fractions(SpineArray.uniform(48), asperities)
    assert fractions.shape == (48,)
    assert np.all(fractions >= 0.0) and np.all(fractions <= 1.0)
    assert 0.0 < fractions.mean() < 1.0


def test_sample_grip_deterministic(rough_patch):
    asperities = extract_asperities(rough_patch)
    array = SpineArray.uniform(48)
    a = sample_grip(array, asperities, rng.stream(3, "grip"))
    b = sample_grip(array, asperities, rng.stream(3, "grip"))
    assert a.engaged_count == b.engaged_count
    assert np.array_equal(a.capacities, b.capacities)


def test_sample_grip_capacity_band(rough_patch):
    asperities = extract_asperities(rough_patch)
    array = SpineArray.uniform(200)
    grip = sample_grip(array, asperities, rng.stream(9, "grip"))
    lo, hi = DEFAULT_CAPACITY_BAND
    assert 0 < grip.engaged_count <= 200
    assert np.all(grip.capacities >= lo) and np.all(grip.capacities <= hi)
    assert grip.total_capacity == pytest.approx(grip.capacities.sum())
    assert grip.capacities.mean() == pytest.approx(1.5, abs=0.1)


def test_grip_state_validation():
    with pytest.raises(ParameterDomainError):
        GripState(engaged_count=2, capacities=np.array([1.0]))
    with pytest.raises(ParameterDomainError):
        GripState(engaged_count=1, capacities=np.array([-1.0]))


def test_grip_state_json_round_trip():
    state = GripState(engaged_count=2, capacities=np.array([1.25, 1.75]))
    back = GripState.from_json(state.to_json())
    assert back.engaged_count == 2
    assert np.array_equal(back.capacities, state.capacities)


def test_uniform_array_spans_radius_range():
    array = SpineArray.uniform(48)
    radii = np.array([s.tip_radius for s in array.spines])
    assert radii.min() == pytest.approx(12e-6)
    assert radii.max() == pytest.approx(25e-6)
    assert len(array) == 48
