import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from climbsim.errors import (
    ParameterDomainError,
    PlanningError,
    ProjectionDomainError,
)
from climbsim.perception import (
    CameraModel,
    StereoRig,
    load_points,
    obstacle_distance,
    points_to_csv,
    project,
    project_homogeneous,
    select_hop_target,
    triangulate,
)

RIG = StereoRig.rectified(fx=800.0, baseline=0.5)


def test_principal_axis_projects_to_principal_point():
    camera = CameraModel.pinhole(600.0, cx=320.0, cy=240.0)
    assert np.allclose(project(camera, [0.0, 0.0, 4.0]), [320.0, 240.0])


def test_similar_triangles():
    camera = CameraModel.pinhole(600.0)
    pixel = project(camera, [1.0, 0.5, 2.0])
    assert np.allclose(pixel, [300.0, 150.0])


def test_homogeneous_scale_invariance_exact():
    camera = CameraModel.pinhole(512.0, cx=64.0, cy=32.0)
    world = np.array([0.75, -0.25, 3.0, 1.0])
    a = project_homogeneous(camera, world)
    b = project_homogeneous(camera, world * 8.0)  # power of two: exact floats
    assert np.array_equal(a, b)


def test_negative_depth_rejected():
    camera = CameraModel.pinhole(600.0)
    with pytest.raises(ProjectionDomainError):
        project(camera, [0.0, 0.0, -1.0])


def test_camera_matrix_validation():
    bad_intrinsics = np.array([[600.0, 0, 0], [1.0, 600.0, 0], [0, 0, 1.0]])
    with pytest.raises(ParameterDomainError):
        CameraModel(intrinsics=bad_intrinsics, rotation=np.eye(3), translation=np.zeros(3))
    with pytest.raises(ParameterDomainError):
        CameraModel(
            intrinsics=np.diag([600.0, 600.0, 1.0]),
            rotation=np.eye(3) * 2.0,
            translation=np.zeros(3),
        )


def test_round_trip_identity():
    points = np.array(
        [[0.3, -0.2, 2.5], [1.0, 0.8, 4.0], [-0.7, 0.1, 6.0], [0.0, 0.0, 3.0]]
    )
    for point in points:
        res = triangulate(RIG, project(RIG.left, point), project(RIG.right, point))
        assert not res.degenerate
        assert np.linalg.norm(res.point - point) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(
    x=st.floats(-1.5, 1.5),
    y=st.floats(-1.0, 1.0),
    z=st.floats(1.0, 9.0),
)
def test_round_trip_property(x, y, z):
    point = np.array([x, y, z])
    res = triangulate(RIG, project(RIG.left, point), project(RIG.right, point))
    assert np.linalg.norm(res.point - point) <= 1e-8


def test_parallel_rays_flagged_degenerate():
    # same pixel in both cameras: rays never cross (zero disparity)
    res = triangulate(RIG, np.array([10.0, 5.0]), np.array([10.0, 5.0]))
    assert res.degenerate


def test_obstacle_distance_matches_depth():
    point = np.array([0.4, -0.1, 5.0])
    rng_m, degenerate = obstacle_distance(
        RIG, project(RIG.left, point), project(RIG.right, point)
    )
    assert not degenerate
    assert rng_m == pytest.approx(np.linalg.norm(point), rel=1e-9)


def test_noise_benchmark_median_range_error():
    rng = np.random.default_rng(4)
    errors = []
    for _ in range(200):
        point = np.array(
            [rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(2.0, 6.0)]
        )
        noisy_l = project(RIG.left, point) + rng.normal(0.0, 0.5, 2)
        noisy_r = project(RIG.right, point) + rng.normal(0.0, 0.5, 2)
        res = triangulate(RIG, noisy_l, noisy_r)
        truth = np.linalg.norm(point)
        errors.append(abs(np.linalg.norm(res.point) - truth) / truth)
    assert np.median(errors) < 0.02


def test_select_hop_target_prefers_nearest_upslope():
    candidates = np.array(
        [[0.0, 0.0, 2.0], [0.2, 0.1, 0.8], [1.0, 0.2, 3.5], [4.0, 0.0, 1.0]]
    )
    origin = np.zeros(3)
    chosen = select_hop_target(candidates, origin, hop_range=3.0, min_rise=0.5)
    assert chosen == 1  # nearest of the two qualifying up-slope points


def test_select_hop_target_exhausted_raises():
    candidates = np.array([[0.0, 0.0, 9.0]])
    with pytest.raises(PlanningError) as info:
        select_hop_target(candidates, np.zeros(3), hop_range=1.0, min_rise=0.5)
    assert info.value.max_reach == pytest.approx(9.0)


def test_points_csv_round_trip(tmp_path):
    points = np.array([[0.1, 0.2, 0.3], [1.0, 2.0, 3.0]])
    path = tmp_path / "points.csv"
    points_to_csv(path, points, provenance={"seed": 1})
    assert np.allclose(load_points(path), points, atol=1e-12)
