"""Pinhole cameras, stereo ranging, and hop-target selection.

A camera maps homogeneous world points through s * m = A [R | T] M: the
extrinsics [R | T] bring the point into the camera frame, the intrinsic
matrix A scales it to pixels, and the depth s is divided out.  A stereo
pair back-projects a matched pixel pair into two rays and ranges the
obstacle at their midpoint.

Hop-target selection stays deliberately small: among candidate grip
points (surveyed or triangulated), take the nearest one up-slope within
hop range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterDomainError, PlanningError, ProjectionDomainError

_ORTHO_TOL = 1.0e-9
_PARALLEL_TOL = 1.0e-12  # on |d1 x d2|^2 with unit ray directions


@dataclass(frozen=True)
class CameraModel:
    """Calibrated pinhole camera: intrinsics A, world-to-camera [R | T]."""

    intrinsics: np.ndarray
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.intrinsics, dtype=np.float64)
        R = np.asarray(self.rotation, dtype=np.float64)
        T = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if A.shape != (3, 3) or R.shape != (3, 3):
            raise ParameterDomainError("intrinsics and rotation must be 3x3")
        lower = np.abs(A[np.tril_indices(3, k=-1)])
        if lower.max(initial=0.0) != 0.0:
            raise ParameterDomainError("intrinsics must be upper-triangular")
        if A[0, 0] <= 0 or A[1, 1] <= 0 or A[2, 2] <= 0:
            raise ParameterDomainError("intrinsic diagonal must be positive")
        if not np.allclose(R @ R.T, np.eye(3), atol=_ORTHO_TOL):
            raise ParameterDomainError("rotation must be orthonormal")
        if abs(float(np.linalg.det(R)) - 1.0) > _ORTHO_TOL:
            raise ParameterDomainError("rotation must have determinant +1")
        object.__setattr__(self, "intrinsics", A)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", T)

    @classmethod
    def pinhole(
        cls,
        fx: float,
        fy: Optional[float] = None,
        cx: float = 0.0,
        cy: float = 0.0,
        skew: float = 0.0,
        rotation=None,
        translation=(0.0, 0.0, 0.0),
    ) -> "CameraModel":
        """Standard 5-parameter intrinsic form."""
        fy = fx if fy is None else fy
        A = np.array([[fx, skew, cx], [0.0, fy, cy], [0.0, 0.0, 1.0]])
        R = np.eye(3) if rotation is None else rotation
        return cls(intrinsics=A, rotation=R, translation=np.asarray(translation, float))

    @property
    def center(self) -> np.ndarray:
        """Camera center in world coordinates."""
        return -self.rotation.T @ self.translation


def project_homogeneous(camera: CameraModel, world_h) -> np.ndarray:
    """Project a homogeneous world point (4-vector) to a pixel.

    Scale-invariant by construction: the projective scale divides out,
    so M and lambda * M (lambda > 0) land on the same pixel.
    """
    M = np.asarray(world_h, dtype=np.float64).reshape(4)
    if M[3] <= 0.0:
        raise ProjectionDomainError(f"homogeneous weight must be > 0, got {M[3]}")
    extrinsic = np.hstack([camera.rotation, camera.translation.reshape(3, 1)])
    m = camera.intrinsics @ (extrinsic @ M)
    if m[2] <= 0.0:
        raise ProjectionDomainError(
            "point is on or behind the camera plane (non-positive depth)"
        )
    return m[:2] / m[2]


def project(camera: CameraModel, world_point) -> np.ndarray:
    """Project a 3D world point to a pixel; positive depth required."""
    p = np.asarray(world_point, dtype=np.float64).reshape(3)
    return project_homogeneous(camera, np.append(p, 1.0))


@dataclass(frozen=True)
class StereoRig:
    """Two calibrated cameras observing the same scene."""

    left: CameraModel
    right: CameraModel

    @classmethod
    def rectified(
        cls, fx: float, baseline: float, cx: float = 0.0, cy: float = 0.0
    ) -> "StereoRig":
        """Identical parallel cameras separated by ``baseline`` along +x."""
        if baseline <= 0:
            raise ParameterDomainError(f"baseline must be > 0, got {baseline}")
        left = CameraModel.pinhole(fx, cx=cx, cy=cy)
        right = CameraModel.pinhole(fx, cx=cx, cy=cy, translation=(-baseline, 0.0, 0.0))
        return cls(left=left, right=right)


@dataclass(frozen=True)
class TriangulationResult:
    point: np.ndarray  # world coordinates of the ray midpoint
    degenerate: bool  # near-parallel rays: range is low-confidence
    ray_gap: float  # closest-approach distance between the rays, m


def _back_project(camera: CameraModel, pixel) -> np.ndarray:
    u, v = np.asarray(pixel, dtype=np.float64).reshape(2)
    d = camera.rotation.T @ np.linalg.solve(
        camera.intrinsics, np.array([u, v, 1.0])
    )
    return d / float(np.linalg.norm(d))


def triangulate(rig: StereoRig, pixel_left, pixel_right) -> TriangulationResult:
    """Midpoint triangulation of the two back-projected pixel rays.

    Solves for the closest points on each ray and returns their midpoint.
    Near-parallel rays make the system singular; the result is then
    computed by least squares and flagged low-confidence.
    """
    c1, c2 = rig.left.center, rig.right.center
    d1 = _back_project(rig.left, pixel_left)
    d2 = _back_project(rig.right, pixel_right)
    b = c2 - c1
    d12 = float(np.dot(d1, d2))
    det = 1.0 - d12 * d12  # = |d1 x d2|^2 for unit directions
    rhs = np.array([np.dot(b, d1), np.dot(b, d2)])
    mat = np.array([[1.0, -d12], [d12, -1.0]])
    degenerate = det < _PARALLEL_TOL
    if degenerate:
        t = np.linalg.lstsq(mat, rhs, rcond=None)[0]
    else:
        t = np.linalg.solve(mat, rhs)
    p1 = c1 + t[0] * d1
    p2 = c2 + t[1] * d2
    return TriangulationResult(
        point=0.5 * (p1 + p2),
        degenerate=degenerate,
        ray_gap=float(np.linalg.norm(p1 - p2)),
    )


def obstacle_distance(rig: StereoRig, pixel_left, pixel_right):
    """Range from the left camera center to the matched feature.

    Returns (range_m, degenerate); a degenerate result means the rays
    were near-parallel and the range is low-confidence.
    """
    result = triangulate(rig, pixel_left, pixel_right)
    return float(np.linalg.norm(result.point - rig.left.center)), result.degenerate


# ---------------------------------------------------------------------------
# hop-target selection over candidate grip points

def select_hop_target(
    candidates, current_position, hop_range: float, min_rise: float = 0.0
) -> int:
    """Index of the nearest candidate up-slope within hop range.

    A candidate qualifies when it sits more than ``min_rise`` above the
    current position and within ``hop_range`` of it.  Ties go to the
    lowest index.  No qualifying candidate raises a planning error
    carrying the nearest up-slope distance as the reach diagnostic.
    """
    points = np.asarray(candidates, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 3 or points.shape[0] == 0:
        raise ParameterDomainError("candidates must be a non-empty (n, 3) array")
    if hop_range <= 0:
        raise ParameterDomainError(f"hop_range must be > 0, got {hop_range}")
    origin = np.asarray(current_position, dtype=np.float64).reshape(3)
    rises = points[:, 2] - origin[2]
    distances = np.linalg.norm(points - origin, axis=1)
    up = rises > min_rise
    if not np.any(up):
        raise PlanningError("no candidate grip point up-slope", max_reach=0.0)
    qualifying = up & (distances <= hop_range)
    if not np.any(qualifying):
        nearest = float(distances[up].min())
        raise PlanningError(
            f"nearest up-slope grip point is {nearest:.3f} m away, "
            f"hop range is {hop_range:.3f} m",
            max_reach=nearest,
        )
    masked = np.where(qualifying, distances, np.inf)
    return int(np.argmin(masked))


def points_to_csv(path, points, provenance=None) -> None:
    points = np.asarray(points, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for key in sorted(provenance or {}):
            fh.write(f"# {key}: {provenance[key]}\n")
        fh.write("x,y,z\n")
        for row in points:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_points(path) -> np.ndarray:
    rows = np.loadtxt(path, delimiter=",", skiprows=_header_rows(path), ndmin=2)
    return rows.reshape(-1, 3)


def _header_rows(path) -> int:
    count = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or line.strip() == "x,y,z":
                count += 1
            else:
                break
    return count
