"""Rigid 4x4 homogeneous transforms.

Angles are degrees at the public boundary and radians internally. Rotation
matrices built from degree angles snap entries within 1e-12 of 0 or +-1 so
that axis-aligned designs stay exact through long placement chains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from flatpack.exceptions import GeometryError
from flatpack.geometry.base import EPS_ANGLE

_SNAP = 1e-12


def _snap(m: np.ndarray) -> np.ndarray:
    out = np.array(m, dtype=float)
    for target in (0.0, 1.0, -1.0):
        out[np.abs(out - target) < _SNAP] = target
    return out


@dataclass(frozen=True, eq=False)
class Transform:
    """Rigid-body transform; rotation block orthonormal with det +1."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise GeometryError(f"Transform needs a 4x4 matrix, got {m.shape}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    # ---- Constructors ----

    @classmethod
    def identity(cls) -> Transform:
        return cls(np.eye(4))

    @classmethod
    def translation(cls, x: float, y: float, z: float) -> Transform:
        m = np.eye(4)
        m[:3, 3] = (x, y, z)
        return cls(m)

    @classmethod
    def from_rotation(cls, rotation: np.ndarray, origin=(0.0, 0.0, 0.0)) -> Transform:
        m = np.eye(4)
        m[:3, :3] = rotation
        m[:3, 3] = origin
        return cls(m)

    @classmethod
    def from_frame(cls, origin, x_axis, y_axis, z_axis) -> Transform:
        """Transform whose columns are the given frame axes and origin."""
        rot = np.column_stack([x_axis, y_axis, z_axis])
        return cls.from_rotation(rot, origin)

    @classmethod
    def rot_x(cls, degrees: float) -> Transform:
        c, s = np.cos(np.radians(degrees)), np.sin(np.radians(degrees))
        return cls.from_rotation(_snap(np.array([[1, 0, 0], [0, c, -s], [0, s, c]])))

    @classmethod
    def rot_y(cls, degrees: float) -> Transform:
        c, s = np.cos(np.radians(degrees)), np.sin(np.radians(degrees))
        return cls.from_rotation(_snap(np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])))

    @classmethod
    def rot_z(cls, degrees: float) -> Transform:
        c, s = np.cos(np.radians(degrees)), np.sin(np.radians(degrees))
        return cls.from_rotation(_snap(np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])))

    @classmethod
    def rot_xyz(cls, rx: float, ry: float, rz: float) -> Transform:
        """Intrinsic rotation about x, then the new y, then the new z."""
        return cls.rot_x(rx) @ cls.rot_y(ry) @ cls.rot_z(rz)

    # ---- Algebra ----

    @property
    def rotation(self) -> np.ndarray:
        return self.matrix[:3, :3]

    @property
    def origin(self) -> np.ndarray:
        return self.matrix[:3, 3]

    def __matmul__(self, other: Transform) -> Transform:
        return transform_compose(self, other)

    def inverse(self) -> Transform:
        return transform_invert(self)

    def apply(self, points) -> np.ndarray:
        """Map (N, 3) points, or (N, 2) points lying on the local z=0 plane."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] == 2:
            pts = np.column_stack([pts, np.zeros(len(pts))])
        return pts @ self.rotation.T + self.origin

    def apply_vector(self, vectors) -> np.ndarray:
        return np.atleast_2d(np.asarray(vectors, dtype=float)) @ self.rotation.T

    def is_rigid(self, tol: float = EPS_ANGLE) -> bool:
        r = self.rotation
        return (
            np.allclose(r.T @ r, np.eye(3), atol=tol)
            and abs(np.linalg.det(r) - 1.0) < tol
            and np.array_equal(self.matrix[3], [0.0, 0.0, 0.0, 1.0])
        )

    def orthonormalized(self) -> Transform:
        """Project the rotation block back onto SO(3) via SVD."""
        u, _, vt = np.linalg.svd(self.rotation)
        r = u @ vt
        if np.linalg.det(r) < 0:
            u[:, -1] *= -1
            r = u @ vt
        return Transform.from_rotation(r, self.origin)

    def max_deviation(self, other: Transform) -> float:
        return float(np.max(np.abs(self.matrix - other.matrix)))

    def almost_equal(self, other: Transform, tol: float = 1e-6) -> bool:
        return self.max_deviation(other) <= tol

    def __repr__(self) -> str:
        return f"Transform({np.array2string(self.matrix, precision=4)})"


def transform_compose(t1: Transform, t2: Transform) -> Transform:
    """Return t1 . t2 (apply t2 first, then t1)."""
    m = t1.matrix @ t2.matrix
    m[3] = (0.0, 0.0, 0.0, 1.0)
    return Transform(m)


def transform_invert(t: Transform) -> Transform:
    """Closed-form rigid inverse: (R, p) -> (R^T, -R^T p)."""
    rt = t.rotation.T
    return Transform.from_rotation(rt, -rt @ t.origin)
