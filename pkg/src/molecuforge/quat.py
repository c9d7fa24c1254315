"""Unit-quaternion helpers, scalar-first (w, x, y, z).

Small on purpose: the engine only needs composition, vector rotation,
axis-angle construction, and the minimal-arc rotation between two
directions. Everything returns fresh float64 arrays.
"""

from __future__ import annotations

import numpy as np

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])


def identity() -> np.ndarray:
    return IDENTITY.copy()


def normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


def multiply(a, b) -> np.ndarray:
    """Hamilton product a*b (apply b first, then a)."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def conjugate(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([w, -x, -y, -z])


def rotate(q, v) -> np.ndarray:
    """Rotate vector(s) v by unit quaternion q.

    Accepts a single 3-vector or an (n, 3) array.
    """
    v = np.asarray(v, dtype=float)
    w = q[0]
    u = np.asarray(q[1:4], dtype=float)
    t = 2.0 * np.cross(u, v)
    return v + w * t + np.cross(u, t)


def from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) * axis))


def perpendicular_unit(u) -> np.ndarray:
    """A deterministic unit vector perpendicular to unit vector u."""
    k = int(np.argmin(np.abs(u)))
    e = np.zeros(3)
    e[k] = 1.0
    w = e - u * u[k]
    return w / np.linalg.norm(w)


def rotation_between(u, v) -> np.ndarray:
    """Minimal-angle rotation taking unit vector u onto unit vector v.

    For antiparallel inputs the axis is chosen deterministically among
    the perpendicular directions.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w = 1.0 + float(np.dot(u, v))
    if w < 1e-12:
        axis = perpendicular_unit(u)
        return np.concatenate(([0.0], axis))
    return normalize(np.concatenate(([w], np.cross(u, v))))
