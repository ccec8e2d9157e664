"""Low-level geometry helpers on S^2, S^3 and R^4.

Conventions used throughout the package:

  * points on spheres are unit numpy vectors (1d arrays),
  * angles and arc lengths are radians,
  * a "great 2-sphere" of S^3 is the intersection of S^3 with a linear
    hyperplane through the origin; a face lying on one is called planar.
"""

from __future__ import annotations

import numpy as np

# Interior angle of every admissible polygon corner (three sheets at equal
# angles force this value) and the matching dihedral 2*pi/3.
ALPHA = float(np.arccos(-1.0 / 3.0))
DIHEDRAL = 2.0 * np.pi / 3.0

EPS = 1e-12


def normalize(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / n


def arc(u, v):
    """Geodesic distance between unit vectors (any common dimension)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    d = np.clip(np.sum(u * v, axis=-1), -1.0, 1.0)
    return np.arccos(d)


def tangent(at, towards):
    """Unit tangent at `at` pointing along the geodesic to `towards`."""
    at = np.asarray(at, dtype=float)
    t = np.asarray(towards, dtype=float) - np.dot(towards, at) * at
    n = np.linalg.norm(t)
    if n < EPS:
        raise ValueError("tangent undefined for equal or antipodal points")
    return t / n


def spherical_angle(apex, p, q):
    """Interior angle at `apex` of the geodesic wedge through p and q."""
    tp = tangent(apex, p)
    tq = tangent(apex, q)
    return float(np.arccos(np.clip(np.dot(tp, tq), -1.0, 1.0)))


def geodesic_point(u, v, t):
    """Point at parameter t in [0,1] along the geodesic from u to v."""
    th = arc(u, v)
    if th < EPS:
        return normalize(u)
    return (np.sin((1.0 - t) * th) * np.asarray(u, float)
            + np.sin(t * th) * np.asarray(v, float)) / np.sin(th)


def rotation_from_axes(axis_a, axis_b, angle):
    """Rotation of R^n by `angle` in the oriented plane span(axis_a, axis_b).

    The two axes must be orthonormal; vectors orthogonal to the plane are
    fixed.
    """
    a = np.asarray(axis_a, dtype=float)
    b = np.asarray(axis_b, dtype=float)
    n = len(a)
    eye = np.eye(n)
    c, s = np.cos(angle), np.sin(angle)
    outer_aa = np.outer(a, a)
    outer_bb = np.outer(b, b)
    outer_ab = np.outer(a, b)
    outer_ba = np.outer(b, a)
    return (eye - outer_aa - outer_bb
            + c * (outer_aa + outer_bb) + s * (outer_ba - outer_ab))


def random_rotation(dim, rng):
    """Haar-random rotation matrix from a seeded Generator."""
    m = rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(m)
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def sample_sphere(n, dim, rng):
    """n uniform points on S^(dim-1) as an (n, dim) array."""
    x = rng.normal(size=(n, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def planarity_residual(points):
    """Distance of a point set from the best central hyperplane.

    Returns the smallest singular value of the stacked coordinates; zero
    means all points lie on one great sphere of S^3 (or great circle of
    S^2).
    """
    m = np.asarray(points, dtype=float)
    return float(np.linalg.svd(m, compute_uv=False)[-1])


def plane_normal(points):
    """Unit normal of the best-fit central hyperplane through the points."""
    m = np.asarray(points, dtype=float)
    _, _, vt = np.linalg.svd(m)
    return vt[-1]


def polygon_angles(vertices):
    """Interior angles of a spherical polygon given in cyclic order."""
    vs = [np.asarray(v, float) for v in vertices]
    n = len(vs)
    return [spherical_angle(vs[i], vs[(i - 1) % n], vs[(i + 1) % n])
            for i in range(n)]


def polygon_sides(vertices):
    """Side arc lengths of a spherical polygon in cyclic order."""
    vs = np.asarray(vertices, dtype=float)
    n = len(vs)
    return [float(arc(vs[i], vs[(i + 1) % n])) for i in range(n)]


def colat_long(colat, lon):
    """Point of S^2 at given colatitude from +z and longitude from +x."""
    return np.array([np.sin(colat) * np.cos(lon),
                     np.sin(colat) * np.sin(lon),
                     np.cos(colat)])


def embed_s2(u, radius_angle, pole=None):
    """Point of S^3 at geodesic distance radius_angle from the pole along u.

    `u` is a unit vector of S^2 giving the direction in the link of the
    pole (0,0,0,1); a different pole may be passed as a 4-vector together
    with an orthonormal frame -- not needed here, cells are built around
    the standard pole and rotated afterwards.
    """
    u = np.asarray(u, dtype=float)
    p = np.zeros(4)
    p[:3] = np.sin(radius_angle) * u
    p[3] = np.cos(radius_angle)
    return p


def frame_for_pole(pole):
    """Orthonormal 4x4 matrix whose last column is `pole`."""
    pole = normalize(pole)
    m = np.eye(4)
    idx = int(np.argmax(np.abs(pole)))
    cols = [i for i in range(4) if i != idx]
    basis = [pole] + [m[i] for i in cols]
    q = np.zeros((4, 4))
    acc = []
    for v in basis:
        w = np.array(v, dtype=float)
        for a in acc:
            w -= np.dot(w, a) * a
        w /= np.linalg.norm(w)
        acc.append(w)
    q[:, 3] = acc[0]
    for k in range(3):
        q[:, k] = acc[k + 1]
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
