"""Spherical trigonometry of isogonal polygons on S^2.

Every polygon bounding a face of an admissible cell has all interior
angles equal to ALPHA = arccos(-1/3); the side lengths then satisfy
rigid closure constraints.  This module provides the closed forms for
the regular families and the rectangle relation, an exact closure test
for arbitrary side lists, and the solver for the one-parameter family
of mirror-symmetric pentagons.

Closure is formulated as a product of rotations of S^2: walk each side
along a geodesic, turn by the exterior angle at each vertex; the walk
closes up iff the composed rotation is the identity.  This is
coordinate-free and also doubles as the constructor for explicit vertex
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ALPHA, normalize, polygon_angles, polygon_sides

TAN_HALF_PRODUCT = 1.0 / 3.0  # cos(pi - ALPHA); governs rectangle sides

# Side classes of the mirror-symmetric pentagon (t, u, v, v, u):
# base t, the two lower legs u adjacent to the base, the two upper legs v
# meeting at the apex.
BASE, LOWER_LEG, UPPER_LEG = "base", "lower-leg", "upper-leg"

_SIDE_MIN = 1e-6          # degenerate-input cutoff for side lengths
_CLOSURE_TOL = 1e-9


class NoSolution(Exception):
    """No closed polygon with the requested data in the search domain."""


class AmbiguousSolution(Exception):
    """More than one feasible closed polygon matches the pinned side."""


def alpha() -> float:
    """The admissible vertex angle arccos(-1/3)."""
    return ALPHA


# ---------------------------------------------------------------------------
# frame chains
# ---------------------------------------------------------------------------

def _advance(s):
    c, si = np.cos(s), np.sin(s)
    return np.array([[c, -si, 0.0], [si, c, 0.0], [0.0, 0.0, 1.0]])


def _turn(theta):
    c, si = np.cos(theta), np.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -si], [0.0, si, c]])


def chain_matrix(sides, angle: float = ALPHA) -> np.ndarray:
    """Composed frame rotation of the walk around the polygon.

    Frame columns are (position, direction, normal); each step rotates
    along a geodesic of the given length, then turns by the exterior
    angle pi - angle.  The result is the identity iff the side list
    closes into a polygon with all interior angles `angle`.
    """
    m = np.eye(3)
    ext = np.pi - angle
    t = _turn(ext)
    for s in sides:
        m = m @ _advance(s) @ t
    return m


def closure_residual(sides, angle: float = ALPHA) -> float:
    """Rotation angle separating the chain composition from the identity."""
    m = chain_matrix(sides, angle)
    c = np.clip((np.trace(m) - 1.0) / 2.0, -1.0, 1.0)
    return float(np.arccos(c))


def polygon_from_sides(sides, angle: float = ALPHA,
                       tol: float = 1e-8) -> np.ndarray:
    """Vertex coordinates on S^2 of the closed polygon with given sides.

    Starts at the north pole walking along +x and records a vertex
    before each edge.  Raises NoSolution when the chain does not close
    within `tol`.
    """
    if closure_residual(sides, angle) > tol:
        raise NoSolution("side list does not close into a polygon")
    ext = np.pi - angle
    t = _turn(ext)
    m = np.eye(3)
    start = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    verts = []
    for s in sides:
        verts.append((start @ m)[:, 0].copy())
        m = m @ _advance(s) @ t
    return np.array(verts)


# ---------------------------------------------------------------------------
# polygon value type
# ---------------------------------------------------------------------------

@dataclass
class IsogonalPolygon:
    """Spherical polygon with all interior angles ALPHA.

    `sides` is the cyclic list of side arc lengths; mirror-symmetric
    pentagons use the pattern (t, u, v, v, u) with base t, lower legs u
    and upper legs v.
    """

    sides: tuple
    angle: float = ALPHA
    closure_residual: float = 0.0

    @classmethod
    def from_sides(cls, sides, angle: float = ALPHA) -> "IsogonalPolygon":
        sides = tuple(float(s) for s in sides)
        return cls(sides, angle, closure_residual(sides, angle))

    @classmethod
    def regular(cls, n: int) -> "IsogonalPolygon":
        return cls.from_sides([regular_side(n)] * n)

    @property
    def n(self) -> int:
        return len(self.sides)

    @property
    def is_closed(self) -> bool:
        return self.closure_residual < _CLOSURE_TOL

    def vertices(self) -> np.ndarray:
        return polygon_from_sides(self.sides, self.angle)

    # pentagon side classes
    @property
    def base(self) -> float:
        return self.sides[0]

    @property
    def lower_leg(self) -> float:
        return self.sides[1]

    @property
    def upper_leg(self) -> float:
        return self.sides[2]


# ---------------------------------------------------------------------------
# regular polygons
# ---------------------------------------------------------------------------

def regular_side(n: int) -> float:
    """Side length a_n of the regular spherical n-gon with angles ALPHA."""
    if n < 3:
        raise ValueError("need n >= 3")
    c = (3.0 * np.cos(2.0 * np.pi / n) + 1.0) / 2.0
    if not -1.0 <= c <= 1.0:
        raise ValueError(f"no regular {n}-gon with angle ALPHA")
    return float(np.arccos(c))


def regular_side_oracle(n: int) -> float:
    """Independent a_n via the right-triangle decomposition.

    Split the n-gon into 2n right triangles around its center: one has
    angles pi/n at the center, ALPHA/2 at the vertex and a right angle
    at the edge midpoint.  Napier's rules give the circumradius rho from
    cos rho = cot(pi/n) cot(ALPHA/2) and the half side from the law of
    sines.
    """
    rho = regular_circumradius(n)
    return float(2.0 * np.arcsin(np.sin(rho) * np.sin(np.pi / n)))


def regular_circumradius(n: int) -> float:
    """Center-to-vertex distance of the regular n-gon with angles ALPHA."""
    c = 1.0 / (np.tan(np.pi / n) * np.tan(ALPHA / 2.0))
    if not -1.0 <= c <= 1.0:
        # only n = 3, 4, 5 have positive spherical excess with angle ALPHA
        raise ValueError(f"no regular {n}-gon with angle ALPHA")
    return float(np.arccos(c))


def regular_polygon_vertices(n: int) -> np.ndarray:
    """Vertices on S^2 of the regular n-gon centered at the north pole."""
    rho = regular_circumradius(n)
    lon = 2.0 * np.pi * np.arange(n) / n
    return np.stack([np.sin(rho) * np.cos(lon),
                     np.sin(rho) * np.sin(lon),
                     np.full(n, np.cos(rho))], axis=1)


# ---------------------------------------------------------------------------
# rectangles
# ---------------------------------------------------------------------------

def rectangle_complement(p: float) -> float:
    """Second side q of the ALPHA-rectangle: tan(p/2) tan(q/2) = 1/3."""
    if not 0.0 < p < np.pi:
        raise ValueError("side must lie in (0, pi)")
    q = 2.0 * np.arctan(TAN_HALF_PRODUCT / np.tan(p / 2.0))
    if not 0.0 < q < np.pi:
        raise ValueError("complement side leaves (0, pi)")
    return float(q)


def rectangle_relation_violation(p: float, q: float) -> float:
    """|tan(p/2) tan(q/2) - 1/3|; zero iff (p, q) close an ALPHA-rectangle."""
    return float(abs(np.tan(p / 2.0) * np.tan(q / 2.0) - TAN_HALF_PRODUCT))


# ---------------------------------------------------------------------------
# areas and ball volumes
# ---------------------------------------------------------------------------

def polygon_excess_area(poly: IsogonalPolygon) -> float:
    """Gauss-Bonnet area: sum of angles minus (n - 2) pi."""
    if not poly.is_closed:
        raise ValueError("polygon is not closed")
    return float(poly.n * poly.angle - (poly.n - 2) * np.pi)


def spherical_ball_bounds(r: float) -> tuple[float, float]:
    """(Euclidean upper bound, exact volume) of a geodesic r-ball in S^3.

    The exact volume is pi (2r - sin 2r); the flat comparison
    (4/3) pi r^3 dominates it for every radius below pi/2.
    """
    if not 0.0 < r < np.pi / 2.0:
        raise ValueError("radius must lie in (0, pi/2)")
    euclidean = 4.0 / 3.0 * np.pi * r ** 3
    exact = np.pi * (2.0 * r - np.sin(2.0 * r))
    return float(euclidean), float(exact)


def mc_cap_volume(r: float, n_samples: int, seed: int) -> float:
    """Monte Carlo volume of a geodesic ball of radius r in S^3."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n_samples, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    inside = x[:, 3] >= np.cos(r)
    return float(2.0 * np.pi ** 2 * inside.mean())


def mc_polygon_area(vertices, n_samples: int, seed: int) -> float:
    """Monte Carlo area of a convex spherical polygon on S^2."""
    vs = np.asarray(vertices, dtype=float)
    centroid = normalize(vs.mean(axis=0))
    k = len(vs)
    normals = []
    for i in range(k):
        nu = np.cross(vs[i], vs[(i + 1) % k])
        nu = nu / np.linalg.norm(nu)
        if np.dot(nu, centroid) < 0:
            nu = -nu
        normals.append(nu)
    normals = np.array(normals)
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n_samples, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    inside = np.all(pts @ normals.T >= 0.0, axis=1)
    return float(4.0 * np.pi * inside.mean())


# ---------------------------------------------------------------------------
# mirror-symmetric pentagons
# ---------------------------------------------------------------------------

def _pent_sides(pinned_class, pinned_value, x):
    if pinned_class == BASE:
        t, (u, v) = pinned_value, x
    elif pinned_class == LOWER_LEG:
        u, (t, v) = pinned_value, x
    elif pinned_class == UPPER_LEG:
        v, (t, u) = pinned_value, x
    else:
        raise ValueError(f"unknown side class {pinned_class!r}")
    return [t, u, v, v, u]


def _closure_matrix_deviation(sides, angle=ALPHA):
    return (chain_matrix(sides, angle) - np.eye(3)).ravel()


def _edge_step_batch(values, angle):
    """(k, 3, 3) array of advance-then-turn steps for an array of sides."""
    values = np.asarray(values, dtype=float)
    k = len(values)
    g = np.zeros((k, 3, 3))
    c, s = np.cos(values), np.sin(values)
    g[:, 0, 0] = c
    g[:, 0, 1] = -s
    g[:, 1, 0] = s
    g[:, 1, 1] = c
    g[:, 2, 2] = 1.0
    return g @ _turn(np.pi - angle)


def _grid_residuals(pinned_class, pinned_value, ts, angle=ALPHA):
    """||chain - identity||_F over a grid of the two free side lengths."""
    e_free = _edge_step_batch(ts, angle)
    e_pin = _edge_step_batch([pinned_value], angle)[0]
    n = len(ts)
    out = np.empty((n, n))
    eye = np.eye(3)
    if pinned_class == BASE:
        sq = e_free @ e_free                      # E(v)^2 per column
        for i in range(n):                        # rows: u, cols: v
            mats = (e_pin @ e_free[i]) @ sq @ e_free[i]
            out[i] = np.linalg.norm(mats - eye, axis=(1, 2))
    elif pinned_class == LOWER_LEG:
        sq = e_free @ e_free                      # E(v)^2 per column
        for i in range(n):                        # rows: t, cols: v
            mats = (e_free[i] @ e_pin) @ sq @ e_pin
            out[i] = np.linalg.norm(mats - eye, axis=(1, 2))
    else:
        sq = e_pin @ e_pin                        # E(v0)^2
        for i in range(n):                        # rows: t, cols: u
            mats = (e_free[i] @ e_free) @ sq[None] @ e_free
            out[i] = np.linalg.norm(mats - eye, axis=(1, 2))
    return out


def _gauss_newton(f, x0, lo, hi, max_iter=80, tol=1e-13):
    """Damped Gauss-Newton toward a zero of the small residual map f."""
    x = np.array(x0, dtype=float)
    fx = f(x)
    for _ in range(max_iter):
        nf = np.linalg.norm(fx)
        if nf < tol:
            break
        h = 1e-7
        jac = np.zeros((len(fx), len(x)))
        for j in range(len(x)):
            xp, xm = x.copy(), x.copy()
            xp[j] += h
            xm[j] -= h
            jac[:, j] = (f(xp) - f(xm)) / (2.0 * h)
        step, *_ = np.linalg.lstsq(jac, -fx, rcond=None)
        lam = 1.0
        improved = False
        for _ in range(40):
            xn = np.clip(x + lam * step, lo, hi)
            fn = f(xn)
            if np.linalg.norm(fn) < nf:
                x, fx = xn, fn
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
    return x, float(np.linalg.norm(fx))


def polygon_is_simple_hemispheric(vertices) -> bool:
    """Feasibility filter: convex-side-consistent inside one hemisphere.

    Requires an open hemisphere containing every vertex and every vertex
    on the inner side of every edge plane; spurious chain roots (walks
    that close only after wrapping the sphere) fail this.
    """
    vs = np.asarray(vertices, dtype=float)
    centroid = vs.mean(axis=0)
    nc = np.linalg.norm(centroid)
    if nc < 1e-9:
        return False
    centroid = centroid / nc
    if np.any(vs @ centroid <= 1e-9):
        return False
    n = len(vs)
    for i in range(n):
        nu = np.cross(vs[i], vs[(i + 1) % n])
        norm = np.linalg.norm(nu)
        if norm < 1e-12:
            return False
        nu = nu / norm
        if np.dot(nu, centroid) < 0:
            nu = -nu
        if np.any(vs @ nu < -1e-7):
            return False
    return True


def symmetric_pentagon_solve(pinned_class: str, pinned_value: float,
                             angle: float = ALPHA,
                             search_hi: float = 3.0,
                             grid: int = 64) -> IsogonalPolygon:
    """Pentagon (t, u, v, v, u) with all angles ALPHA and one side pinned.

    pinned_class is "base", "lower-leg" or "upper-leg".  The solver
    scans a grid over the two free side lengths, polishes every residual
    basin with damped Gauss-Newton on the chain-closure system, and
    keeps the roots whose realization is simple and hemispheric.
    Exactly one root must survive; otherwise NoSolution (the pinned
    length is outside the family's range -- a finding in itself) or
    AmbiguousSolution is raised.
    """
    if not _SIDE_MIN < pinned_value < np.pi - _SIDE_MIN:
        raise ValueError("pinned side outside the non-degenerate range")

    def resid(x):
        return _closure_matrix_deviation(
            _pent_sides(pinned_class, pinned_value, x), angle)

    lo = 1e-4
    ts = np.linspace(0.01, search_hi, grid)
    vals = _grid_residuals(pinned_class, pinned_value, ts, angle)
    roots = []
    for i in range(grid):
        for j in range(grid):
            v = vals[i, j]
            if v > 0.5:
                continue
            if v > vals[max(0, i - 1):i + 2, max(0, j - 1):j + 2].min():
                continue
            x, r = _gauss_newton(resid, (ts[i], ts[j]), lo, search_hi)
            if r > 1e-10:
                continue
            sides = _pent_sides(pinned_class, pinned_value, x)
            if min(sides) < _SIDE_MIN:
                continue
            try:
                verts = polygon_from_sides(sides, angle)
            except NoSolution:
                continue
            if not polygon_is_simple_hemispheric(verts):
                continue
            if any(np.allclose(k, sides, atol=1e-6) for k in roots):
                continue
            roots.append(sides)
    if not roots:
        raise NoSolution(
            f"no closed pentagon with {pinned_class}={pinned_value:.6f}")
    if len(roots) > 1:
        raise AmbiguousSolution(
            f"{len(roots)} pentagons with {pinned_class}={pinned_value:.6f}")
    return IsogonalPolygon.from_sides(roots[0], angle)


def _continue_from(x, t, angle=ALPHA):
    """Local polish of the free sides (u, v) at base t, seeded from x."""
    def resid(y):
        return _closure_matrix_deviation([t, y[0], y[1], y[1], y[0]], angle)
    return _gauss_newton(resid, x, -0.5, np.pi)


def symmetric_pentagon_family(samples: int = 200) -> list[IsogonalPolygon]:
    """The one-parameter family of symmetric pentagons, swept by base.

    Continuation from the regular pentagon in both directions; the sweep
    stops where a side length degenerates to zero, which bounds the
    family's base range.  Returns closed pentagons sorted by base.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    a5 = regular_side(5)
    entries = {}

    def record(t, x):
        sides = [t, x[0], x[1], x[1], x[0]]
        if min(sides) > _SIDE_MIN:
            entries[round(t, 12)] = IsogonalPolygon.from_sides(sides)

    for direction in (+1, -1):
        x = np.array([a5, a5])
        t = a5
        step = direction * 1.0 / samples
        while 0.0 < t < np.pi and abs(step) > 1e-9:
            xn, r = _continue_from(x, t)
            if r > 1e-10 or min(t, xn[0], xn[1]) < _SIDE_MIN:
                t -= step          # back off and halve toward the family end
                step *= 0.5
                t += step
                continue
            x = xn
            record(t, x)
            t += step
    return [entries[k] for k in sorted(entries)]


def three_equal_sides_implies_regular(samples: int = 200) -> bool:
    """Verify that a symmetric pentagon with three equal sides is regular.

    In the pattern (t, u, v, v, u), three equal sides force t = u, t = v
    or u = v.  The family sweep tracks the three differences along the
    base range; each sign change is bisected to a root, and the claim
    holds iff every root is the regular pentagon.
    """
    family = symmetric_pentagon_family(samples)
    if len(family) < 50:
        raise NoSolution("pentagon family sweep failed to resolve")
    a5 = regular_side(5)

    def diffs(p):
        t, u, v = p.base, p.lower_leg, p.upper_leg
        return (t - u, t - v, u - v)

    for k in range(3):
        for p0, p1 in zip(family[:-1], family[1:]):
            d0, d1 = diffs(p0)[k], diffs(p1)[k]
            if d0 == 0.0:
                root = p0
            elif d0 * d1 < 0.0:
                ta, tb = p0.base, p1.base
                x = np.array([p0.lower_leg, p0.upper_leg])
                da = d0
                pm = p0
                for _ in range(60):
                    tm = 0.5 * (ta + tb)
                    x, _r = _continue_from(x, tm)
                    pm = IsogonalPolygon.from_sides(
                        [tm, x[0], x[1], x[1], x[0]])
                    dm = diffs(pm)[k]
                    if da * dm <= 0.0:
                        tb = tm
                    else:
                        ta, da = tm, dm
                root = pm
            else:
                continue
            t, u, v = root.base, root.lower_leg, root.upper_leg
            if not (abs(t - u) < 1e-6 and abs(u - v) < 1e-6):
                return False
            if abs(t - a5) > 1e-5:
                return False
    return True


def measure_polygon(vertices):
    """(sides, angles) of an explicit spherical polygon."""
    return polygon_sides(vertices), polygon_angles(vertices)
