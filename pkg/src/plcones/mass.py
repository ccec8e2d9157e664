"""Piecewise-linear 3-mass accounting for radial complexes in R^4.

The competitors we measure are 3-dimensional simplicial complexes embedded in
R^4: unions of tetrahedra whose 3-volumes (computed intrinsically via the Gram
determinant) add up to the mass.  The main producers are ``cone_complex``,
which cones the flat 2-skeleton of a partition to the origin and trims the
result to a convex hull, and the synthetic test scenes used to exercise the
clipping machinery.

Conventions
-----------
* A ``Complex3`` stores vertices as an (n, 4) float array, tetrahedra as an
  (m, 4) int array, and a boolean ``fixed`` mask.  Vertices marked fixed are
  pinned to the hull boundary and never move during evolution.
* A ``Hull`` is an intersection of closed half-spaces ``n . x <= d`` with unit
  outward normals and strictly positive offsets (the origin is strictly
  inside).  ``Hull.scaled`` produces the concentric copy ``sigma * H``.
* 2-face incidence: a triangle shared by one tetrahedron is free boundary (it
  must be fixed), by two is a manifold fold, by three is a triple junction.
  Higher incidence is rejected by ``Complex3.validate``.

Mass is summed with ``math.fsum`` over tetrahedra in storage order, so equal
complexes produce bit-equal masses.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .cells import CELL_TYPES
from .geometry import ALPHA
from .partitions import CELL_INVENTORY, S3_VOLUME

__all__ = [
    "ClipDegeneracy",
    "Complex3",
    "Hull",
    "ball_complex",
    "clip_to_hull",
    "cone_complex",
    "cone_patch_mass",
    "mass",
    "simplex_mass3",
    "spherical_patch_complex",
    "t8_margin",
    "tetra_volumes",
]

PLANE_SNAP = 1e-12
DEGENERATE_VOLUME = 1e-14
BOUNDARY_TOL = 1e-10


class ClipDegeneracy(ValueError):
    """A tetrahedron lies flat inside a cutting plane and cannot be classified."""


def simplex_mass3(p0, p1, p2, p3) -> float:
    """3-volume of the tetrahedron (p0, p1, p2, p3) embedded in R^4.

    Computed as sqrt(det(G^T G)) / 6 with G the 4x3 matrix of edge vectors,
    which is intrinsic: it works in any ambient dimension >= 3 and returns 0
    for degenerate (flat) tetrahedra.
    """
    g = np.stack((np.asarray(p1) - p0, np.asarray(p2) - p0, np.asarray(p3) - p0))
    gram = g @ g.T
    return math.sqrt(max(0.0, float(np.linalg.det(gram)))) / 6.0


@dataclass
class Complex3:
    """Simplicial 3-complex in R^4: vertex coordinates, tetrahedra, fixed mask."""

    vertices: np.ndarray
    tetra: np.ndarray
    fixed: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 4)
        self.tetra = np.asarray(self.tetra, dtype=np.intp).reshape(-1, 4)
        if self.fixed is None:
            self.fixed = np.zeros(len(self.vertices), dtype=bool)
        self.fixed = np.asarray(self.fixed, dtype=bool).reshape(-1)
        if len(self.fixed) != len(self.vertices):
            raise ValueError("fixed mask length does not match vertex count")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_tetra(self) -> int:
        return len(self.tetra)

    def copy(self) -> "Complex3":
        return Complex3(self.vertices.copy(), self.tetra.copy(), self.fixed.copy())

    def edges(self) -> set[tuple[int, int]]:
        out = set()
        for t in self.tetra:
            a, b, c, d = sorted(int(v) for v in t)
            out.update([(a, b), (a, c), (a, d), (b, c), (b, d), (c, d)])
        return out

    def two_faces(self) -> Counter:
        """Incidence count for every triangle appearing as a tetrahedron face."""
        counts: Counter = Counter()
        for t in self.tetra:
            a, b, c, d = sorted(int(v) for v in t)
            counts[(a, b, c)] += 1
            counts[(a, b, d)] += 1
            counts[(a, c, d)] += 1
            counts[(b, c, d)] += 1
        return counts

    def junction_profile(self) -> Counter:
        """How many 2-faces have incidence 1 (boundary), 2 (fold), 3 (triple)."""
        prof: Counter = Counter()
        for _, k in self.two_faces().items():
            prof[k] += 1
        return prof

    def validate(self) -> dict:
        vols = tetra_volumes(self)
        min_vol = float(vols.min()) if len(vols) else 0.0
        faces = self.two_faces()
        bad_incidence = [f for f, k in faces.items() if k > 3]
        loose_boundary = [
            f for f, k in faces.items() if k == 1 and not all(self.fixed[list(f)])
        ]
        report = {
            "n_vertices": self.n_vertices,
            "n_tetra": self.n_tetra,
            "min_volume": min_vol,
            "degenerate": min_vol <= DEGENERATE_VOLUME,
            "junctions": dict(self.junction_profile()),
            "bad_incidence": len(bad_incidence),
            "loose_boundary": len(loose_boundary),
        }
        report["ok"] = (
            not report["degenerate"]
            and not bad_incidence
            and not loose_boundary
        )
        return report

    def rotated(self, rot: np.ndarray) -> "Complex3":
        return Complex3(self.vertices @ np.asarray(rot).T, self.tetra.copy(), self.fixed.copy())

    def scaled(self, sigma: float) -> "Complex3":
        return Complex3(self.vertices * float(sigma), self.tetra.copy(), self.fixed.copy())

    def to_off(self) -> str:
        """Serialize as a 4OFF-style text block with a fixed-flag column.

        Line 1: ``4OFF``; line 2: ``n_vertices n_tetra 0``; then one line per
        vertex (``x y z w flag``) and one line per tetrahedron (``4 i j k l``).
        """
        lines = ["4OFF", f"{self.n_vertices} {self.n_tetra} 0"]
        for v, f in zip(self.vertices, self.fixed):
            coords = " ".join(repr(float(x)) for x in v)
            lines.append(f"{coords} {int(f)}")
        for t in self.tetra:
            lines.append("4 " + " ".join(str(int(i)) for i in t))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_off(cls, text: str) -> "Complex3":
        rows = [ln for ln in text.splitlines() if ln.strip()]
        if rows[0].strip() != "4OFF":
            raise ValueError("expected a 4OFF header")
        nv, nt, _ = (int(x) for x in rows[1].split())
        verts, flags = [], []
        for ln in rows[2 : 2 + nv]:
            parts = ln.split()
            verts.append([float(x) for x in parts[:4]])
            flags.append(bool(int(parts[4])))
        tets = []
        for ln in rows[2 + nv : 2 + nv + nt]:
            parts = [int(x) for x in ln.split()]
            if parts[0] != 4:
                raise ValueError("expected tetrahedral cells")
            tets.append(parts[1:5])
        return cls(np.array(verts), np.array(tets), np.array(flags))


def tetra_volumes(c: Complex3) -> np.ndarray:
    """Vectorized 3-volumes of every tetrahedron, in storage order."""
    if c.n_tetra == 0:
        return np.zeros(0)
    p = c.vertices[c.tetra]
    g = p[:, 1:, :] - p[:, :1, :]
    gram = np.einsum("nik,njk->nij", g, g)
    det = np.linalg.det(gram)
    return np.sqrt(np.clip(det, 0.0, None)) / 6.0


def mass(c: Complex3) -> float:
    """Total 3-mass: compensated sum of tetra volumes in fixed storage order."""
    return math.fsum(tetra_volumes(c).tolist())


@dataclass
class Hull:
    """Convex body ``{x : normals . x <= offsets}`` strictly containing 0."""

    normals: np.ndarray
    offsets: np.ndarray
    points: np.ndarray
    facet_vertices: tuple[tuple[int, ...], ...]
    scale: float = 1.0

    def __post_init__(self):
        self.normals = np.asarray(self.normals, dtype=float)
        self.offsets = np.asarray(self.offsets, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if np.any(self.offsets <= 0):
            raise ValueError("hull does not strictly contain the origin")

    @classmethod
    def from_points(cls, points, scale: float = 1.0) -> "Hull":
        """Facet description of ``scale * conv(points)``, coplanar facets merged."""
        pts = np.asarray(points, dtype=float)
        hull = ConvexHull(pts)
        groups: dict[tuple, list] = {}
        members: dict[tuple, set[int]] = {}
        for simp, eq in zip(hull.simplices, hull.equations):
            key = tuple(np.round(eq, 10))
            groups.setdefault(key, []).append(eq)
            members.setdefault(key, set()).update(int(i) for i in simp)
        normals, offsets, facvs = [], [], []
        for key in sorted(groups):
            eq = np.mean(groups[key], axis=0)
            nrm = np.linalg.norm(eq[:4])
            normals.append(eq[:4] / nrm)
            offsets.append(-eq[4] / nrm)
            facvs.append(tuple(sorted(members[key])))
        normals = np.array(normals)
        offsets = np.array(offsets)
        margins = pts @ normals.T - offsets[None, :]
        if margins.max() > BOUNDARY_TOL:
            raise ValueError("a generating vertex lies outside its own hull")
        return cls(
            normals,
            offsets * scale,
            pts * scale,
            tuple(facvs),
            scale,
        )

    @classmethod
    def box(cls, half_width: float) -> "Hull":
        """Axis-aligned 4-cube of the given half-width (synthetic test hull)."""
        normals = np.vstack([np.eye(4), -np.eye(4)])
        offsets = np.full(8, float(half_width))
        corners = np.array(
            [[sx, sy, sz, sw] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1) for sw in (-1, 1)],
            dtype=float,
        ) * half_width
        facvs = tuple(
            tuple(i for i, p in enumerate(corners) if abs(p @ n - half_width) < 1e-12)
            for n in normals
        )
        return cls(normals, offsets, corners, facvs, 1.0)

    @property
    def n_facets(self) -> int:
        return len(self.offsets)

    def value(self, x) -> np.ndarray:
        """Signed facet excess at x: negative inside, zero on a facet plane."""
        return self.normals @ np.asarray(x) - self.offsets

    def contains(self, x, tol: float = 0.0) -> bool:
        return bool(self.value(x).max() <= tol)

    def on_boundary(self, x, tol: float = BOUNDARY_TOL) -> bool:
        v = self.value(x)
        return bool(v.max() <= tol and v.max() >= -tol)

    def inradius(self) -> float:
        """Distance from the origin to the nearest facet plane."""
        return float(self.offsets.min())

    def circumradius(self) -> float:
        return float(np.linalg.norm(self.points, axis=1).max()) if len(self.points) else 0.0

    def scaled(self, sigma: float) -> "Hull":
        return Hull(
            self.normals.copy(),
            self.offsets * sigma,
            self.points * sigma,
            self.facet_vertices,
            self.scale * sigma,
        )

    def facet_volume(self, i: int) -> float:
        """3-volume of facet polytope i (it is flat; measured in local coords)."""
        verts = self.points[list(self.facet_vertices[i])]
        center = verts.mean(axis=0)
        d = verts - center
        _, _, vt = np.linalg.svd(d, full_matrices=False)
        local = d @ vt[:3].T
        return float(ConvexHull(local).volume)

    def facet_centroid(self, i: int) -> np.ndarray:
        return self.points[list(self.facet_vertices[i])].mean(axis=0)

    def boundary_volume(self) -> float:
        return math.fsum(self.facet_volume(i) for i in range(self.n_facets))


# ---------------------------------------------------------------------------
# clipping


def _triangulate_piece(vids: list[int], faces: list[list[int]]) -> list[tuple[int, int, int, int]]:
    """Tetrahedralize a convex piece from its face cycles, canonically.

    Cone from the lowest-index vertex; every face not containing it is fanned
    from its own lowest-index vertex.  Because the fan of a face depends only
    on the face itself, two pieces sharing a face always triangulate it
    identically, keeping the global mesh conforming.
    """
    apex = min(vids)
    tets = []
    for face in faces:
        if apex in face:
            continue
        k = face.index(min(face))
        n = len(face)
        cyc = [face[(k + i) % n] for i in range(n)]
        for i in range(1, n - 1):
            tets.append((apex, cyc[0], cyc[i], cyc[i + 1]))
    return tets


def _split_tetra(tet, svals, cut_of):
    """Split one tetrahedron at a plane into inside and outside tetra lists.

    ``svals`` are snapped signed plane values per corner (exact zeros allowed),
    ``cut_of(a, b)`` returns the dedup'd vertex id on edge (a, b).  Corners on
    the plane are treated as belonging to both closed sides, which is the
    symbolic-perturbation convention: no new vertices are created for them.
    """
    inside = [v for v, s in zip(tet, svals) if s < 0]
    outside = [v for v, s in zip(tet, svals) if s > 0]
    on = [v for v, s in zip(tet, svals) if s == 0]
    if len(on) == 4:
        raise ClipDegeneracy("tetrahedron lies flat in a cutting plane")
    if not outside:
        return [tuple(tet)], []
    if not inside:
        return [], [tuple(tet)]

    cuts = {(i, o): cut_of(i, o) for i in inside for o in outside}
    ni, no = len(inside), len(outside)

    if ni == 1 and no == 1:
        i, o = inside[0], outside[0]
        c = cuts[(i, o)]
        z1, z2 = on
        return [(i, z1, z2, c)], [(o, z1, z2, c)]
    if ni == 1 and no == 2:
        i = inside[0]
        o1, o2 = outside
        z = on[0]
        c1, c2 = cuts[(i, o1)], cuts[(i, o2)]
        in_t = [(i, z, c1, c2)]
        out_piece = _triangulate_piece(
            [o1, o2, z, c1, c2],
            [[z, c1, c2], [c1, o1, o2, c2], [z, c1, o1], [z, c2, o2], [z, o1, o2]],
        )
        return in_t, out_piece
    if ni == 2 and no == 1:
        i1, i2 = inside
        o = outside[0]
        z = on[0]
        c1, c2 = cuts[(i1, o)], cuts[(i2, o)]
        out_t = [(o, z, c1, c2)]
        in_piece = _triangulate_piece(
            [i1, i2, z, c1, c2],
            [[z, c1, c2], [c1, i1, i2, c2], [z, c1, i1], [z, c2, i2], [z, i1, i2]],
        )
        return in_piece, out_t
    if ni == 1 and no == 3:
        i = inside[0]
        o1, o2, o3 = outside
        c1, c2, c3 = cuts[(i, o1)], cuts[(i, o2)], cuts[(i, o3)]
        in_t = [(i, c1, c2, c3)]
        out_piece = _triangulate_piece(
            [o1, o2, o3, c1, c2, c3],
            [
                [c1, c2, c3],
                [o1, o2, o3],
                [c1, o1, o2, c2],
                [c2, o2, o3, c3],
                [c3, o3, o1, c1],
            ],
        )
        return in_t, out_piece
    if ni == 3 and no == 1:
        o = outside[0]
        i1, i2, i3 = inside
        c1, c2, c3 = cuts[(i1, o)], cuts[(i2, o)], cuts[(i3, o)]
        out_t = [(o, c1, c2, c3)]
        in_piece = _triangulate_piece(
            [i1, i2, i3, c1, c2, c3],
            [
                [c1, c2, c3],
                [i1, i2, i3],
                [c1, i1, i2, c2],
                [c2, i2, i3, c3],
                [c3, i3, i1, c1],
            ],
        )
        return in_piece, out_t
    # ni == 2 and no == 2
    i1, i2 = inside
    o1, o2 = outside
    c11, c12 = cuts[(i1, o1)], cuts[(i1, o2)]
    c21, c22 = cuts[(i2, o1)], cuts[(i2, o2)]
    cross = [c11, c12, c22, c21]
    in_piece = _triangulate_piece(
        [i1, i2, c11, c12, c21, c22],
        [cross, [i1, i2, c21, c11], [i1, i2, c22, c12], [i1, c11, c12], [i2, c21, c22]],
    )
    out_piece = _triangulate_piece(
        [o1, o2, c11, c12, c21, c22],
        [cross, [o1, o2, c22, c12], [o1, o2, c21, c11], [o1, c11, c21], [o2, c12, c22]],
    )
    return in_piece, out_piece


def clip_to_hull(c: Complex3, h: Hull, keep: str = "inside") -> Complex3:
    """Split tetrahedra at every hull facet plane and keep one side.

    ``keep`` is ``"inside"`` (intersection with the hull), ``"outside"``
    (closure of the complement part), or ``"both"``.  Vertices created on a
    facet are deduplicated per (facet, edge), so neighbouring tetrahedra stay
    conforming; corners within ``PLANE_SNAP`` of a plane are snapped onto it.
    The clipped mass plus the discarded mass equals the input mass exactly up
    to roundoff (conservation is part of the test suite).
    """
    if keep not in ("inside", "outside", "both"):
        raise ValueError("keep must be inside, outside or both")
    verts = [np.asarray(v, dtype=float) for v in c.vertices]
    inside_tets = [tuple(int(i) for i in t) for t in c.tetra]
    outside_tets: list[tuple[int, int, int, int]] = []

    for fi in range(h.n_facets):
        n, d = h.normals[fi], h.offsets[fi]
        cache: dict[tuple[int, int], int] = {}
        svals = [float(n @ v - d) for v in verts]
        svals = [0.0 if abs(s) <= PLANE_SNAP else s for s in svals]

        def cut_of(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key in cache:
                return cache[key]
            sa, sb = svals[a], svals[b]
            t = sa / (sa - sb)
            p = verts[a] + t * (verts[b] - verts[a])
            verts.append(p)
            svals.append(0.0)
            cache[key] = len(verts) - 1
            return cache[key]

        next_inside: list[tuple[int, int, int, int]] = []
        for tet in inside_tets:
            tin, tout = _split_tetra(tet, [svals[v] for v in tet], cut_of)
            next_inside.extend(tin)
            outside_tets.extend(tout)
        inside_tets = next_inside

    if keep == "inside":
        tets = inside_tets
    elif keep == "outside":
        tets = outside_tets
    else:
        tets = inside_tets + outside_tets
    if not tets:
        return Complex3(np.zeros((0, 4)), np.zeros((0, 4), dtype=int), np.zeros(0, dtype=bool))

    used = sorted({v for t in tets for v in t})
    remap = {v: i for i, v in enumerate(used)}
    new_verts = np.array([verts[v] for v in used])
    new_tets = np.array([[remap[v] for v in t] for t in tets], dtype=np.intp)
    margins = new_verts @ h.normals.T - h.offsets[None, :]
    fixed = np.abs(margins).min(axis=1) <= BOUNDARY_TOL
    fixed &= margins.max(axis=1) <= BOUNDARY_TOL
    return Complex3(new_verts, new_tets, fixed)


# ---------------------------------------------------------------------------
# producers


def cone_complex(p, h: Hull | None = None, drop_degenerate: bool = True) -> Complex3:
    """Cone the flat 2-skeleton of a partition to the origin, trimmed to a hull.

    Every face cycle is fan-triangulated from its first vertex and each flat
    triangle is coned to the origin, giving one tetrahedron per fan triangle.
    The complex is then clipped to ``h`` (by default the hull of the partition
    vertices, in which case clipping is a no-op because every cone tetrahedron
    already lies inside).  Vertices on the hull boundary are marked fixed.

    Interior 2-faces are shared by exactly two tetrahedra (fan folds) or three
    (cones over partition edges, which carry three faces each); the only
    incidence-1 triangles are the flat faces on the hull boundary, whose
    vertices are all fixed.
    """
    if any(len(f.cycle) < 3 for f in p.faces):
        raise ValueError("cone meshing requires polygonal face cycles")
    if h is None:
        h = Hull.from_points(p.vertices)
    verts = [np.zeros(4)] + [np.asarray(v, dtype=float) for v in p.vertices]
    tets = []
    for f in p.faces:
        cyc = [i + 1 for i in f.cycle]
        for i in range(1, len(cyc) - 1):
            tets.append((0, cyc[0], cyc[i], cyc[i + 1]))
    c = Complex3(np.array(verts), np.array(tets, dtype=np.intp), None)
    c = clip_to_hull(c, h, keep="inside")
    if drop_degenerate:
        vols = tetra_volumes(c)
        keep = vols > DEGENERATE_VOLUME
        if not keep.all():
            c = Complex3(c.vertices, c.tetra[keep], c.fixed)
    return c


def _octasphere_triangles(subdiv: int):
    """Triangulated unit 2-sphere in R^3 by recursive octahedron subdivision."""
    verts = [
        np.array(v, dtype=float)
        for v in [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    ]
    tris = [
        (0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4),
        (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5),
    ]
    index: dict[tuple[int, int], int] = {}

    def midpoint(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        if key not in index:
            m = verts[a] + verts[b]
            verts.append(m / np.linalg.norm(m))
            index[key] = len(verts) - 1
        return index[key]

    for _ in range(subdiv):
        nxt = []
        for a, b, c in tris:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            nxt.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        tris = nxt
    return np.array(verts), tris


def ball_complex(subdiv: int = 3, radius: float = 1.0) -> Complex3:
    """Solid flat 3-ball in the hyperplane w = 0, coned from its centre.

    This is the synthetic disk scene: a triangulated round 2-sphere embedded
    at w = 0, coned to the origin so the union of tetrahedra fills the flat
    3-ball of the given radius.  Used to exercise hull clipping against an
    exactly computable polytope slice.
    """
    sphere, tris = _octasphere_triangles(subdiv)
    verts = np.zeros((len(sphere) + 1, 4))
    verts[1:, :3] = sphere * radius
    tets = np.array([(0, a + 1, b + 1, c + 1) for a, b, c in tris], dtype=np.intp)
    return Complex3(verts, tets, None)


def spherical_patch_complex(corners, subdiv: int = 3) -> Complex3:
    """Cone over one curved spherical polygon, meshed by projected subdivision.

    ``corners`` are unit vectors in R^4 spanning a spherical polygon (fanned
    from the first corner); each fan triangle is recursively subdivided with
    midpoints re-normalized onto the sphere, then coned to the origin.  As the
    subdivision deepens the mass converges to (polygon area) / 3.
    """
    corners = [np.asarray(c, dtype=float) for c in corners]
    verts: list[np.ndarray] = [np.zeros(4)]
    key_of: dict[tuple, int] = {}

    def vid(v: np.ndarray) -> int:
        key = tuple(np.round(v, 12))
        if key not in key_of:
            verts.append(v)
            key_of[key] = len(verts) - 1
        return key_of[key]

    def subdivide(a, b, c, depth):
        if depth == 0:
            return [(vid(a), vid(b), vid(c))]
        ab = (a + b) / np.linalg.norm(a + b)
        bc = (b + c) / np.linalg.norm(b + c)
        ca = (c + a) / np.linalg.norm(c + a)
        out = []
        out += subdivide(a, ab, ca, depth - 1)
        out += subdivide(b, bc, ab, depth - 1)
        out += subdivide(c, ca, bc, depth - 1)
        out += subdivide(ab, bc, ca, depth - 1)
        return out

    tris = []
    for i in range(1, len(corners) - 1):
        tris += subdivide(corners[0], corners[i], corners[i + 1], subdiv)
    tets = np.array([(0, a, b, c) for a, b, c in tris], dtype=np.intp)
    return Complex3(np.array(verts), tets, None)


# ---------------------------------------------------------------------------
# closed forms


def cone_patch_mass(area: float, r: float) -> float:
    """Mass of the radial cone over a spherical patch of the given area.

    Slicing the cone at radius t scales the patch area by t^2, so the mass is
    the integral of area * t^2 from 0 to r, i.e. area * r^3 / 3.
    """
    return area * r**3 / 3.0


def t8_margin() -> float:
    """Mass excess of the 120-cell cone over the cheapest one-cell replacement.

    Assembled from first principles: the 120 dodecahedral cells carry 12
    pentagonal faces each, shared in pairs, so the skeleton has 120 * 12 / 2 =
    720 spherical pentagons.  Each has all corner angles arccos(-1/3), hence
    area 5 * alpha - 3 * pi, and its radial cone inside the unit ball weighs a
    third of that.  Dropping the cone and instead taking the whole unit sphere
    minus one cell costs 2 * pi^2 * (1 - 1/120).  The difference is positive
    by a wide margin, so the cone cannot be mass-minimizing.
    """
    (cell_type, n_cells), = CELL_INVENTORY["T8"].items()
    faces_per_cell = sum(count for _, count in CELL_TYPES[cell_type].face_inventory)
    n_faces = n_cells * faces_per_cell // 2
    pentagon_area = 5.0 * ALPHA - 3.0 * math.pi
    cone_mass_total = n_faces * cone_patch_mass(pentagon_area, 1.0)
    replacement = S3_VOLUME * (1.0 - 1.0 / n_cells)
    return cone_mass_total - replacement
