"""The nine candidate partitions of the 3-sphere into admissible cells.

Each partition is realized with explicit coordinates and assembled into
a :class:`PartitionComplex` whose local structure is checked against the
soap-film rules: every 2-face borders exactly two cells, every edge
exactly three, every vertex exactly four, and the Euler characteristic
V - E + F - C vanishes.

The two degenerate partitions use minimal CW conventions: the pair of
half 3-spheres carries one marker vertex and a single disk face; the
three-wedge partition carries one marker vertex, one loop edge, and
three half-2-sphere faces.  Marker vertices lie on no polygon cycle and
are exempt from the four-cells-per-vertex rule.

The dodecahedral 120-cell partition is built from the 120 unit
quaternions of the binary icosahedral group; its cells are their
Dirichlet domains, recovered from convex-hull duality.  The fifteen-cell
partition uses the five-cube construction at the edge-balanced size and
is the only one whose cells carry a nonzero realization residual.
"""

import itertools
import json
import math

import numpy as np
from dataclasses import dataclass, field
from scipy.spatial import ConvexHull

from .cells import (
    CELL_TYPES, CellRealization, _face_residuals, _faces_from_planes,
    dodecahedron_directions, face_signatures, five_cube_balanced_rho,
    five_cube_pentagon, five_cube_square, five_cube_vertices, realize_cell,
    simplex_directions, suspension_colatitude, tetrahedron_directions,
)
from .geometry import ALPHA, arc, normalize, plane_normal
from .graphs import (
    ColoredGraph, SearchBudgetExceeded, t9_dual_uniqueness_search,  # noqa: F401
)
from .sphere_trig import (
    mc_cap_volume, rectangle_complement, spherical_ball_bounds,
)

A5 = 0.27091852045622006
B_LONG = 2.365313622849416
S3_VOLUME = 2.0 * math.pi ** 2

LABELS = tuple(f"T{k}" for k in range(1, 10))

EXPECTED_COUNTS = {
    "T1": (1, 0, 1, 2), "T2": (1, 1, 3, 3), "T3": (2, 4, 6, 4),
    "T4": (5, 10, 10, 5), "T5": (8, 16, 14, 6), "T6": (16, 32, 24, 8),
    "T7": (40, 80, 54, 14), "T8": (600, 1200, 720, 120),
    "T9": (45, 90, 60, 15),
}

CELL_INVENTORY = {
    "T1": {1: 2}, "T2": {2: 3}, "T3": {3: 4}, "T4": {4: 5},
    "T5": {4: 2, 5: 4}, "T6": {6: 8}, "T7": {7: 12, 8: 2},
    "T8": {8: 120}, "T9": {6: 5, 10: 10},
}


class RealizationFailed(Exception):
    pass


@dataclass
class Face:
    """One 2-face: vertex cycle, bounding edge ids, bordering cell pair."""

    cycle: tuple
    edges: tuple = ()
    cells: tuple = ()


@dataclass
class PartitionComplex:
    label: str
    vertices: np.ndarray
    edge_keys: list
    faces: list
    cells: list                     # CellRealization per cell
    cell_faces: list                # face ids per cell
    cell_normals: list              # inward half-space normals per cell
    dual: ColoredGraph = None
    dual_weights: dict = field(default_factory=dict)
    residual: float = 0.0
    notes: str = ""

    @property
    def counts(self) -> tuple:
        return (len(self.vertices), len(self.edge_keys), len(self.faces),
                len(self.cells))

    @property
    def euler(self) -> int:
        v, e, f, c = self.counts
        return v - e + f - c

    def face_pairings(self) -> list:
        return [f.cells for f in self.faces]

    def edge_links(self) -> list:
        links = [[] for _ in self.edge_keys]
        for fid, f in enumerate(self.faces):
            for e in f.edges:
                links[e].append(fid)
        return links

    def vertex_links(self) -> dict:
        """Cells per vertex, for vertices lying on at least one cycle."""
        out: dict = {}
        for fid, f in enumerate(self.faces):
            for v in f.cycle:
                out.setdefault(v, set()).update(f.cells)
        return out

    def membership(self, cid: int):
        normals = self.cell_normals[cid]
        return lambda pts: np.all(pts @ normals.T > -1e-12, axis=1)

    def rotated(self, rot: np.ndarray) -> "PartitionComplex":
        cells = [c.rotated(rot) for c in self.cells]
        normals = [n @ rot.T for n in self.cell_normals]
        return PartitionComplex(
            self.label, self.vertices @ rot.T, list(self.edge_keys),
            [Face(f.cycle, f.edges, f.cells) for f in self.faces],
            cells, [tuple(cf) for cf in self.cell_faces], normals,
            self.dual, dict(self.dual_weights), self.residual, self.notes)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def _derive_edges(faces: list) -> list:
    """Assign edge ids from vertex pairs; fill each face's edge tuple."""
    index: dict = {}
    keys = []
    for f in faces:
        n = len(f.cycle)
        ids = []
        for i in range(n):
            key = tuple(sorted((f.cycle[i], f.cycle[(i + 1) % n])))
            if key not in index:
                index[key] = len(keys)
                keys.append(key)
            ids.append(index[key])
        f.edges = tuple(ids)
    return keys


def _bigon_residuals(vertices, f) -> list:
    """Corner angles of a bigon against the meeting angle."""
    out = []
    for v, other in ((f.cycle[0], f.cycle[1]), (f.cycle[1], f.cycle[0])):
        p = vertices[v]
        dirs = []
        for mid in f.edge_dirs:
            t = mid - (mid @ p) * p
            dirs.append(t / np.linalg.norm(t))
        out.append(math.acos(max(-1.0, min(1.0, dirs[0] @ dirs[1])))
                   - ALPHA)
    return out


def _face_residual(vertices, f) -> float:
    if len(f.cycle) < 2:
        return 0.0
    if len(f.cycle) == 2:
        return float(np.max(np.abs(_bigon_residuals(vertices, f))))
    r = _face_residuals(vertices, [list(f.cycle)])
    return float(np.max(np.abs(r)))


def _cell_realization(label, index, vertices, faces, face_ids,
                      residual) -> CellRealization:
    cycles = [faces[fid].cycle for fid in face_ids]
    used = sorted({v for cyc in cycles for v in cyc})
    local = {v: i for i, v in enumerate(used)}
    local_faces = [[local[v] for v in cyc] for cyc in cycles]
    edges = sorted({tuple(sorted((f[i], f[(i + 1) % len(f)])))
                    for f in local_faces if len(f) >= 3
                    for i in range(len(f))})
    verts = (vertices[used] if used
             else np.zeros((0, vertices.shape[1] if vertices.size else 4)))
    status = "exact" if residual < 1e-8 else "least-squares"
    return CellRealization(CELL_TYPES[index], verts, edges, local_faces,
                           status, residual=residual)


def _inward_normals(vertices, faces, face_ids) -> np.ndarray:
    cycles = [faces[fid].cycle for fid in face_ids]
    used = sorted({v for cyc in cycles for v in cyc})
    center = normalize(vertices[used].sum(axis=0))
    normals = []
    for cyc in cycles:
        n = plane_normal(vertices[list(cyc)])
        if n @ center < 0:
            n = -n
        normals.append(n)
    return np.array(normals)


def _assemble(label, vertices, faces, cellspec, cell_normals=None,
              edge_keys=None, notes="") -> PartitionComplex:
    """Wire faces to cells, derive edges, measure residuals, build cells.

    ``cellspec`` is a list of (cell type index, face id tuple); normals
    for the half-space membership tests are derived from face planes for
    full-dimensional cells unless supplied.
    """
    if edge_keys is None:
        edge_keys = _derive_edges(faces)
    borders = [[] for _ in faces]
    for cid, (_, fids) in enumerate(cellspec):
        for fid in fids:
            borders[fid].append(cid)
    for fid, f in enumerate(faces):
        if len(borders[fid]) != 2:
            raise RealizationFailed(
                f"{label}: face {fid} borders {len(borders[fid])} cells")
        f.cells = tuple(borders[fid])
    face_res = [_face_residual(vertices, f) for f in faces]
    cells = []
    for index, fids in cellspec:
        res = max((face_res[fid] for fid in fids), default=0.0)
        cells.append(_cell_realization(label, index, vertices, faces,
                                       fids, res))
    if cell_normals is None:
        cell_normals = [_inward_normals(vertices, faces, fids)
                        for _, fids in cellspec]
    p = PartitionComplex(label, vertices, edge_keys, faces, cells,
                         [tuple(fids) for _, fids in cellspec],
                         cell_normals, residual=max(face_res, default=0.0),
                         notes=notes)
    p.dual = dual_graph(p)
    p.dual_weights = p.dual.weights
    return p


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _build_t1() -> PartitionComplex:
    # minimal CW structure: marker vertex on the equator, one disk face
    vertices = np.array([[1.0, 0.0, 0.0, 0.0]])
    faces = [Face(cycle=())]
    e4 = np.array([0.0, 0.0, 0.0, 1.0])
    normals = [np.array([e4]), np.array([-e4])]
    return _assemble("T1", vertices, faces, [(1, (0,)), (1, (0,))],
                     cell_normals=normals, edge_keys=[],
                     notes="two half 3-spheres split by the w = 0 equator")


def _build_t2() -> PartitionComplex:
    # three wedges of dihedral 2pi/3 around the (x, y) great circle;
    # one marker vertex, one loop edge bounding all three half-sphere
    # faces
    vertices = np.array([[1.0, 0.0, 0.0, 0.0]])
    faces = [Face(cycle=(), edges=(0,)) for _ in range(3)]
    spec = []
    normals = []
    third = 2.0 * math.pi / 3.0
    for k in range(3):
        lo = third * k
        hi = third * (k + 1)
        n1 = np.array([0.0, 0.0, math.cos(lo), -math.sin(lo)])
        n2 = np.array([0.0, 0.0, -math.cos(hi), math.sin(hi)])
        normals.append(np.array([n1, n2]))
        spec.append((2, (k, (k + 1) % 3)))
    return _assemble("T2", vertices, faces, spec, cell_normals=normals,
                     edge_keys=[(0, 0)],
                     notes="three wedges around the (x, y) circle; "
                           "longitude sectors of width 2pi/3 in (z, w)")


def _build_t3() -> PartitionComplex:
    # suspension of the tetrahedral partition of the 2-sphere: two
    # poles, four half-circle edges through the tetrahedron directions,
    # six bigon faces, four triangular-wedge cells
    u = tetrahedron_directions()
    vertices = np.array([[0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 0.0, -1.0]])
    edge_keys = [(0, 1)] * 4
    mids = np.hstack([u, np.zeros((4, 1))])
    pairs = list(itertools.combinations(range(4), 2))
    faces = []
    for i, j in pairs:
        f = Face(cycle=(0, 1), edges=(i, j))
        f.edge_dirs = (mids[i], mids[j])
        faces.append(f)
    spec = []
    normals = []
    for m in range(4):
        tri = [k for k in range(4) if k != m]
        fids = tuple(fid for fid, (i, j) in enumerate(pairs)
                     if i in tri and j in tri)
        spec.append((3, fids))
        center = u[tri].sum(axis=0)
        ns = []
        for a, b in itertools.combinations(tri, 2):
            n3 = np.cross(u[a], u[b])
            if n3 @ center < 0:
                n3 = -n3
            ns.append([*n3, 0.0])
        normals.append(np.array(ns))
    return _assemble("T3", vertices, faces, spec, cell_normals=normals,
                     edge_keys=edge_keys,
                     notes="suspension of the tetrahedral cone structure")


def _build_t4() -> PartitionComplex:
    vertices = simplex_directions()
    faces = [Face(cycle=t)
             for t in itertools.combinations(range(5), 3)]
    spec = []
    for m in range(5):
        fids = tuple(fid for fid, f in enumerate(faces)
                     if m not in f.cycle)
        spec.append((4, fids))
    return _assemble("T4", vertices, faces, spec,
                     notes="boundary complex of the regular 4-simplex")


def _build_t5() -> PartitionComplex:
    # two tetrahedral caps at +-w suspended over the tetrahedron
    # directions, with four triangular prisms between them
    u = tetrahedron_directions()
    c, s = suspension_colatitude(-1.0 / 3.0, -1.0 / 3.0)
    top = np.hstack([s * u, np.full((4, 1), c)])
    bot = np.hstack([s * u, np.full((4, 1), -c)])
    vertices = np.vstack([top, bot])           # ids: i top, 4 + i bottom
    faces = []
    tri_ids = {}
    for sign, off in ((1, 0), (-1, 4)):
        for m in range(4):
            cyc = tuple(off + k for k in range(4) if k != m)
            tri_ids[(sign, m)] = len(faces)
            faces.append(Face(cycle=cyc))
    rect_ids = {}
    for j, k in itertools.combinations(range(4), 2):
        rect_ids[(j, k)] = len(faces)
        faces.append(Face(cycle=(j, k, 4 + k, 4 + j)))
    spec = [(4, tuple(tri_ids[(1, m)] for m in range(4))),
            (4, tuple(tri_ids[(-1, m)] for m in range(4)))]
    for i in range(4):
        others = [k for k in range(4) if k != i]
        fids = [tri_ids[(1, i)], tri_ids[(-1, i)]]
        fids += [rect_ids[tuple(sorted(p))]
                 for p in itertools.combinations(others, 2)]
        spec.append((5, tuple(fids)))
    return _assemble("T5", vertices, faces, spec,
                     notes="tetrahedral suspension prism")


def _build_t6() -> PartitionComplex:
    corners = list(itertools.product((0.5, -0.5), repeat=4))
    vertices = np.array(corners)
    vid = {c: i for i, c in enumerate(corners)}
    faces = []
    square_ids = {}
    for a, b in itertools.combinations(range(4), 2):
        free = [k for k in range(4) if k not in (a, b)]
        for sa, sb in itertools.product((0.5, -0.5), repeat=2):
            cyc = []
            for fa, fb in ((0.5, 0.5), (0.5, -0.5), (-0.5, -0.5),
                           (-0.5, 0.5)):
                p = [0.0] * 4
                p[a], p[b] = sa, sb
                p[free[0]], p[free[1]] = fa, fb
                cyc.append(vid[tuple(p)])
            square_ids[(a, sa, b, sb)] = len(faces)
            faces.append(Face(cycle=tuple(cyc)))
    spec = []
    for axis in range(4):
        for sign in (0.5, -0.5):
            fids = []
            for (a, sa, b, sb), fid in square_ids.items():
                if (a == axis and sa == sign) or (b == axis and sb == sign):
                    fids.append(fid)
            spec.append((6, tuple(fids)))
    return _assemble("T6", vertices, faces, spec,
                     notes="radial projection of the 4-cube boundary")


def _build_t7() -> PartitionComplex:
    d = dodecahedron_directions()
    pents = [tuple(int(v) for v in ring) for ring in
             _faces_from_planes(d, [])]
    mu = math.sqrt(5.0) / 3.0
    c, s = suspension_colatitude(mu, 1.0 / 3.0)
    top = np.hstack([s * d, np.full((20, 1), c)])
    bot = np.hstack([s * d, np.full((20, 1), -c)])
    vertices = np.vstack([top, bot])
    faces = []
    pent_ids = {}
    for sign, off in ((1, 0), (-1, 20)):
        for fi, cyc in enumerate(pents):
            pent_ids[(sign, fi)] = len(faces)
            faces.append(Face(cycle=tuple(off + v for v in cyc)))
    dodeca_edges = sorted({tuple(sorted((cyc[i], cyc[(i + 1) % 5])))
                           for cyc in pents for i in range(5)})
    rect_ids = {}
    for p, q in dodeca_edges:
        rect_ids[(p, q)] = len(faces)
        faces.append(Face(cycle=(p, q, 20 + q, 20 + p)))
    spec = [(8, tuple(pent_ids[(1, fi)] for fi in range(12))),
            (8, tuple(pent_ids[(-1, fi)] for fi in range(12)))]
    for fi, cyc in enumerate(pents):
        fids = [pent_ids[(1, fi)], pent_ids[(-1, fi)]]
        for i in range(5):
            fids.append(rect_ids[tuple(sorted((cyc[i], cyc[(i + 1) % 5])))])
        spec.append((7, tuple(fids)))
    return _assemble("T7", vertices, faces, spec,
                     notes="dodecahedral suspension prism")


def binary_icosahedral_quaternions() -> np.ndarray:
    """The 120 unit quaternions whose Dirichlet domains tile the
    3-sphere into regular dodecahedra."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    pts = set()
    for i in range(4):
        for s in (1.0, -1.0):
            q = [0.0] * 4
            q[i] = s
            pts.add(tuple(q))
    for signs in itertools.product((0.5, -0.5), repeat=4):
        pts.add(signs)
    base = (0.0, 0.5, 0.5 / phi, 0.5 * phi)
    even = [p for p in itertools.permutations(range(4))
            if _permutation_parity(p) == 0]
    for perm in even:
        for signs in itertools.product((1.0, -1.0), repeat=4):
            q = tuple(signs[i] * base[perm[i]] for i in range(4))
            pts.add(tuple(0.0 if x == -0.0 else x for x in q))
    out = np.array(sorted(pts))
    if len(out) != 120:
        raise RealizationFailed(f"expected 120 sites, got {len(out)}")
    return out


def _permutation_parity(p) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p))
              if p[i] > p[j])
    return inv % 2


def _build_t8(sites=None) -> PartitionComplex:
    if sites is None:
        sites = binary_icosahedral_quaternions()
    hull = ConvexHull(sites)
    simplices = hull.simplices
    neighbors = hull.neighbors
    # one partition vertex per hull facet: the circumcenter direction
    vertices = np.array([normalize(eq[:4]) for eq in hull.equations])
    for fi, simp in enumerate(simplices):
        if vertices[fi] @ sites[simp[0]] < 0:
            vertices[fi] = -vertices[fi]
    # facets around each hull edge, walked through shared ridges
    by_edge: dict = {}
    for fi, simp in enumerate(simplices):
        for a, b in itertools.combinations(sorted(simp), 2):
            by_edge.setdefault((a, b), []).append(fi)
    faces = []
    face_of_edge = {}
    for (a, b), fis in sorted(by_edge.items()):
        cyc = [fis[0]]
        while len(cyc) < len(fis):
            cur = cyc[-1]
            step = None
            for k in range(4):
                if simplices[cur][k] in (a, b):
                    continue
                g = neighbors[cur][k]
                if g in fis and g not in cyc:
                    step = g
                    break
            if step is None:
                raise RealizationFailed("T8: open ridge walk")
            cyc.append(step)
        face_of_edge[(a, b)] = len(faces)
        faces.append(Face(cycle=tuple(cyc)))
    spec = []
    for s in range(120):
        fids = tuple(fid for (a, b), fid in face_of_edge.items()
                     if s in (a, b))
        spec.append((8, fids))
    p = _assemble("T8", vertices, faces, spec,
                  notes="Dirichlet domains of the 120 unit quaternions")
    p.sites = sites
    return p


def _build_t9() -> PartitionComplex:
    rho = five_cube_balanced_rho()
    keyed = five_cube_vertices(rho)
    keys = sorted(keyed)
    vid = {k: i for i, k in enumerate(keys)}
    vertices = np.array([keyed[k] for k in keys])
    faces = []
    square_ids = {}
    for i in range(5):
        for j, k in itertools.combinations([x for x in range(5) if x != i],
                                           2):
            square_ids[(i, j, k)] = len(faces)
            faces.append(Face(cycle=tuple(
                vid[key] for key in five_cube_square(i, j, k))))
    pent_ids = {}
    for i, j in itertools.combinations(range(5), 2):
        for l in range(5):
            if l in (i, j):
                continue
            pent_ids[(i, j, l)] = len(faces)
            faces.append(Face(cycle=tuple(
                vid[key] for key in five_cube_pentagon(i, j, l))))
    spec = []
    for i in range(5):
        fids = tuple(square_ids[(i, j, k)] for j, k in
                     itertools.combinations(
                         [x for x in range(5) if x != i], 2))
        spec.append((6, fids))
    for tri in itertools.combinations(range(5), 3):
        fids = []
        for i in tri:
            j, k = sorted(set(tri) - {i})
            fids.append(square_ids[(i, j, k)])
        for i, j in itertools.combinations(tri, 2):
            for l in set(range(5)) - set(tri):
                fids.append(pent_ids[(i, j, l)])
        spec.append((10, tuple(fids)))
    notes = ("five-cube construction at the edge-balanced size "
             f"rho = {rho:.12f}; cells carry the family's angle defect")
    return _assemble("T9", vertices, faces, spec, notes=notes)


_BUILDERS = {
    "T1": _build_t1, "T2": _build_t2, "T3": _build_t3, "T4": _build_t4,
    "T5": _build_t5, "T6": _build_t6, "T7": _build_t7, "T8": _build_t8,
    "T9": _build_t9,
}


def build_partition(label: str, rotation=None) -> PartitionComplex:
    """Construct one of the nine candidate partitions.

    With a rotation, the dodecahedral 120-cell partition is re-derived
    from rotated sites (exercising the hull duality); the others are
    built and rigidly rotated.
    """
    if label not in _BUILDERS:
        raise ValueError(f"unknown partition {label!r}")
    if rotation is None:
        return _BUILDERS[label]()
    rot = np.asarray(rotation, dtype=float)
    if label == "T8":
        return _build_t8(binary_icosahedral_quaternions() @ rot.T)
    return _BUILDERS[label]().rotated(rot)


# ---------------------------------------------------------------------------
# dual graphs
# ---------------------------------------------------------------------------

def dual_graph(p: PartitionComplex) -> ColoredGraph:
    """One vertex per cell (colored c1..c11), one edge per adjacent
    pair; parallel shared faces collapse, multiplicity kept in the
    ``weights`` attribute."""
    g = ColoredGraph()
    for c in p.cells:
        g.add_vertex(f"c{c.index}")
    weights: dict = {}
    for f in p.faces:
        a, b = f.cells
        if a == b:
            raise RealizationFailed(f"{p.label}: face inside one cell")
        key = (min(a, b), max(a, b))
        weights[key] = weights.get(key, 0) + 1
        g.add_edge(*key)
    g.weights = weights
    return g


def ego_graph(g: ColoredGraph, v: int) -> ColoredGraph:
    """Induced subgraph on the neighbors of v."""
    return g.ego_graph(v)


def recolor(g: ColoredGraph, mapping: dict) -> ColoredGraph:
    out = g.copy()
    out.colors = [mapping.get(c, c) for c in g.colors]
    return out


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate(p: PartitionComplex) -> dict:
    """Local soap-film structure, Euler characteristic, and counts."""
    v, e, f, c = p.counts
    face_cells_ok = all(len(set(fc.cells)) == 2 for fc in p.faces)
    links = p.edge_links()
    edge_faces_ok = all(len(l) == 3 for l in links)
    edge_cells_ok = True
    for faces_at in links:
        cells_at = set()
        for fid in faces_at:
            cells_at.update(p.faces[fid].cells)
        if len(cells_at) != 3:
            edge_cells_ok = False
    vertex_ok = all(len(cells) == 4
                    for cells in p.vertex_links().values())
    inventory: dict = {}
    for cell in p.cells:
        inventory[cell.index] = inventory.get(cell.index, 0) + 1
    report = {
        "label": p.label,
        "counts": p.counts,
        "counts_ok": p.counts == EXPECTED_COUNTS[p.label],
        "euler": p.euler,
        "euler_ok": p.euler == 0,
        "face_cells_ok": face_cells_ok,
        "edge_faces_ok": edge_faces_ok,
        "edge_cells_ok": edge_cells_ok,
        "vertex_cells_ok": vertex_ok,
        "inventory": inventory,
        "inventory_ok": inventory == CELL_INVENTORY[p.label],
        "residual": p.residual,
    }
    report["ok"] = all(report[k] for k in
                       ("counts_ok", "euler_ok", "face_cells_ok",
                        "edge_faces_ok", "edge_cells_ok",
                        "vertex_cells_ok", "inventory_ok"))
    return report


def mc_volume_closure(p: PartitionComplex, samples: int = 10 ** 6,
                      seed: int = 0, block: int = 1 << 16) -> dict:
    """Monte Carlo cell volumes and their closure against the volume of
    the 3-sphere.  Sampling is blocked and seeded per block, so results
    are independent of the block size actually used."""
    ncells = len(p.cells)
    if p.label == "T8":
        sites = getattr(p, "sites", None)
        if sites is None:
            sites = binary_icosahedral_quaternions()

        def classify(pts):
            return np.argmax(pts @ sites.T, axis=1), 0
    else:
        normal_mat = p.cell_normals

        def classify(pts):
            out = np.full(len(pts), -1)
            claims = np.zeros(len(pts), dtype=np.int64)
            for cid in range(ncells):
                hit = np.all(pts @ normal_mat[cid].T > -1e-12, axis=1)
                claims += hit
                out[hit & (out < 0)] = cid
            return out, int(np.count_nonzero(claims > 1))
    hits = np.zeros(ncells, dtype=np.int64)
    unclaimed = 0
    overclaimed = 0
    done = 0
    b = 0
    while done < samples:
        take = min(block, samples - done)
        rng = np.random.default_rng((seed, b))
        pts = rng.standard_normal((take, 4))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        got, multi = classify(pts)
        unclaimed += int(np.count_nonzero(got < 0))
        overclaimed += multi
        hits += np.bincount(got[got >= 0], minlength=ncells)
        done += take
        b += 1
    vols = hits / samples * S3_VOLUME
    total = float(vols.sum())
    return {
        "volumes": [float(x) for x in vols],
        "total": total,
        "relative_gap": abs(total - S3_VOLUME) / S3_VOLUME,
        "unclaimed": unclaimed,
        "overclaimed": overclaimed,
        "samples": samples,
    }


def build_all(rotation=None) -> dict:
    return {label: build_partition(label, rotation) for label in LABELS}


# ---------------------------------------------------------------------------
# adjacency obstructions
# ---------------------------------------------------------------------------

def _tag_faces(p: PartitionComplex) -> list:
    from .cells import _classify_face

    tags = []
    for f in p.faces:
        if len(f.cycle) < 3:
            tags.append("bigon" if len(f.cycle) == 2 else "disk")
            continue
        pts = p.vertices[list(f.cycle)]
        n = len(pts)
        sides = np.array([arc(pts[i], pts[(i + 1) % n]) for i in range(n)])
        tags.append(_classify_face(p.cells[f.cells[0]].index, sides))
    return tags


def adjacent_pairs_sharing(p: PartitionComplex, tag: str, side_arc: float,
                           tol: float = 1e-6) -> list:
    """Edges of the given arc length where two or more faces with the
    given shape tag meet; each hit as (edge id, matching face ids)."""
    tags = _tag_faces(p)
    found = []
    for eid, fids in enumerate(p.edge_links()):
        a, b = p.edge_keys[eid]
        if abs(arc(p.vertices[a], p.vertices[b]) - side_arc) > tol:
            continue
        hits = tuple(fid for fid in fids if tags[fid] == tag)
        if len(hits) >= 2:
            found.append((eid, hits))
    return found


def obstruction_c7_c7(parts: dict = None) -> dict:
    """No two prism rectangles meet along a short pentagon edge.

    The dodecahedral prism's rectangles pair off only across their long
    vertical sides; every short edge carries at most one rectangle.  A
    scanner control on the tetrahedral prism checks the mirror-image
    statement for its rectangles (none share a long side), and the
    hypercube partition supplies a positive control where the scanner
    must find square-square adjacencies.
    """
    if parts is None:
        parts = {}
    t7 = parts.get("T7") or build_partition("T7")
    t5 = parts.get("T5") or build_partition("T5")
    t6 = parts.get("T6") or build_partition("T6")
    a3 = math.acos(-0.25)
    a4 = math.pi / 3.0
    bad = adjacent_pairs_sharing(t7, "r7", A5)
    bad_long_r5 = adjacent_pairs_sharing(t5, "r5", a3)
    square_pairs = adjacent_pairs_sharing(t6, "regular-4", a4)
    return {
        "r7_pairs_on_short_edges": bad,
        "r5_pairs_on_long_edges": bad_long_r5,
        "holds": not bad and not bad_long_r5,
        "control_square_pairs": len(square_pairs),
        "control_found": bool(square_pairs),
    }


def _pentagon_apexes(sides: np.ndarray, tol: float = 1e-6) -> list:
    """Corners whose two incident sides are equal; corner i sits between
    sides i-1 and i."""
    n = len(sides)
    return [i for i in range(n)
            if abs(sides[i - 1] - sides[i % n]) < tol]


def _scan_pentagon_assembly(cell: CellRealization, tol: float = 1e-6):
    """Base-to-base edge pairs and triple-apex vertices among the
    pentagonal faces of one realized cell.

    A pentagon's apex is the corner between its equal sides; its base is
    the opposite side (two steps along).  The scan reports every edge
    lying in base position for two pentagons at once, and every vertex
    where at least three pentagons put an apex corner.
    """
    pents = [f for f in cell.faces if len(f) == 5]
    base_edges: dict = {}
    apex_at: dict = {}
    for fid, f in enumerate(pents):
        pts = cell.vertices[list(f)]
        sides = np.array([arc(pts[i], pts[(i + 1) % 5]) for i in range(5)])
        for apex in _pentagon_apexes(sides, tol):
            apex_at.setdefault(f[apex], []).append(fid)
            base = (apex + 2) % 5
            key = tuple(sorted((f[base], f[(base + 1) % 5])))
            base_edges.setdefault(key, []).append(fid)
    base_pairs = [(e, tuple(fs)) for e, fs in sorted(base_edges.items())
                  if len(set(fs)) >= 2]
    apex_triples = [(v, tuple(fs)) for v, fs in sorted(apex_at.items())
                    if len(set(fs)) >= 3]
    return base_pairs, apex_triples


def obstruction_c9() -> dict:
    """The antiprismatic nonahedron never lets two of its pentagons meet
    base-to-base, nor three apex corners share a vertex.

    Every pentagon's base is taken by a square face, and each apex-ring
    vertex carries exactly one apex corner.  The regular dodecahedron is
    the positive control: all its corners count as apexes, so the
    scanner reports base pairs and apex triples there.
    """
    c9 = realize_cell(9)
    base_pairs, apex_triples = _scan_pentagon_assembly(c9)
    c8 = realize_cell(8)
    ctrl_pairs, ctrl_triples = _scan_pentagon_assembly(c8)
    return {
        "base_pairs": base_pairs,
        "apex_triples": apex_triples,
        "holds": not base_pairs and not apex_triples,
        "control_base_pairs": len(ctrl_pairs),
        "control_apex_triples": len(ctrl_triples),
        "control_found": bool(ctrl_pairs) and bool(ctrl_triples),
    }


def c8_quotient_exclusion(samples: int = 10 ** 5, seed: int = 5) -> dict:
    """Volume chain ruling out coarser assemblies of the dodecahedral
    cell: the inscribed-ball floor for a cell with the dodecahedron's
    inradius exceeds the measured cell volume, and sits below the volume
    quota of any 60-cell (or coarser) partition of the 3-sphere."""
    from .cells import cell_volume_mc

    gap = math.pi - B_LONG
    r = gap / 2.0
    ball_flat, ball_exact = spherical_ball_bounds(r)
    vol, stderr = cell_volume_mc(realize_cell(8), samples=samples,
                                 seed=seed)
    quota60 = S3_VOLUME / 60.0
    quota40 = S3_VOLUME / 40.0
    return {
        "long_side": B_LONG,
        "gap": gap,
        "inradius": r,
        "ball_flat": ball_flat,
        "ball_exact": ball_exact,
        "quota_60": quota60,
        "quota_40": quota40,
        "ball_below_quota_60": ball_flat < quota60,
        "quota_60_below_40": quota60 < quota40,
        "cell_volume": vol,
        "cell_volume_stderr": stderr,
        "cell_below_ball": vol < ball_exact,
        "excluded": ball_flat < quota60 and vol < ball_exact,
    }


# ---------------------------------------------------------------------------
# bounded closure search over the two prism-compatible cells
# ---------------------------------------------------------------------------

def _glue_template(index: int) -> dict:
    c = realize_cell(index)
    faces = [list(f) for f in c.faces]
    edge_id: dict = {}
    side_edge = []
    side_label = []
    for f in faces:
        n = len(f)
        eids = []
        labels = []
        for i in range(n):
            key = tuple(sorted((f[i], f[(i + 1) % n])))
            if key not in edge_id:
                edge_id[key] = len(edge_id)
            eids.append(edge_id[key])
            labels.append(int(round(
                arc(c.vertices[f[i]], c.vertices[f[(i + 1) % n]]) * 1e6)))
        side_edge.append(eids)
        side_label.append(tuple(labels))
    # one representative face per label pattern (for fresh-cell gluing,
    # all faces of a pattern are equivalent under the cell's symmetry)
    fresh_faces = []
    seen = set()
    for fid, labels in enumerate(side_label):
        key = tuple(sorted(labels))
        if key not in seen:
            seen.add(key)
            fresh_faces.append(fid)
    return {
        "index": index, "faces": faces, "n_verts": len(c.vertices),
        "n_edges": len(edge_id), "side_edge": side_edge,
        "side_label": side_label, "fresh_faces": fresh_faces,
    }


def _alignments(labels_a: tuple, labels_b: tuple) -> tuple:
    """Label-preserving identifications of two face boundaries, as
    (offset, flip) pairs: vertex i of A meets vertex offset+i (flip +1)
    or offset-i (flip -1) of B."""
    n = len(labels_a)
    if n != len(labels_b):
        return ()
    out = []
    for k in range(n):
        if all(labels_a[i] == labels_b[(k + i) % n] for i in range(n)):
            out.append((k, 1))
        if all(labels_a[i] == labels_b[(k - i - 1) % n] for i in range(n)):
            out.append((k, -1))
    return tuple(out)


class _GlueSearch:
    """Depth-first closed-complex search with an undo trail.

    Edge and vertex identification classes live in a union-find whose
    merges are reverted on backtrack; the per-class cell sets are bit
    masks, so the at-most-three-cells-per-edge and
    four-distinct-cells-per-vertex constraints are popcount checks.
    """

    def __init__(self, templates, max_cells, node_budget):
        self.templates = templates
        self.max_cells = max_cells
        self.budget = node_budget
        self.types = []
        self.matched = {}
        self.parent = {}
        self.size = {}
        self.cellmask = {}
        self.trail = []
        self.nodes = 0
        self.solutions = {}
        self.align_cache = {}

    def aligned(self, la, lb):
        key = (la, lb)
        if key not in self.align_cache:
            self.align_cache[key] = _alignments(la, lb)
        return self.align_cache[key]

    def add_cell(self, index):
        cid = len(self.types)
        self.types.append(index)
        t = self.templates[index]
        for e in range(t["n_edges"]):
            key = ("e", cid, e)
            self.parent[key] = key
            self.size[key] = 1
            self.cellmask[key] = 1 << cid
        for v in range(t["n_verts"]):
            key = ("v", cid, v)
            self.parent[key] = key
            self.size[key] = 1
            self.cellmask[key] = 1 << cid
        self.trail.append(("c", cid, t["n_edges"], t["n_verts"]))
        return cid

    def find(self, x):
        p = self.parent
        while p[x] != x:
            x = p[x]
        return x

    def union(self, a, b, limit):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return True
        ns = self.size[ra] + self.size[rb]
        if ns > limit:
            return False
        nc = self.cellmask[ra] | self.cellmask[rb]
        if nc.bit_count() != ns:
            return False
        self.trail.append(("u", rb, ra, self.size[ra], self.cellmask[ra]))
        self.parent[rb] = ra
        self.size[ra] = ns
        self.cellmask[ra] = nc
        return True

    def rollback(self, mark):
        while len(self.trail) > mark:
            op = self.trail.pop()
            if op[0] == "u":
                _, rb, ra, osize, omask = op
                self.parent[rb] = rb
                self.size[ra] = osize
                self.cellmask[ra] = omask
            elif op[0] == "m":
                del self.matched[op[1]]
                del self.matched[op[2]]
            else:
                _, cid, ne, nv = op
                self.types.pop()
                for e in range(ne):
                    key = ("e", cid, e)
                    del self.parent[key], self.size[key], self.cellmask[key]
                for v in range(nv):
                    key = ("v", cid, v)
                    del self.parent[key], self.size[key], self.cellmask[key]

    def glue(self, a, fa, b, fb, offset, flip):
        ta = self.templates[self.types[a]]
        tb = self.templates[self.types[b]]
        ca, cb = ta["faces"][fa], tb["faces"][fb]
        ea, eb = ta["side_edge"][fa], tb["side_edge"][fb]
        n = len(ca)
        self.matched[(a, fa)] = (b, fb)
        self.matched[(b, fb)] = (a, fa)
        self.trail.append(("m", (a, fa), (b, fb)))
        for i in range(n):
            if flip == 1:
                jv, je = (offset + i) % n, (offset + i) % n
            else:
                jv, je = (offset - i) % n, (offset - i - 1) % n
            if not self.union(("v", a, ca[i]), ("v", b, cb[jv]), 4):
                return False
            if not self.union(("e", a, ea[i]), ("e", b, eb[je]), 3):
                return False
        return True

    def lowest_open(self):
        for cid, t in enumerate(self.types):
            for fid in range(len(self.templates[t]["faces"])):
                if (cid, fid) not in self.matched:
                    return (cid, fid)
        return None

    def complete(self):
        for key, r in self.parent.items():
            if key != r:
                continue
            want = 3 if key[0] == "e" else 4
            if self.size[key] != want:
                return False
        return True

    def record(self):
        from .graphs import canonical_form

        g = ColoredGraph()
        for t in self.types:
            g.add_vertex(f"c{t}")
        for (a, fa), (b, fb) in self.matched.items():
            if (a, fa) < (b, fb) and not g.has_edge(a, b):
                g.add_edge(a, b)
        self.solutions.setdefault(canonical_form(g),
                                  tuple(sorted(self.types)))

    def dfs(self, allowed_fresh):
        if self.nodes >= self.budget:
            raise SearchBudgetExceeded(
                f"closure search exceeded {self.budget} nodes")
        self.nodes += 1
        target = self.lowest_open()
        if target is None:
            if self.complete():
                self.record()
            return
        a, fa = target
        la = self.templates[self.types[a]]["side_label"][fa]
        for b in range(len(self.types)):
            if b == a:
                continue
            tb = self.templates[self.types[b]]
            for fb in range(len(tb["faces"])):
                if (b, fb) in self.matched:
                    continue
                for offset, flip in self.aligned(la,
                                                 tb["side_label"][fb]):
                    mark = len(self.trail)
                    if self.glue(a, fa, b, fb, offset, flip):
                        self.dfs(allowed_fresh)
                    self.rollback(mark)
        if len(self.types) < self.max_cells:
            for index in allowed_fresh:
                t = self.templates[index]
                for fb in t["fresh_faces"]:
                    aligns = self.aligned(la, t["side_label"][fb])
                    if not aligns:
                        continue
                    mark = len(self.trail)
                    cid = self.add_cell(index)
                    if self.glue(a, fa, cid, fb, *aligns[0]):
                        self.dfs(allowed_fresh)
                    self.rollback(mark)


def _cell_volume_table(alphabet, samples=10 ** 5, seed=7) -> dict:
    from .cells import cell_volume_mc

    out = {}
    for index in alphabet:
        out[index] = cell_volume_mc(realize_cell(index), samples=samples,
                                    seed=seed)
    return out


def glue_closure_search(max_cells: int = 16, node_budget: int = 10 ** 7,
                        alphabet: tuple = (7, 8),
                        volume_sigma: float = 5.0) -> dict:
    """Exhaustive closed-complex search over a small cell alphabet.

    Starting from a single cell, repeatedly glues the lowest open face
    to an open face of an existing cell or to a fresh cell, keeping
    every edge class in at most three distinct cells and every vertex
    class in at most four.  A complete matching with every edge in
    exactly three cells and every vertex in exactly four is a closed
    candidate complex; solutions are deduplicated by the canonical form
    of their dual graph.  Complexes containing the first alphabet cell
    are rooted there; later roots exclude the earlier types, so each
    closure is enumerated from exactly one root.

    Closed complexes satisfying the local rules need not live on the
    3-sphere: central quotients pass every local check (the cube
    alphabet, for instance, also closes as four cubes — the projective
    identification of the hypercube partition).  Measured cell volumes
    separate them: a closure assembles into a sphere partition only if
    its volumes sum to 2π².  With the dodecahedron and its prism as the
    alphabet, the unique sphere closure within sixteen cells is the
    suspension arrangement of two caps and twelve prisms.
    """
    templates = {i: _glue_template(i) for i in alphabet}
    search = _GlueSearch(templates, max_cells, node_budget)
    for k, index in enumerate(alphabet):
        search.types = []
        search.matched = {}
        search.parent = {}
        search.size = {}
        search.cellmask = {}
        search.trail = []
        search.add_cell(index)
        search.dfs(tuple(alphabet[k:]))
    volumes = _cell_volume_table(alphabet)
    closures = []
    for comp in sorted(search.solutions.values()):
        total = sum(volumes[i][0] for i in comp)
        spread = volume_sigma * math.sqrt(
            sum(volumes[i][1] ** 2 for i in comp))
        closures.append({
            "composition": comp,
            "volume": total,
            "volume_spread": spread,
            "closes_sphere": abs(total - S3_VOLUME) < spread,
        })
    return {
        "solutions": len(closures),
        "compositions": [c["composition"] for c in closures],
        "closures": closures,
        "sphere_closures": [c["composition"] for c in closures
                            if c["closes_sphere"]],
        "nodes_used": search.nodes,
        "max_cells": max_cells,
    }


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def partition_to_json(p: PartitionComplex) -> str:
    payload = {
        "label": p.label,
        "counts": list(p.counts),
        "euler": p.euler,
        "vertices": [list(map(float, v)) for v in p.vertices],
        "faces": [{"cycle": list(map(int, f.cycle)),
                   "cells": list(map(int, f.cells))} for f in p.faces],
        "cells": [{"type": c.index, "status": c.status,
                   "residual": c.residual} for c in p.cells],
        "residual": p.residual,
        "notes": p.notes,
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def partition_to_off(p: PartitionComplex) -> str:
    """OFF text with 4-component vertices and fan-triangulated faces."""
    tris = []
    for f in p.faces:
        cyc = f.cycle
        for i in range(1, len(cyc) - 1):
            tris.append((cyc[0], cyc[i], cyc[i + 1]))
    lines = ["OFF", f"{len(p.vertices)} {len(tris)} {len(p.edge_keys)}"]
    for v in p.vertices:
        lines.append(" ".join(f"{x:.17g}" for x in v))
    for t in tris:
        lines.append("3 " + " ".join(str(i) for i in t))
    return "\n".join(lines) + "\n"
