"""Mass kernel tests: simplex volumes, hulls, cone complexes, clipping."""

import math

import numpy as np
import pytest

from plcones import mass as M
from plcones import partitions as P

ALPHA = math.acos(-1.0 / 3.0)

# frozen cone masses for the hull-trimmed skeleton cones (storage-order fsum)
CONE_MASSES = {
    "T4": 1.473139127471974,
    "T5": 2.0623947784607646,
    "T6": 4.0 * math.sqrt(2.0),
    "T7": 2.744964490890639,
    "T9": 9.499621865947892,
}

JUNCTION_PROFILES = {
    "T4": {3: 10, 1: 10},
    "T5": {3: 16, 2: 6, 1: 20},
    "T6": {3: 32, 2: 24, 1: 48},
    "T7": {3: 80, 2: 78, 1: 132},
    "T9": {3: 90, 2: 90, 1: 150},
}

_PARTS = {}
_CONES = {}


def part(label):
    if label not in _PARTS:
        _PARTS[label] = P.build_partition(label)
    return _PARTS[label]


def cone(label):
    if label not in _CONES:
        p = part(label)
        _CONES[label] = (M.Hull.from_points(p.vertices), None)
        h = _CONES[label][0]
        _CONES[label] = (h, M.cone_complex(p, h))
    return _CONES[label]


# ---------------------------------------------------------------------------
# simplex_mass3


def cayley_menger_volume(p0, p1, p2, p3):
    """Independent tetra volume via the Cayley-Menger determinant."""
    pts = [np.asarray(p) for p in (p0, p1, p2, p3)]
    cm = np.ones((5, 5))
    cm[0, 0] = 0.0
    for i in range(4):
        for j in range(4):
            cm[i + 1, j + 1] = np.dot(pts[i] - pts[j], pts[i] - pts[j])
    val = np.linalg.det(cm)
    return math.sqrt(max(0.0, val / 288.0))


def test_unit_right_tetra():
    e = np.eye(4)
    assert M.simplex_mass3(np.zeros(4), e[0], e[1], e[2]) == pytest.approx(1 / 6, abs=1e-15)


def test_degenerate_tetra_zero():
    a = np.array([0.0, 0.0, 0.0, 0.0])
    b = np.array([1.0, 0.0, 0.0, 0.0])
    c = np.array([0.0, 1.0, 0.0, 0.0])
    d = np.array([0.5, 0.25, 0.0, 0.0])  # in the same plane
    assert M.simplex_mass3(a, b, c, d) <= 1e-14
    assert M.simplex_mass3(a, b, c, b) == 0.0  # repeated corner


def test_regular_tetra_vs_cayley_menger():
    e = np.eye(4)
    v = M.simplex_mass3(e[0], e[1], e[2], e[3])
    o = cayley_menger_volume(e[0], e[1], e[2], e[3])
    assert abs(v - o) < 1e-12
    # edge sqrt(2) regular tetra closed form: sqrt(2)/12 * edge^3 = 1/3
    assert v == pytest.approx(math.sqrt(2.0) / 12.0 * 2.0 ** 1.5, rel=1e-14)


def test_random_tetra_vs_cayley_menger():
    rng = np.random.default_rng(11)
    for _ in range(20):
        pts = rng.normal(size=(4, 4))
        v = M.simplex_mass3(*pts)
        o = cayley_menger_volume(*pts)
        assert abs(v - o) < 1e-12 * max(1.0, o)


# ---------------------------------------------------------------------------
# Hull


def test_hull_t5_structure():
    h, _ = cone("T5")
    assert h.n_facets == 6
    assert h.inradius() == pytest.approx(0.25, abs=1e-12)
    assert h.circumradius() == pytest.approx(1.0, abs=1e-12)
    vols = sorted(round(h.facet_volume(i), 12) for i in range(h.n_facets))
    assert vols[:2] == [pytest.approx(0.465847495312457, abs=1e-12)] * 2
    assert vols[2:] == [pytest.approx(0.541265877365274, abs=1e-12)] * 4


def test_hull_facet_counts():
    assert cone("T4")[0].n_facets == 5
    assert cone("T6")[0].n_facets == 8
    assert cone("T7")[0].n_facets == 14
    assert cone("T9")[0].n_facets == 15


def test_hull_t7_inradius_frozen():
    h, _ = cone("T7")
    assert h.inradius() == pytest.approx(0.3007504775037728, abs=1e-12)


def test_hull_requires_origin_inside():
    pts = np.vstack([np.eye(4), -np.ones((1, 4))]) + 5.0
    with pytest.raises(ValueError):
        M.Hull.from_points(pts)


def test_hull_scaled():
    h, _ = cone("T5")
    g = h.scaled(0.5)
    assert np.allclose(g.offsets, h.offsets * 0.5)
    assert g.inradius() == pytest.approx(0.125, abs=1e-12)
    assert np.allclose(g.points, h.points * 0.5)


def test_hull_box():
    b = M.Hull.box(0.4)
    assert b.n_facets == 8
    assert b.inradius() == pytest.approx(0.4)
    assert b.contains(np.array([0.39, -0.39, 0.0, 0.2]))
    assert not b.contains(np.array([0.5, 0.0, 0.0, 0.0]))


def test_hull_generators_on_boundary():
    h, _ = cone("T5")
    margins = h.points @ h.normals.T - h.offsets[None, :]
    assert margins.max() <= 1e-10
    # every generating vertex touches at least one facet
    assert (np.abs(margins).min(axis=1) <= 1e-10).all()


# ---------------------------------------------------------------------------
# cone_complex


@pytest.mark.parametrize("label", sorted(CONE_MASSES))
def test_cone_mass_frozen(label):
    _, c = cone(label)
    assert M.mass(c) == pytest.approx(CONE_MASSES[label], abs=1e-12)


@pytest.mark.parametrize("label", sorted(JUNCTION_PROFILES))
def test_cone_junctions(label):
    _, c = cone(label)
    assert dict(c.junction_profile()) == JUNCTION_PROFILES[label]
    assert c.validate()["ok"]


def test_cone_fixed_flags():
    _, c = cone("T5")
    # all skeleton vertices sit on the hull boundary and are fixed;
    # the cone apex at the origin is the only free vertex
    assert int(c.fixed.sum()) == 8
    assert not c.fixed[np.argmin(np.linalg.norm(c.vertices, axis=1))]


def test_cone_t4_vs_per_face_pyramids():
    p = part("T4")
    _, c = cone("T4")
    total = 0.0
    for f in p.faces:
        v = p.vertices[list(f.cycle)]
        e1, e2 = v[1] - v[0], v[2] - v[0]
        area = 0.5 * math.sqrt(np.dot(e1, e1) * np.dot(e2, e2) - np.dot(e1, e2) ** 2)
        a = np.stack([e1, e2])
        lam = np.linalg.solve(a @ a.T, a @ (-v[0]))
        dist = np.linalg.norm(v[0] + lam @ a)
        total += area * dist / 3.0
    assert abs(M.mass(c) - total) < 1e-9


def test_cone_t6_analytic():
    # 24 unit squares at distance sqrt(2)/2 from the origin
    _, c = cone("T6")
    assert M.mass(c) == pytest.approx(24 * (math.sqrt(2) / 2) / 3, abs=1e-12)


def test_cone_t5_near_cited_value():
    _, c = cone("T5")
    assert abs(M.mass(c) - 2.062) / 2.062 < 0.02


def test_cone_t7_near_cited_value():
    _, c = cone("T7")
    assert abs(M.mass(c) - 2.745) / 2.745 < 0.02


def test_cone_rotation_invariance():
    _, c = cone("T5")
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    assert abs(M.mass(c.rotated(q)) - M.mass(c)) < 1e-10


def test_cone_of_rotated_partition():
    rng = np.random.default_rng(17)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    p = P.build_partition("T5", rotation=q)
    c = M.cone_complex(p)
    assert abs(M.mass(c) - CONE_MASSES["T5"]) < 1e-10


def test_cone_rejects_marker_faces():
    with pytest.raises(ValueError):
        M.cone_complex(part("T1") if "T1" in _PARTS else P.build_partition("T1"))


def test_mass_deterministic():
    _, c = cone("T7")
    assert M.mass(c) == M.mass(c.copy())
    assert c.to_off() == c.copy().to_off()


# ---------------------------------------------------------------------------
# clipping


def test_clip_ball_to_box_exact_slice():
    # flat 3-ball at w=0 clipped by a 4-cube whose corners lie well inside:
    # the clipped region is exactly the cube's w=0 cross-section
    b = M.ball_complex(subdiv=3)
    clipped = M.clip_to_hull(b, M.Hull.box(0.4), keep="inside")
    assert abs(M.mass(clipped) - 8 * 0.4**3) < 1e-10
    assert clipped.validate()["ok"]


def test_clip_conservation():
    b = M.ball_complex(subdiv=3)
    both = M.clip_to_hull(b, M.Hull.box(0.4), keep="both")
    assert abs(M.mass(both) - M.mass(b)) < 1e-9


def test_clip_halfscale_sigma_cubed():
    h, c = cone("T5")
    inner = M.clip_to_hull(c, h.scaled(0.5), keep="inside")
    outer = M.clip_to_hull(c, h.scaled(0.5), keep="outside")
    m = M.mass(c)
    assert abs(M.mass(inner) - m / 8) < 1e-9
    assert abs(M.mass(outer) - 7 * m / 8) < 1e-9
    assert abs(M.mass(inner) + M.mass(outer) - m) < 1e-9


def test_clip_snaps_on_plane_vertices():
    # a tetra with one corner exactly on a facet plane is not split
    verts = np.array([
        [0.4, 0.0, 0.0, 0.0],
        [0.1, 0.1, 0.0, 0.0],
        [0.1, -0.1, 0.1, 0.0],
        [0.1, 0.0, -0.1, 0.1],
    ])
    c = M.Complex3(verts, np.array([[0, 1, 2, 3]]), None)
    clipped = M.clip_to_hull(c, M.Hull.box(0.4), keep="inside")
    assert clipped.n_tetra == 1
    assert clipped.n_vertices == 4
    assert abs(M.mass(clipped) - M.mass(c)) < 1e-15


def test_clip_degeneracy_raises():
    # flat tetra lying inside a facet plane cannot be classified
    verts = np.array([
        [0.1, 0.0, 0.0, 0.4],
        [0.0, 0.1, 0.0, 0.4],
        [-0.1, 0.0, 0.0, 0.4],
        [0.0, -0.1, 0.0, 0.4],
    ])
    c = M.Complex3(verts, np.array([[0, 1, 2, 3]]), None)
    with pytest.raises(M.ClipDegeneracy):
        M.clip_to_hull(c, M.Hull.box(0.4), keep="inside")


def test_clip_no_op_for_partition_cone():
    # every cone tetra already lies inside the hull of the vertices
    p = part("T5")
    _, c = cone("T5")
    fan_count = sum(len(f.cycle) - 2 for f in p.faces)
    assert c.n_tetra == fan_count


# ---------------------------------------------------------------------------
# closed forms


def test_t8_margin_assembly_equals_direct():
    direct = 240.0 * (5.0 * ALPHA - 3.0 * math.pi) - (119.0 / 60.0) * math.pi**2
    assert abs(M.t8_margin() - direct) < 1e-12


def test_t8_margin_value():
    assert M.t8_margin() == pytest.approx(11.238457518677325, abs=1e-9)
    assert M.t8_margin() > 11.0


def test_cone_patch_mass_full_sphere():
    assert M.cone_patch_mass(4 * math.pi, 1.0) == pytest.approx(4 * math.pi / 3, abs=1e-15)


def test_cone_patch_mass_pentagon_frozen():
    area = 5 * ALPHA - 3 * math.pi
    assert M.cone_patch_mass(area, 1.0) == pytest.approx(0.04279607349190447, abs=1e-15)


def test_cone_patch_vs_meshed_patch():
    # low-res spot check: mesh one curved pentagonal patch of the 120-cell
    # partition and compare its coned mass against the closed form
    p = part("T8")
    corners = [p.vertices[i] for i in p.faces[0].cycle]
    patch = M.spherical_patch_complex(corners, subdiv=3)
    exact = M.cone_patch_mass(5 * ALPHA - 3 * math.pi, 1.0)
    assert abs(M.mass(patch) - exact) / exact < 1e-3


def test_ball_complex_approximates_flat_ball():
    b = M.ball_complex(subdiv=3)
    assert abs(M.mass(b) - 4 * math.pi / 3) / (4 * math.pi / 3) < 0.03
    assert b.validate()["ok"] is False  # free boundary is not fixed by design
    prof = b.junction_profile()
    assert prof[1] == 512  # sphere triangles
    assert set(prof) == {1, 2}


# ---------------------------------------------------------------------------
# Complex3 I/O and bookkeeping


def test_off_round_trip():
    _, c = cone("T5")
    text = c.to_off()
    back = M.Complex3.from_off(text)
    assert np.array_equal(back.vertices, c.vertices)
    assert np.array_equal(back.tetra, c.tetra)
    assert np.array_equal(back.fixed, c.fixed)
    assert back.to_off() == text


def test_off_empty_complex():
    empty = M.Complex3(np.zeros((0, 4)), np.zeros((0, 4), dtype=int), None)
    text = empty.to_off()
    back = M.Complex3.from_off(text)
    assert back.n_vertices == 0 and back.n_tetra == 0
    assert back.to_off() == text


def test_off_rejects_bad_header():
    with pytest.raises(ValueError):
        M.Complex3.from_off("OFF\n0 0 0\n")


def test_scaled_complex_mass():
    _, c = cone("T4")
    assert M.mass(c.scaled(0.5)) == pytest.approx(M.mass(c) / 8, rel=1e-12)


def test_edges_and_two_faces():
    verts = np.vstack([np.zeros(4), np.eye(4)])
    c = M.Complex3(verts, np.array([[0, 1, 2, 3], [0, 1, 2, 4]]), None)
    assert len(c.edges()) == 9
    faces = c.two_faces()
    assert faces[(0, 1, 2)] == 2
    assert c.junction_profile() == {1: 6, 2: 1}
