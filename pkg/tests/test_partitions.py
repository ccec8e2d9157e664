import json
import math

import numpy as np
import pytest

from plcones import graphs as G
from plcones import partitions as P
from plcones.cells import face_signatures, realize_cell
from plcones.geometry import arc, random_rotation

S3 = 2.0 * math.pi ** 2
A3 = math.acos(-0.25)
A4 = math.pi / 3.0
A5 = 0.27091852045622006

COUNTS = {
    "T1": (1, 0, 1, 2),
    "T2": (1, 1, 3, 3),
    "T3": (2, 4, 6, 4),
    "T4": (5, 10, 10, 5),
    "T5": (8, 16, 14, 6),
    "T6": (16, 32, 24, 8),
    "T7": (40, 80, 54, 14),
    "T8": (600, 1200, 720, 120),
    "T9": (45, 90, 60, 15),
}

INVENTORY = {
    "T1": {1: 2},
    "T2": {2: 3},
    "T3": {3: 4},
    "T4": {4: 5},
    "T5": {4: 2, 5: 4},
    "T6": {6: 8},
    "T7": {7: 12, 8: 2},
    "T8": {8: 120},
    "T9": {6: 5, 10: 10},
}

VOLUME_FRACTIONS = {
    "T1": [0.5] * 2,
    "T2": [1.0 / 3.0] * 3,
    "T3": [0.25] * 4,
    "T4": [0.2] * 5,
    "T5": [0.2] * 2 + [0.15] * 4,
    "T6": [0.125] * 8,
    "T7": [1.0 / 120.0] * 2 + [59.0 / 720.0] * 12,
    "T8": [1.0 / 120.0] * 120,
}

_CACHE = {}


def part(label):
    if label not in _CACHE:
        _CACHE[label] = P.build_partition(label)
    return _CACHE[label]


@pytest.mark.parametrize("label", P.LABELS)
def test_counts(label):
    assert part(label).counts == COUNTS[label]


@pytest.mark.parametrize("label", P.LABELS)
def test_euler_characteristic_vanishes(label):
    assert part(label).euler == 0


@pytest.mark.parametrize("label", P.LABELS)
def test_validation_report(label):
    rep = P.validate(part(label))
    assert rep["ok"], rep
    assert rep["inventory"] == INVENTORY[label]


@pytest.mark.parametrize("label", P.LABELS)
def test_every_face_borders_two_cells(label):
    for f in part(label).faces:
        assert len(set(f.cells)) == 2


@pytest.mark.parametrize("label", [l for l in P.LABELS if l != "T1"])
def test_every_edge_borders_three_faces_and_cells(label):
    p = part(label)
    for faces_at in p.edge_links():
        assert len(faces_at) == 3
        cells_at = set()
        for fid in faces_at:
            cells_at.update(p.faces[fid].cells)
        assert len(cells_at) == 3


@pytest.mark.parametrize("label", ["T3", "T4", "T5", "T6", "T7", "T8",
                                   "T9"])
def test_every_cycle_vertex_meets_four_cells(label):
    for cells in part(label).vertex_links().values():
        assert len(cells) == 4


@pytest.mark.parametrize("label", [l for l in P.LABELS if l != "T9"])
def test_exact_partitions_have_zero_residual(label):
    assert part(label).residual < 1e-9


def test_t9_residual_matches_cell_family():
    # the fifteen-cell complex inherits the nonahedron family's best
    # angle fit; no admissible stationary point exists
    assert abs(part("T9").residual - 0.25499) < 5e-3
    statuses = {c.status for c in part("T9").cells}
    assert statuses == {"least-squares"}


def test_marker_conventions():
    t1, t2 = part("T1"), part("T2")
    assert len(t1.faces[0].cycle) == 0
    assert t1.vertex_links() == {}
    assert t2.faces[0].edges == (0,)
    assert [f.edges for f in t2.faces] == [(0,)] * 3


def test_t3_bigon_structure():
    t3 = part("T3")
    assert all(len(f.cycle) == 2 for f in t3.faces)
    assert len(t3.edge_keys) == 4
    assert all(k == (0, 1) for k in t3.edge_keys)


def test_t5_cap_cells_match_catalog_tetrahedron():
    t5 = part("T5")
    caps = [c for c in t5.cells if c.index == 4]
    assert len(caps) == 2
    ref = face_signatures(realize_cell(4))[0]
    for cap in caps:
        for sig in face_signatures(cap):
            assert sig.close_to(ref, tol=1e-9)


def test_t5_prism_rectangles():
    t5 = part("T5")
    rect_faces = [f for f in t5.faces if len(f.cycle) == 4]
    assert len(rect_faces) == 6
    for f in rect_faces:
        pts = t5.vertices[list(f.cycle)]
        sides = sorted(arc(pts[i], pts[(i + 1) % 4]) for i in range(4))
        assert abs(sides[0] - 0.5053605102841575) < 1e-9
        assert abs(sides[3] - A3) < 1e-9


def test_t7_caps_are_regular_dodecahedra():
    t7 = part("T7")
    caps = [c for c in t7.cells if c.index == 8]
    assert len(caps) == 2
    ref = face_signatures(realize_cell(8))[0]
    for cap in caps:
        sigs = face_signatures(cap)
        assert len(sigs) == 12
        for sig in sigs:
            assert sig.close_to(ref, tol=1e-9)


def test_t7_prism_edges():
    t7 = part("T7")
    lengths = sorted(arc(t7.vertices[a], t7.vertices[b])
                     for a, b in t7.edge_keys)
    assert abs(lengths[0] - A5) < 1e-9       # short cap edges
    assert abs(lengths[-1] - 2.365313622849416) < 1e-9
    short = sum(1 for a, b in t7.edge_keys
                if arc(t7.vertices[a], t7.vertices[b]) < 1.0)
    assert short == 60
    assert len(t7.edge_keys) - short == 20


def test_t8_sites_and_cells():
    assert len(P.binary_icosahedral_quaternions()) == 120
    t8 = part("T8")
    for c in t8.cells:
        assert len(c.faces) == 12
        assert len(c.vertices) == 20
    assert all(len(f.cycle) == 5 for f in t8.faces)


def test_t9_cell_shapes():
    t9 = part("T9")
    cubes = [c for c in t9.cells if c.index == 6]
    nonas = [c for c in t9.cells if c.index == 10]
    assert len(cubes) == 5 and len(nonas) == 10
    for c in cubes:
        assert sorted(len(f) for f in c.faces) == [4] * 6
    for c in nonas:
        assert sorted(len(f) for f in c.faces) == [4, 4, 4, 5, 5, 5, 5,
                                                   5, 5]


# ---------------------------------------------------------------------------
# dual graphs
# ---------------------------------------------------------------------------

def test_dual_t4_complete_graph():
    assert G.is_isomorphic(part("T4").dual,
                           G.complete_graph(5, color="c4"))


def test_dual_t5_complete_minus_cap_pair():
    ref = G.ColoredGraph()
    for color in ["c4", "c4", "c5", "c5", "c5", "c5"]:
        ref.add_vertex(color)
    for i in range(6):
        for j in range(i + 1, 6):
            if (i, j) != (0, 1):
                ref.add_edge(i, j)
    assert G.is_isomorphic(part("T5").dual, ref)


def test_dual_t6_complement_of_matching():
    assert G.is_isomorphic(part("T6").dual,
                           G.complement_of_matching(4, color="c6"))


def test_dual_t7_dodecahedral_prism():
    assert G.is_isomorphic(part("T7").dual, G.dodecahedral_prism_dual())


def test_dual_t9_reference():
    ref = P.recolor(G.t9_reference_graph(), {"red": "c6", "blue": "c10"})
    assert G.is_isomorphic(part("T9").dual, ref)


def test_dual_t8_every_ego_is_icosahedral():
    d8 = part("T8").dual
    ico = G.icosahedral_graph(color="c8")
    assert all(G.is_isomorphic(P.ego_graph(d8, v), ico)
               for v in range(120))


@pytest.mark.parametrize("label", P.LABELS)
def test_dual_no_parallel_faces(label):
    # no two cells in the catalog share more than one face
    weights = part(label).dual_weights
    assert weights
    assert set(weights.values()) == {1}


def test_dual_small_partitions():
    assert G.is_isomorphic(part("T2").dual, G.complete_graph(3, "c2"))
    assert G.is_isomorphic(part("T3").dual, G.complete_graph(4, "c3"))
    t1 = part("T1").dual
    assert t1.n == 2 and t1.m == 1


# ---------------------------------------------------------------------------
# Monte Carlo volumes
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("label", P.LABELS)
def test_mc_volume_closure(label):
    rep = P.mc_volume_closure(part(label), samples=50_000, seed=3)
    assert rep["unclaimed"] == 0
    assert rep["overclaimed"] == 0
    assert rep["relative_gap"] < 1e-12


@pytest.mark.parametrize("label", sorted(VOLUME_FRACTIONS))
def test_mc_cell_volumes_match_fractions(label):
    n = 50_000
    rep = P.mc_volume_closure(part(label), samples=n, seed=11)
    for vol, frac in zip(rep["volumes"], VOLUME_FRACTIONS[label]):
        sigma = S3 * math.sqrt(frac * (1.0 - frac) / n)
        assert abs(vol - frac * S3) < 4.5 * sigma


def test_mc_t9_volumes_split_by_type():
    rep = P.mc_volume_closure(part("T9"), samples=50_000, seed=11)
    cubes = rep["volumes"][:5]
    nonas = rep["volumes"][5:]
    assert max(cubes) < min(nonas)
    assert abs(sum(cubes) + sum(nonas) - S3) < 1e-9


def test_mc_determinism():
    a = P.mc_volume_closure(part("T6"), samples=50_000, seed=9)
    b = P.mc_volume_closure(part("T6"), samples=50_000, seed=9)
    assert a["volumes"] == b["volumes"]
    c = P.mc_volume_closure(part("T6"), samples=50_000, seed=10)
    assert a["volumes"] != c["volumes"]


# ---------------------------------------------------------------------------
# rebuilding under rotation
# ---------------------------------------------------------------------------

def test_t8_rebuild_from_rotated_sites():
    rng = np.random.default_rng(4)
    rot = random_rotation(4, rng)
    t8 = P.build_partition("T8", rotation=rot)
    assert t8.counts == COUNTS["T8"]
    assert P.validate(t8)["ok"]
    assert G.is_isomorphic(P.ego_graph(t8.dual, 0),
                           G.icosahedral_graph(color="c8"))


def test_rigid_rotation_preserves_structure():
    rng = np.random.default_rng(5)
    rot = random_rotation(4, rng)
    t5 = P.build_partition("T5", rotation=rot)
    assert t5.counts == COUNTS["T5"]
    rep = P.mc_volume_closure(t5, samples=50_000, seed=3)
    assert rep["unclaimed"] == 0 and rep["overclaimed"] == 0
    base = P.mc_volume_closure(part("T5"), samples=50_000, seed=3)
    for a, b in zip(rep["volumes"], base["volumes"]):
        assert abs(a - b) < 0.15


# ---------------------------------------------------------------------------
# obstructions and exclusions
# ---------------------------------------------------------------------------

def test_obstruction_prism_rectangles():
    r = P.obstruction_c7_c7({l: part(l) for l in ("T5", "T6", "T7")})
    assert r["holds"]
    assert r["r7_pairs_on_short_edges"] == []
    assert r["r5_pairs_on_long_edges"] == []
    assert r["control_found"]
    assert r["control_square_pairs"] == 32


def test_obstruction_nonahedron_pentagons():
    r = P.obstruction_c9()
    assert r["holds"]
    assert r["base_pairs"] == [] and r["apex_triples"] == []
    assert r["control_found"]
    assert r["control_base_pairs"] == 30
    assert r["control_apex_triples"] == 20


def test_c8_quotient_exclusion():
    r = P.c8_quotient_exclusion(samples=10 ** 5, seed=5)
    assert abs(r["long_side"] - 2.36531) < 5e-4
    assert abs(r["gap"] - 0.77631) < 5e-4
    assert abs(r["ball_flat"] - 0.2447) < 5e-4
    assert r["ball_exact"] < r["ball_flat"]
    assert abs(r["quota_60"] - 0.32899) < 1e-5
    assert r["ball_below_quota_60"]
    assert r["quota_60_below_40"]
    assert abs(r["cell_volume"] - S3 / 120.0) < 4.5 * r["cell_volume_stderr"]
    assert r["cell_below_ball"]
    assert r["excluded"]


# ---------------------------------------------------------------------------
# bounded closure search
# ---------------------------------------------------------------------------

def test_glue_search_tetrahedra_only():
    r = P.glue_closure_search(max_cells=16, node_budget=10 ** 5,
                              alphabet=(4,))
    assert r["solutions"] == 1
    assert r["compositions"] == [(4,) * 5]
    assert r["sphere_closures"] == [(4,) * 5]


def test_glue_search_tetra_prism_alphabet():
    r = P.glue_closure_search(max_cells=16, node_budget=10 ** 5,
                              alphabet=(5, 4))
    assert r["solutions"] == 2
    assert r["compositions"] == [(4,) * 5, (4, 4, 5, 5, 5, 5)]
    # both closures are genuine sphere partitions
    assert r["sphere_closures"] == r["compositions"]


def test_glue_search_cubes_finds_projective_quotient():
    r = P.glue_closure_search(max_cells=16, node_budget=10 ** 5,
                              alphabet=(6,))
    assert r["solutions"] == 2
    assert r["compositions"] == [(6,) * 4, (6,) * 8]
    # the four-cube closure is the projective identification: its cells
    # only fill half the sphere's volume
    assert r["sphere_closures"] == [(6,) * 8]
    four = next(c for c in r["closures"] if c["composition"] == (6,) * 4)
    assert abs(four["volume"] - S3 / 2.0) < four["volume_spread"]


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def test_partition_json_round_trip():
    text = P.partition_to_json(part("T5"))
    data = json.loads(text)
    assert data["label"] == "T5"
    assert tuple(data["counts"]) == COUNTS["T5"]
    assert data["euler"] == 0
    assert len(data["faces"]) == 14
    assert text == P.partition_to_json(part("T5"))


def test_partition_off_export():
    text = P.partition_to_off(part("T6"))
    lines = text.strip().split("\n")
    assert lines[0] == "OFF"
    nv, nt, ne = map(int, lines[1].split())
    assert nv == 16 and ne == 32
    assert nt == 2 * 24                      # squares fan into two
    for ln in lines[2:2 + nv]:
        v = np.array([float(x) for x in ln.split()])
        assert len(v) == 4
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12


def test_deterministic_rebuild():
    a = P.build_partition("T8")
    b = P.build_partition("T8")
    assert a.vertices.tobytes() == b.vertices.tobytes()
    assert [f.cycle for f in a.faces] == [f.cycle for f in b.faces]
