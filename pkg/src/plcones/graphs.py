"""Small colored graphs: duals of partitions and their neighborhood tests.

Dual graphs of partitions have one vertex per 3-cell, colored by cell
type, and an edge whenever two cells share a 2-face.  Everything here is
exact: isomorphism goes through a canonical labeling (iterated color
refinement plus individualization backtracking), which is cheap at the
sizes that occur (at most a few hundred vertices, usually fewer than
twenty).
"""

from __future__ import annotations

import itertools

import numpy as np


class SearchBudgetExceeded(Exception):
    """The exhaustive neighborhood search hit its node budget."""


class ColoredGraph:
    """Mutable simple undirected graph with one color label per vertex."""

    def __init__(self):
        self.colors: list = []
        self.adj: list[set[int]] = []

    @property
    def n(self) -> int:
        return len(self.colors)

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def add_vertex(self, color) -> int:
        self.colors.append(color)
        self.adj.append(set())
        return len(self.colors) - 1

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError("no self loops")
        self.adj[u].add(v)
        self.adj[v].add(u)

    def remove_edge(self, u: int, v: int) -> None:
        self.adj[u].discard(v)
        self.adj[v].discard(u)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self):
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def copy(self) -> "ColoredGraph":
        g = ColoredGraph()
        g.colors = list(self.colors)
        g.adj = [set(a) for a in self.adj]
        return g

    def subgraph(self, vertices) -> "ColoredGraph":
        vs = sorted(vertices)
        index = {v: i for i, v in enumerate(vs)}
        g = ColoredGraph()
        for v in vs:
            g.add_vertex(self.colors[v])
        for v in vs:
            for w in self.adj[v]:
                if w in index and v < w:
                    g.add_edge(index[v], index[w])
        return g

    def ego_graph(self, v: int) -> "ColoredGraph":
        """Induced subgraph on the neighbors of v (v excluded)."""
        return self.subgraph(self.adj[v])

    def color_counts(self) -> dict:
        out: dict = {}
        for c in self.colors:
            out[c] = out.get(c, 0) + 1
        return out


def from_edges(n, edge_list, colors=None) -> ColoredGraph:
    g = ColoredGraph()
    if colors is None:
        colors = ["x"] * n
    for c in colors:
        g.add_vertex(c)
    for u, v in edge_list:
        g.add_edge(u, v)
    return g


# ---------------------------------------------------------------------------
# canonical labeling
# ---------------------------------------------------------------------------

def _refine(g: ColoredGraph, classes: list[int]) -> list[int]:
    """Iterated color refinement of a class assignment until stable."""
    while True:
        sigs = []
        for v in range(g.n):
            nbr = sorted(classes[w] for w in g.adj[v])
            sigs.append((classes[v], tuple(nbr)))
        order = sorted(set(sigs))
        lookup = {s: i for i, s in enumerate(order)}
        new = [lookup[s] for s in sigs]
        if new == classes:
            return new
        classes = new


def _encode(g: ColoredGraph, perm: list[int]) -> tuple:
    """Canonical-candidate encoding of g under a full vertex ordering."""
    pos = {v: i for i, v in enumerate(perm)}
    cols = tuple(g.colors[v] for v in perm)
    es = sorted((min(pos[u], pos[v]), max(pos[u], pos[v]))
                for u, v in g.edges())
    return (g.n, cols, tuple(es))


def _initial_classes(g: ColoredGraph) -> list[int]:
    order = sorted(set(map(repr, g.colors)))
    lookup = {c: i for i, c in enumerate(order)}
    return [lookup[repr(c)] for c in g.colors]


def canonical_form(g: ColoredGraph) -> tuple:
    """Canonical encoding: equal iff graphs are color-isomorphic.

    Color refinement first; when cells stay non-singleton, individualize
    each member of the first smallest non-singleton cell and recurse,
    keeping the lexicographically smallest encoding.
    """
    best = [None]

    def descend(classes):
        classes = _refine(g, classes)
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(classes):
            cells.setdefault(c, []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            perm = sorted(range(g.n), key=lambda v: classes[v])
            enc = _encode(g, perm)
            if best[0] is None or enc < best[0]:
                best[0] = enc
            return
        for v in target:
            branch = list(classes)
            branch[v] = -1              # fresh singleton class, sorts first
            descend(branch)

    if g.n == 0:
        return (0, (), ())
    descend(_initial_classes(g))
    return best[0]


def is_isomorphic(g1: ColoredGraph, g2: ColoredGraph) -> bool:
    """Color-preserving graph isomorphism via canonical labeling."""
    if max(g1.n, g2.n) > 2000:
        raise ValueError("graphs too large")
    if g1.n != g2.n or g1.m != g2.m:
        return False
    if g1.color_counts() != g2.color_counts():
        return False
    deg1 = sorted((repr(g1.colors[v]), g1.degree(v)) for v in range(g1.n))
    deg2 = sorted((repr(g2.colors[v]), g2.degree(v)) for v in range(g2.n))
    if deg1 != deg2:
        return False
    return canonical_form(g1) == canonical_form(g2)


# ---------------------------------------------------------------------------
# reference graphs
# ---------------------------------------------------------------------------

def complete_graph(n: int, color="red") -> ColoredGraph:
    g = ColoredGraph()
    for _ in range(n):
        g.add_vertex(color)
    for u in range(n):
        for v in range(u + 1, n):
            g.add_edge(u, v)
    return g


def cycle_graph(n: int, color="x") -> ColoredGraph:
    g = ColoredGraph()
    for _ in range(n):
        g.add_vertex(color)
    for u in range(n):
        g.add_edge(u, (u + 1) % n)
    return g


def complement_of_matching(k: int, color="red") -> ColoredGraph:
    """Complete graph on 2k vertices minus a perfect matching.

    k = 3 is the octahedron graph, k = 4 the 16-cell (hypercube dual)
    adjacency.
    """
    g = ColoredGraph()
    for _ in range(2 * k):
        g.add_vertex(color)
    for u in range(2 * k):
        for v in range(u + 1, 2 * k):
            g.add_edge(u, v)
    for i in range(k):
        g.remove_edge(2 * i, 2 * i + 1)
    return g


def octahedron_graph(color="blue") -> ColoredGraph:
    return complement_of_matching(3, color)


def triangular_bipyramid() -> ColoredGraph:
    """Red triangle base plus two blue apexes joined to the base only."""
    g = ColoredGraph()
    reds = [g.add_vertex("red") for _ in range(3)]
    blues = [g.add_vertex("blue") for _ in range(2)]
    for u, v in itertools.combinations(reds, 2):
        g.add_edge(u, v)
    for b in blues:
        for r in reds:
            g.add_edge(b, r)
    return g


def icosahedral_graph(color="x") -> ColoredGraph:
    """Vertex adjacency of the regular icosahedron."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    pts = []
    for a, b in itertools.product((1.0, -1.0), repeat=2):
        pts.append((0.0, a, b * phi))
        pts.append((a, b * phi, 0.0))
        pts.append((a * phi, 0.0, b))
    pts = np.array(pts)
    g = ColoredGraph()
    for _ in range(12):
        g.add_vertex(color)
    for u in range(12):
        for v in range(u + 1, 12):
            if np.linalg.norm(pts[u] - pts[v]) < 2.1:   # edge length 2
                g.add_edge(u, v)
    return g


def dodecahedral_prism_dual() -> ColoredGraph:
    """Adjacency of the dodecahedral-prism partition: 2 hubs + 12 rim.

    Hubs are the two dodecahedral cells (adjacent to every rim cell but
    not to each other); the 12 rim cells are pentagonal prisms adjacent
    like faces of a dodecahedron.
    """
    g = ColoredGraph()
    hubs = [g.add_vertex("c8") for _ in range(2)]
    rims = [g.add_vertex("c7") for _ in range(12)]
    ico = icosahedral_graph()
    # faces of the dodecahedron are adjacent iff the corresponding
    # icosahedron vertices are adjacent
    for u, v in ico.edges():
        g.add_edge(rims[u], rims[v])
    for r in rims:
        for h in hubs:
            g.add_edge(r, h)
    return g


def t9_reference_graph() -> ColoredGraph:
    """The 15-vertex colored graph from the cube/nonahedron partition.

    Reds are the elements of {0..4}; blues the ten 3-element subsets.
    A red joins every blue containing it; two blues join when they share
    two elements.  This encodes: each cube touches six nonahedra, each
    nonahedron touches three cubes and six nonahedra.
    """
    g = ColoredGraph()
    reds = [g.add_vertex("red") for _ in range(5)]
    triples = list(itertools.combinations(range(5), 3))
    blues = {t: g.add_vertex("blue") for t in triples}
    for t in triples:
        for i in t:
            g.add_edge(reds[i], blues[t])
    for t1, t2 in itertools.combinations(triples, 2):
        if len(set(t1) & set(t2)) == 2:
            g.add_edge(blues[t1], blues[t2])
    return g


def fig1_graph() -> ColoredGraph:
    """Required neighborhood of a blue vertex: 3 reds + 6 blues.

    Derived as the ego graph of any blue vertex of the reference graph:
    three mutually non-adjacent reds; the six blues form a triangular
    prism, each blue seeing two of the reds, each red seeing four blues.
    """
    ref = t9_reference_graph()
    blue = next(v for v in range(ref.n) if ref.colors[v] == "blue")
    return ref.ego_graph(blue)


def red_ego_reference() -> ColoredGraph:
    """Required neighborhood of a red vertex: the all-blue octahedron."""
    return octahedron_graph("blue")


# ---------------------------------------------------------------------------
# exhaustive search for graphs with the prescribed neighborhoods
# ---------------------------------------------------------------------------

_RED_BLUE = 6      # a red vertex has exactly 6 blue neighbors, no red
_BLUE_RED = 3      # a blue vertex has exactly 3 red neighbors
_BLUE_BLUE = 6     # ... and exactly 6 blue neighbors


def _common(g, u, v, color):
    return sum(1 for w in g.adj[u] if w in g.adj[v] and g.colors[w] == color)


def _red_count(g, v):
    return sum(1 for w in g.adj[v] if g.colors[w] == "red")


def _blue_count(g, v):
    return sum(1 for w in g.adj[v] if g.colors[w] == "blue")


def _blue_pair_feasible(g, u, v):
    """Adjacent blues must end with exactly 2 common reds, 3 common blues.

    Counts only grow, and can grow by at most the smaller of the two
    vertices' remaining degree slots, which bounds the reachable range.
    """
    cr = _common(g, u, v, "red")
    if cr > 2:
        return False
    if cr + (_BLUE_RED - _red_count(g, u)) + (_BLUE_RED - _red_count(g, v)) < 2:
        return False
    cb = _common(g, u, v, "blue")
    if cb > 3:
        return False
    if cb + (_BLUE_BLUE - _blue_count(g, u)) \
            + (_BLUE_BLUE - _blue_count(g, v)) < 3:
        return False
    return True


def _blue_full(g, v):
    """Blue vertex that can take no further blue neighbor."""
    blues = sum(1 for w in g.adj[v] if g.colors[w] == "blue")
    return blues >= _BLUE_BLUE


def _red_ego_embeddable(g, r):
    """Partial octahedron check on the blue neighbors of red r.

    In the finished graph each of the six blues around r misses exactly
    one of the others.  During the search a missing pair only counts
    against that bound once it can no longer be completed, i.e. once
    either endpoint has all its blue neighbors.
    """
    nbrs = list(g.adj[r])
    for b in nbrs:
        hard = 0
        b_full = _blue_full(g, b)
        for c in nbrs:
            if c != b and c not in g.adj[b]:
                if b_full or _blue_full(g, c):
                    hard += 1
        if hard > 1:
            return False
    return True


def _edge_ok(g, u, v):
    """Local feasibility after adding edge (u, v)."""
    cu, cv = g.colors[u], g.colors[v]
    if cu == "red" and cv == "red":
        return False
    if cu == "blue" and cv == "blue":
        if _blue_count(g, u) > _BLUE_BLUE or _blue_count(g, v) > _BLUE_BLUE:
            return False
        # a vertex filling its blue slots freezes missing pairs around
        # every red it touches
        for x in (u, v):
            if _blue_full(g, x):
                for r in g.adj[x]:
                    if g.colors[r] == "red" and not _red_ego_embeddable(g, r):
                        return False
    else:
        r, b = (u, v) if cu == "red" else (v, u)
        if g.degree(r) > _RED_BLUE:
            return False
        if _red_count(g, b) > _BLUE_RED:
            return False
        if not _red_ego_embeddable(g, r):
            return False
    # any edge at a blue endpoint consumes slots and may raise common
    # counts, so every adjacent blue pair through it gets rechecked
    for x in (u, v):
        if g.colors[x] != "blue":
            continue
        for w in g.adj[x]:
            if g.colors[w] == "blue":
                if not _blue_pair_feasible(g, x, w):
                    return False
    return True


def _saturated(g, v):
    if g.colors[v] == "red":
        return g.degree(v) == _RED_BLUE
    reds = sum(1 for w in g.adj[v] if g.colors[w] == "red")
    blues = g.degree(v) - reds
    return reds == _BLUE_RED and blues == _BLUE_BLUE


def _dead(g, v):
    """Saturated pairs that can no longer reach their exact targets."""
    for w in g.adj[v]:
        if g.colors[v] == "blue" and g.colors[w] == "blue":
            if _saturated(g, v) and _saturated(g, w):
                if _common(g, v, w, "red") != 2:
                    return True
                if _common(g, v, w, "blue") != 3:
                    return True
    return False


def t9_dual_uniqueness_search(node_budget: int = 10 ** 8,
                              max_vertices: int = 40):
    """All colored graphs whose every ego matches the derived templates.

    Exhaustive backtracking over connected graphs: red vertices must see
    exactly six blues forming the octahedron, blue vertices exactly the
    three-red/six-blue neighborhood.  Solutions are returned up to
    isomorphism; the expected outcome is a single 15-vertex graph with 5
    reds and 10 blues.
    """
    red_ref = canonical_form(red_ego_reference())
    blue_ref = canonical_form(fig1_graph())
    g = ColoredGraph()
    g.add_vertex("blue")
    solutions = []
    seen = set()
    nodes = [0]

    def verify(gg):
        for v in range(gg.n):
            ref = red_ref if gg.colors[v] == "red" else blue_ref
            if canonical_form(gg.ego_graph(v)) != ref:
                return False
        return True

    def extend(prev_key, min_candidate):
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise SearchBudgetExceeded(f"budget {node_budget} exhausted")
        active = None
        for v in range(g.n):
            if not _saturated(g, v):
                active = v
                break
            if _dead(g, v):
                return
        if active is None:
            if verify(g):
                key = canonical_form(g)
                if key not in seen:
                    seen.add(key)
                    solutions.append(g.copy())
            return
        # next neighbor color for the active vertex: reds first for blues
        if g.colors[active] == "red":
            want = "blue"
        else:
            reds = sum(1 for w in g.adj[active] if g.colors[w] == "red")
            want = "red" if reds < _BLUE_RED else "blue"
        if (active, want) != prev_key:
            # new saturation segment: neighbor-ordering constraint resets
            min_candidate = 0
        lo = max(min_candidate, active + 1)
        candidates = [u for u in range(lo, g.n)
                      if g.colors[u] == want and u not in g.adj[active]
                      and not _saturated(g, u)]
        for u in candidates:
            g.add_edge(active, u)
            if _edge_ok(g, active, u) and not _dead(g, active):
                extend((active, want), u + 1)
            g.remove_edge(active, u)
        if g.n < max_vertices:
            u = g.add_vertex(want)
            g.add_edge(active, u)
            if _edge_ok(g, active, u):
                extend((active, want), u + 1)
            g.remove_edge(active, u)
            g.colors.pop()
            g.adj.pop()

    extend(None, 0)
    return solutions
