"""Seeded random instances: posets, filtrations, tours.

Used for fuzzing the main algorithm against the limit-to-colimit oracle and
for the randomized acceptance runs.  Everything is driven by a
``random.Random`` so instances are reproducible from a seed.
"""

from __future__ import annotations

import random
from itertools import combinations

from .filtration import PFiltration, SimplicialComplex, closure
from .poset import Poset, unfold

__all__ = [
    "random_connected_poset",
    "random_filtration",
    "random_graph_filtration",
    "random_tour",
    "perf_graph_filtration",
]


def random_connected_poset(rng: random.Random, max_points: int = 8, max_edges: int = 10) -> Poset:
    """A random connected DAG on up to ``max_points`` points.

    Edges are oriented along the point-index order (which keeps the graph
    acyclic), a spanning tree keeps the underlying graph connected, and extra
    forward edges are sprinkled up to ``max_edges``.
    """
    n = rng.randint(1, max_points)
    points = [f"p{i}" for i in range(n)]
    edges = []
    seen = set()
    for i in range(1, n):
        j = rng.randrange(i)
        e = (points[j], points[i])
        edges.append(e)
        seen.add(e)
    extra = rng.randint(0, max(0, max_edges - len(edges)))
    attempts = 0
    while extra > 0 and attempts < 50:
        attempts += 1
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        lo, hi = min(i, j), max(i, j)
        e = (points[lo], points[hi])
        if e in seen:
            continue
        seen.add(e)
        edges.append(e)
        extra -= 1
    return Poset(points, edges)


def _random_pool(rng: random.Random, top_dim: int, max_simplices: int, n_vertices: int):
    """A face-closed pool of candidate simplices of dimension <= top_dim."""
    verts = list(range(n_vertices))
    pool = {(v,) for v in verts}
    candidates = []
    for d in range(1, top_dim + 1):
        candidates.extend(combinations(verts, d + 1))
    rng.shuffle(candidates)
    for cand in candidates:
        extended = pool | closure([cand])
        if len(extended) > max_simplices:
            continue
        if rng.random() < 0.6:
            pool = extended
    return pool


def random_filtration(
    rng: random.Random,
    poset: Poset,
    degree: int,
    max_simplices: int = 25,
    n_vertices: int = 6,
    max_dim: int | None = None,
) -> PFiltration:
    """A random monotone filtration over ``poset``.

    Each pool simplex is born on a random up-set of the poset; per-point
    complexes are face closures of everything born at or below the point,
    which makes the family monotone and face-closed by construction.
    """
    if max_dim is None:
        max_dim = degree + 1
    pool = sorted(
        _random_pool(rng, max_dim, max_simplices, n_vertices), key=lambda s: (len(s), s)
    )
    upsets = {}
    points = poset.points
    for s in pool:
        if rng.random() < 0.45:
            seeds = list(points)  # born everywhere
        else:
            k = rng.randint(0, 2)
            seeds = rng.sample(points, min(k, len(points))) if k else []
        up = set()
        stack = list(seeds)
        while stack:
            q = stack.pop()
            if q in up:
                continue
            up.add(q)
            stack.extend(poset.successors(q))
        upsets[s] = up
    complexes = {}
    for pt in points:
        present = [s for s in pool if pt in upsets[s]]
        complexes[pt] = SimplicialComplex(closure(present))
    return PFiltration(poset, complexes, degree)


def random_graph_filtration(
    rng: random.Random,
    poset: Poset,
    max_simplices: int = 25,
    n_vertices: int = 7,
) -> PFiltration:
    """A random monotone filtration of graphs, degree fixed to 1."""
    return random_filtration(
        rng, poset, degree=1, max_simplices=max_simplices, n_vertices=n_vertices, max_dim=1
    )


def random_tour(rng: random.Random, poset: Poset):
    """A random valid tour: an Eulerian walk with shuffled neighbor order."""
    shuffled_edges = list(poset.edges)
    rng.shuffle(shuffled_edges)
    start = rng.choice(poset.points)
    reordered = Poset([start] + [p for p in poset.points if p != start], shuffled_edges)
    z = unfold(reordered)
    return list(z.fold)


def perf_graph_filtration(
    rng: random.Random,
    n_vertices: int = 600,
    total_insertions: int = 2000,
    arms: int = 3,
    surviving_cycles: int = 3,
) -> PFiltration:
    """A large star-poset graph filtration with e = ``total_insertions``.

    The shared bottom graph is a spanning tree plus ``surviving_cycles``
    extra edges, so the never-deleted subgraph has exactly that many
    independent cycles; each of the ``arms`` maximal points adds its own
    batch of random edges on top.
    """
    points = ["p0"] + [f"p{i + 1}" for i in range(arms)]
    poset = Poset(points, [("p0", q) for q in points[1:]])
    all_edges = set()
    base = set()
    for v in range(1, n_vertices):
        u = rng.randrange(v)
        base.add((u, v))
        all_edges.add((u, v))
    while len(base) < n_vertices - 1 + surviving_cycles:
        u, v = rng.randrange(n_vertices), rng.randrange(n_vertices)
        if u == v:
            continue
        e = (min(u, v), max(u, v))
        if e in all_edges:
            continue
        base.add(e)
        all_edges.add(e)

    def grow(count):
        added = set()
        while len(added) < count:
            u, v = rng.randrange(n_vertices), rng.randrange(n_vertices)
            if u == v:
                continue
            e = (min(u, v), max(u, v))
            if e in all_edges:
                continue
            added.add(e)
            all_edges.add(e)
        return added

    per_arm = total_insertions // arms
    counts = [per_arm] * arms
    counts[-1] += total_insertions - per_arm * arms
    verts = {(v,) for v in range(n_vertices)}
    complexes = {"p0": SimplicialComplex(verts | base)}
    for i, count in enumerate(counts):
        complexes[f"p{i + 1}"] = SimplicialComplex(verts | base | grow(count))
    return PFiltration(poset, complexes, degree=1)
