"""Finite connected posets and their unfolding into zigzag posets.

A poset is given as a directed acyclic graph whose edges are (at least) the
Hasse relations.  Unfolding doubles every edge of the underlying undirected
graph, walks an Eulerian tour, and orients each step by the source edge
direction; the result is a linear "zigzag" poset together with the folding
map back onto the original points.
"""

from __future__ import annotations

from .errors import InputError, ValidationError

__all__ = [
    "Poset",
    "ZigzagPoset",
    "PartnerStructure",
    "validate_poset",
    "unfold",
    "partners",
]


class Poset:
    """A finite poset presented by points and directed edges ``p <= q``.

    The declared point order doubles as the id order used for deterministic
    tie-breaking (tour start vertex, neighbor visiting order).
    """

    __slots__ = ("points", "edges", "index", "_succ", "_pred")

    def __init__(self, points, edges):
        self.points = [str(p) for p in points]
        self.edges = [(str(p), str(q)) for p, q in edges]
        self.index = {p: i for i, p in enumerate(self.points)}
        if len(self.index) != len(self.points):
            raise InputError("duplicate point ids in poset")
        self._succ = {p: [] for p in self.points}
        self._pred = {p: [] for p in self.points}
        for p, q in self.edges:
            self._succ.setdefault(p, []).append(q)
            self._pred.setdefault(q, []).append(p)

    def successors(self, p):
        return self._succ[p]

    def predecessors(self, p):
        return self._pred[p]

    def topological_order(self):
        """Points in a topological order of the edge relation."""
        indeg = {p: 0 for p in self.points}
        for _, q in self.edges:
            indeg[q] += 1
        stack = [p for p in self.points if indeg[p] == 0]
        order = []
        while stack:
            p = stack.pop(0)
            order.append(p)
            for q in self._succ[p]:
                indeg[q] -= 1
                if indeg[q] == 0:
                    stack.append(q)
        if len(order) != len(self.points):
            raise ValidationError("poset contains a directed cycle")
        return order

    def leq(self, p, q):
        """Reachability p <= q along declared edges."""
        if p == q:
            return True
        seen = {p}
        stack = [p]
        while stack:
            r = stack.pop()
            for s in self._succ[r]:
                if s == q:
                    return True
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return False

    def __repr__(self):
        return f"Poset(points={self.points}, edges={self.edges})"


def validate_poset(p: Poset):
    """Return ``None`` if ``p`` is well-formed, else a diagnostic string.

    Checks: declared endpoints, no self-loops or duplicate edges, acyclicity
    (with a witness cycle) and connectedness of the underlying undirected
    graph (with a witness component).
    """
    seen_edges = set()
    for a, b in p.edges:
        if a not in p.index or b not in p.index:
            return f"edge ({a}, {b}) references an undeclared point"
        if a == b:
            return f"self-loop at {a}"
        if (a, b) in seen_edges:
            return f"duplicate edge ({a}, {b})"
        seen_edges.add((a, b))

    # Cycle detection with witness, via iterative DFS coloring.
    color = {q: 0 for q in p.points}  # 0 new, 1 on stack, 2 done
    parent = {}
    for root in p.points:
        if color[root]:
            continue
        stack = [(root, iter(p.successors(root)))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 0:
                    color[nxt] = 1
                    parent[nxt] = node
                    stack.append((nxt, iter(p.successors(nxt))))
                    advanced = True
                    break
                if color[nxt] == 1:
                    cyc = [nxt, node]
                    cur = node
                    while cur != nxt:
                        cur = parent[cur]
                        cyc.append(cur)
                    cyc = cyc[1:][::-1]
                    return "directed cycle " + ",".join(cyc)
            if not advanced:
                color[node] = 2
                stack.pop()

    if p.points:
        neighbors = {q: set() for q in p.points}
        for a, b in p.edges:
            neighbors[a].add(b)
            neighbors[b].add(a)
        comp = {p.points[0]}
        stack = [p.points[0]]
        while stack:
            node = stack.pop()
            for nxt in neighbors[node]:
                if nxt not in comp:
                    comp.add(nxt)
                    stack.append(nxt)
        if len(comp) != len(p.points):
            inside = [q for q in p.points if q in comp]
            return "disconnected: component {" + ",".join(inside) + "} does not reach the rest"
    return None


def require_valid_poset(p: Poset):
    diag = validate_poset(p)
    if diag is not None:
        raise ValidationError(diag)


class ZigzagPoset:
    """A linear poset ``q_0 .. q_m`` with per-step arrow directions.

    ``forward[i]`` is True when ``q_i <= q_{i+1}`` and False when
    ``q_{i+1} <= q_i``.  ``fold[i]`` names the source poset point that
    ``q_i`` maps onto.
    """

    __slots__ = ("source", "fold", "forward")

    def __init__(self, source: Poset, fold, forward):
        self.source = source
        self.fold = list(fold)
        self.forward = list(forward)
        if len(self.forward) != max(len(self.fold) - 1, 0):
            raise InputError("arrow count must be one less than point count")

    def __len__(self):
        return len(self.fold)

    @property
    def m(self) -> int:
        """Index of the last zigzag point."""
        return len(self.fold) - 1

    def step_edge(self, i):
        """The source poset edge realized by step ``i``, as (lower, upper)."""
        if self.forward[i]:
            return (self.fold[i], self.fold[i + 1])
        return (self.fold[i + 1], self.fold[i])

    def check(self):
        """Raise unless this zigzag is a genuine unfolding of its source."""
        src_edges = set(self.source.edges)
        for i in range(self.m):
            if self.step_edge(i) not in src_edges:
                raise ValidationError(f"step {i} does not map onto a source edge")
        if set(self.fold) != set(self.source.points):
            raise ValidationError("folding is not surjective on points")
        covered = {self.step_edge(i) for i in range(self.m)}
        if covered != src_edges and self.source.edges:
            missing = sorted(set(src_edges) - covered)
            raise ValidationError(f"folding misses edges {missing}")

    def __repr__(self):
        parts = [self.fold[0]] if self.fold else []
        for i in range(self.m):
            parts.append("->" if self.forward[i] else "<-")
            parts.append(self.fold[i + 1])
        return "ZigzagPoset(" + " ".join(parts) + ")"


class PartnerStructure:
    """Fibers of the folding map, with one designated leader per fiber."""

    __slots__ = ("classes", "leaders")

    def __init__(self, classes: dict, leaders: dict):
        self.classes = classes    # poset point -> sorted list of zigzag indices
        self.leaders = leaders    # poset point -> leader index (fibers of size > 1 only)

    def __repr__(self):
        return f"PartnerStructure(classes={self.classes}, leaders={self.leaders})"


def _eulerian_tour(p: Poset):
    """Hierholzer's algorithm on the edge-doubled undirected graph.

    Starts at the first declared point; at every vertex the unused edge
    copies are taken in declared edge order.  Returns the closed tour as a
    vertex sequence.
    """
    adj = {q: [] for q in p.points}  # vertex -> list of (neighbor, copy id)
    for eid, (a, b) in enumerate(p.edges):
        for copy in (0, 1):
            adj[a].append((b, (eid, copy)))
            adj[b].append((a, (eid, copy, "rev")))
    # Two directed arcs per copy; mark copies used regardless of direction.
    used = set()
    cursor = {q: 0 for q in p.points}

    def walk(start):
        path = [start]
        v = start
        while True:
            lst = adj[v]
            i = cursor[v]
            while i < len(lst) and lst[i][1][:2] in used:
                i += 1
            cursor[v] = i
            if i == len(lst):
                return path
            nxt, tag = lst[i]
            used.add(tag[:2])
            path.append(nxt)
            v = nxt

    start = p.points[0]
    tour = walk(start)
    # Splice sub-tours at the first vertex with unused copies.
    i = 0
    total_copies = 2 * len(p.edges)
    while len(used) < total_copies and i < len(tour):
        v = tour[i]
        lst = adj[v]
        j = cursor[v]
        while j < len(lst) and lst[j][1][:2] in used:
            j += 1
        cursor[v] = j
        if j < len(lst):
            sub = walk(v)
            tour = tour[:i] + sub + tour[i + 1 :]
        else:
            i += 1
    return tour


def unfold(p: Poset, tour=None) -> ZigzagPoset:
    """Unfold ``p`` into a zigzag poset.

    Without an explicit ``tour``, every undirected edge is doubled and an
    Eulerian tour is walked deterministically, so the zigzag has at most
    ``2 * (# points + # edges) + 1`` points.  An explicit tour (a point
    sequence stepping along edges and covering every edge at least once)
    is used verbatim; this admits the shorter unfoldings used in worked
    examples.
    """
    require_valid_poset(p)
    if not p.points:
        raise InputError("cannot unfold an empty poset")
    if tour is None:
        tour = _eulerian_tour(p)
    else:
        tour = [str(q) for q in tour]
        edge_set = set(p.edges)
        for i, q in enumerate(tour):
            if q not in p.index:
                raise InputError(f"tour step {i}: unknown point {q}")
        if not tour:
            raise InputError("explicit tour is empty")
        for i in range(len(tour) - 1):
            a, b = tour[i], tour[i + 1]
            if (a, b) not in edge_set and (b, a) not in edge_set:
                raise InputError(f"tour step {i}: ({a}, {b}) is not an edge")
        covered = set()
        for i in range(len(tour) - 1):
            a, b = tour[i], tour[i + 1]
            covered.add((a, b) if (a, b) in edge_set else (b, a))
        missing_pts = set(p.points) - set(tour)
        if missing_pts:
            raise InputError(f"tour misses points {sorted(missing_pts)}")
        if covered != edge_set:
            missing = sorted(edge_set - covered)
            raise InputError(f"tour misses edges {missing}")

    edge_set = set(p.edges)
    forward = []
    for i in range(len(tour) - 1):
        a, b = tour[i], tour[i + 1]
        forward.append((a, b) in edge_set)
    z = ZigzagPoset(p, tour, forward)
    z.check()
    return z


def partners(z: ZigzagPoset) -> PartnerStructure:
    """Group zigzag points by fold image; leader = lowest index per fiber."""
    classes: dict = {}
    for i, q in enumerate(z.fold):
        classes.setdefault(q, []).append(i)
    leaders = {q: idxs[0] for q, idxs in classes.items() if len(idxs) > 1}
    return PartnerStructure(classes, leaders)
