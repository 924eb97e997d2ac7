"""Ground truth by definition: limits, colimits, and the rank between them.

An :class:`ExplicitModule` stores a dimension per poset point and a matrix
per edge.  The limit is the solution space of the edge compatibility system,
the colimit is the quotient of the direct sum by the edge relations, and the
generalized rank is the rank of the composite ``project-to-a-point`` then
``inject-into-the-quotient`` (independent of the point, which is asserted at
runtime).  Deliberately the slow, obviously-correct path.
"""

from __future__ import annotations

import numpy as np

from .annotation import annotate_complex
from .errors import InputError, ValidationError
from .filtration import PFiltration, ZigzagFiltration, require_valid_filtration
from .fplinalg import FieldSpec, FpMatrix, GF2, kernel, make_reducer, matmul_mod, rank, _residue_is_zero
from .poset import Poset

__all__ = [
    "ExplicitModule",
    "module_from_filtration",
    "zigzag_path_module",
    "restrict_module",
    "limit",
    "colimit",
    "limit_to_colimit_rank",
    "LimitData",
    "ColimitData",
]


class ExplicitModule:
    """A functor from a finite poset to F_p vector spaces, given by matrices."""

    __slots__ = ("poset", "dims", "edge_maps", "field", "offsets", "total")

    def __init__(self, poset: Poset, dims: dict, edge_maps: dict, field: FieldSpec = GF2):
        self.poset = poset
        self.field = field
        self.dims = {str(p): int(dims[p]) for p in poset.points}
        self.edge_maps = {}
        for (a, b) in poset.edges:
            mat = np.mod(np.asarray(edge_maps[(a, b)], dtype=np.int64), field.p)
            if mat.shape != (self.dims[b], self.dims[a]):
                raise InputError(
                    f"map for edge ({a}, {b}) has shape {mat.shape}, "
                    f"expected ({self.dims[b]}, {self.dims[a]})"
                )
            self.edge_maps[(a, b)] = mat
        self.offsets = {}
        total = 0
        for p in poset.points:
            self.offsets[p] = total
            total += self.dims[p]
        self.total = total

    def validate(self):
        """Check functoriality: all edge-path composites between two points agree.

        Returns None, or a diagnostic naming a pair of points with
        disagreeing composites.
        """
        topo = self.poset.topological_order()
        pos = {p: i for i, p in enumerate(topo)}
        for src in self.poset.points:
            comp = {src: np.eye(self.dims[src], dtype=np.int64)}
            for q in sorted(self.poset.points, key=lambda r: pos[r]):
                for r in self.poset.predecessors(q):
                    if r not in comp:
                        continue
                    cand = matmul_mod(self.edge_maps[(r, q)], comp[r], self.field.p)
                    if q in comp:
                        if not np.array_equal(cand, comp[q]):
                            return f"composites from {src} to {q} disagree"
                    else:
                        comp[q] = cand
        return None

    def __repr__(self):
        return f"ExplicitModule(dims={self.dims})"


def module_from_filtration(f: PFiltration, k: int | None = None, field: FieldSpec = GF2) -> ExplicitModule:
    """The degree-k homology module of a filtration, with explicit matrices.

    Dimensions come from per-point annotation tables; the matrix of an edge
    annotates the smaller complex's basis cycles in the larger complex.
    """
    require_valid_filtration(f)
    if k is None:
        k = f.degree
    tables = {p: annotate_complex(f.complexes[p], k, field, point=p) for p in f.poset.points}
    dims = {p: tables[p].g for p in f.poset.points}
    edge_maps = {}
    for (a, b) in f.poset.edges:
        edge_maps[(a, b)] = tables[b].annotate_many(tables[a].basis_cycles)
    return ExplicitModule(f.poset, dims, edge_maps, field)


def zigzag_path_module(zf: ZigzagFiltration, k: int | None = None, field: FieldSpec = GF2) -> ExplicitModule:
    """The zigzag module of a zigzag filtration, over its path poset.

    Points are stringified indices; each arrow contributes one edge oriented
    by its direction.
    """
    from .zigzag import ZigzagHomology

    if k is None:
        k = zf.degree
    ctx = ZigzagHomology(zf, k, field)
    z = zf.zigzag
    points = [str(i) for i in range(len(z))]
    edges = []
    edge_maps = {}
    for i in range(z.m):
        if z.forward[i]:
            e = (str(i), str(i + 1))
        else:
            e = (str(i + 1), str(i))
        edges.append(e)
        edge_maps[e] = ctx.step_matrices[i]
    path = Poset(points, edges)
    dims = {str(i): ctx.dims[i] for i in range(len(z))}
    return ExplicitModule(path, dims, edge_maps, field)


def restrict_module(m: ExplicitModule, points) -> ExplicitModule:
    """Restrict a module to a convex subset of points (edges induced)."""
    keep = [str(p) for p in m.poset.points if str(p) in {str(q) for q in points}]
    edges = [(a, b) for (a, b) in m.poset.edges if a in keep and b in keep]
    sub = Poset(keep, edges)
    dims = {p: m.dims[p] for p in keep}
    maps = {e: m.edge_maps[e] for e in edges}
    return ExplicitModule(sub, dims, maps, m.field)


class LimitData:
    """Limit of a module: dimension and a basis of global sections."""

    __slots__ = ("dimension", "sections", "offsets")

    def __init__(self, dimension, sections, offsets):
        self.dimension = dimension
        self.sections = sections  # (total, dimension) int64; columns are sections
        self.offsets = offsets

    def section_at(self, m: ExplicitModule, p) -> np.ndarray:
        off = m.offsets[str(p)]
        return self.sections[off : off + m.dims[str(p)], :]


class ColimitData:
    """Colimit of a module: dimension and the quotient projection matrix."""

    __slots__ = ("dimension", "projection", "offsets")

    def __init__(self, dimension, projection, offsets):
        self.dimension = dimension
        self.projection = projection  # (dimension, total) int64
        self.offsets = offsets


def limit(m: ExplicitModule) -> LimitData:
    """Solve the stacked compatibility system over all edges."""
    p = m.field.p
    rows = sum(m.dims[b] for (_, b) in m.poset.edges)
    sys = np.zeros((rows, m.total), dtype=np.int64)
    r = 0
    for (a, b) in m.poset.edges:
        db = m.dims[b]
        oa, ob = m.offsets[a], m.offsets[b]
        sys[r : r + db, oa : oa + m.dims[a]] = m.edge_maps[(a, b)]
        sys[r : r + db, ob : ob + db] = np.mod(-np.eye(db, dtype=np.int64), p)
        r += db
    basis = kernel(FpMatrix(m.field, sys))
    return LimitData(basis.cols, basis.data.copy(), dict(m.offsets))


def colimit(m: ExplicitModule) -> ColimitData:
    """Quotient of the direct sum by the edge relations, with projection."""
    p = m.field.p
    red = make_reducer(m.field, m.total)
    rel_cols = []
    for (a, b) in m.poset.edges:
        mat = m.edge_maps[(a, b)]
        oa, ob = m.offsets[a], m.offsets[b]
        for i in range(m.dims[a]):
            col = np.zeros(m.total, dtype=np.int64)
            col[oa + i] = 1
            col[ob : ob + m.dims[b]] = np.mod(col[ob : ob + m.dims[b]] - mat[:, i], p)
            rel_cols.append(col)
    reduced = []
    for col in rel_cols:
        x, _ = red.add(col)
        if not _residue_is_zero(m.field, x):
            reduced.append(red.residue_vector(x))
    pivot_rows = []
    pivots = {}
    for col in reduced:
        nz = np.nonzero(col)[0]
        piv = int(nz[0])
        pivot_rows.append(piv)
        pivots[piv] = col
    free_rows = [r for r in range(m.total) if r not in pivots]
    # Normal form of each unit vector: eliminate pivot rows, keep free rows.
    proj = np.zeros((len(free_rows), m.total), dtype=np.int64)
    for j in range(m.total):
        vec = np.zeros(m.total, dtype=np.int64)
        vec[j] = 1
        for piv in sorted(pivots):
            c = int(vec[piv]) % p
            if c:
                col = pivots[piv]
                inv = pow(int(col[piv]), p - 2, p) if p > 2 else 1
                vec = np.mod(vec - (c * inv) * col, p)
        proj[:, j] = vec[free_rows]
    return ColimitData(len(free_rows), proj, dict(m.offsets))


def limit_to_colimit_rank(m: ExplicitModule) -> int:
    """Rank of the canonical limit-to-colimit map.

    Computed through every point and asserted identical, as it must be.
    """
    diag = m.validate()
    if diag is not None:
        raise ValidationError(diag)
    lim = limit(m)
    co = colimit(m)
    ranks = set()
    for pt in m.poset.points:
        off = m.offsets[pt]
        sec = lim.sections[off : off + m.dims[pt], :]
        injected = np.zeros((m.total, lim.dimension), dtype=np.int64)
        injected[off : off + m.dims[pt], :] = sec
        composite = matmul_mod(co.projection, injected, m.field.p)
        ranks.add(rank(FpMatrix(m.field, composite)))
    if len(ranks) > 1:
        raise AssertionError(f"limit-to-colimit rank depends on the point: {sorted(ranks)}")
    return ranks.pop() if ranks else 0
