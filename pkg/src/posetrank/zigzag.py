"""Interval decomposition of zigzag modules with representative cycles.

The zigzag module induced in degree k by a zigzag filtration is decomposed
into interval summands, each carrying one representative k-cycle per point of
its support.  The result is a genuine internal direct decomposition: at every
point the representatives' classes form a basis, and along every in-support
arrow the classes map exactly onto each other (dying classes map exactly to
zero, classes born across a backward arrow map backward exactly to zero).

The sweep works arrow by arrow on homology coordinates.  Every point's
homology is expressed in the basis of a per-poset-point annotation table
(shared by all zigzag points with the same fold image), and each arrow
becomes an explicit matrix.  Interval bookkeeping follows the classical
zigzag rules: when an insertion kills a class, the combination that dies is
pivoted on the interval with the largest birth key; when a deletion forces a
class out, surviving intervals may absorb earlier-keyed ones to stay inside
the image.  Both rules only ever add an interval's representative into one
with a larger-or-equal birth key, which is exactly the set of rewrites that
preserve a direct decomposition, so the computed multiset of supports is the
barcode by uniqueness of the decomposition.

Birth keys order open (deletion-side) births before closed (insertion-side)
births, older open births after younger ones, and closed births by age:
``key = (0, -b)`` if open else ``(1, b)``.
"""

from __future__ import annotations

import numpy as np

from .annotation import AnnotationTable, annotate_complex
from .errors import InputError
from .filtration import ZigzagFiltration, chain_add, chain_scale
from .fplinalg import (
    FieldSpec,
    FpMatrix,
    GF2,
    kernel,
    make_reducer,
    matmul_mod,
    rank as fp_rank,
    _residue_is_zero,
)

__all__ = [
    "IntervalModule",
    "Decomposition",
    "ZigzagHomology",
    "decompose",
    "is_limit_module",
    "rep_sum",
]


class ZigzagHomology:
    """Per-run homology data: annotation tables, dimensions, arrow matrices.

    Tables are computed once per poset point and shared by all its zigzag
    partners, so partner points carry coordinates in the same basis.
    """

    __slots__ = ("filtration", "degree", "field", "tables", "dims", "step_matrices")

    def __init__(self, zf: ZigzagFiltration, degree: int, field: FieldSpec):
        self.filtration = zf
        self.degree = degree
        self.field = field
        z = zf.zigzag
        self.tables = {}
        for i, pt in enumerate(z.fold):
            if pt not in self.tables:
                self.tables[pt] = annotate_complex(zf.complexes[i], degree, field, point=pt)
        self.dims = [self.tables[pt].g for pt in z.fold]
        cache = {}
        self.step_matrices = []
        for i in range(z.m):
            if z.forward[i]:
                small, big = z.fold[i], z.fold[i + 1]
            else:
                small, big = z.fold[i + 1], z.fold[i]
            key = (small, big)
            mat = cache.get(key)
            if mat is None:
                mat = self.tables[big].annotate_many(self.tables[small].basis_cycles)
                cache[key] = mat
            self.step_matrices.append(mat)

    def table_at(self, i: int) -> AnnotationTable:
        return self.tables[self.filtration.zigzag.fold[i]]


class IntervalModule:
    """One interval summand with per-point representative cycles.

    Representatives are stored as coordinate vectors in the per-point
    annotation bases; chains are materialized on demand.
    """

    __slots__ = ("birth", "death", "endpoint_types", "vectors", "serial", "_ctx", "_reps")

    def __init__(self, birth, death, endpoint_types, vectors, serial, ctx):
        self.birth = birth
        self.death = death
        self.endpoint_types = endpoint_types
        self.vectors = vectors          # {point index -> int64 coordinate vector}
        self.serial = serial
        self._ctx = ctx
        self._reps = None

    @property
    def b(self):
        return self.birth

    @property
    def d(self):
        return self.death

    def support(self):
        return range(self.birth, self.death + 1)

    def covers(self, q: int) -> bool:
        return self.birth <= q <= self.death

    def is_full(self) -> bool:
        return self.birth == 0 and self.death == self._ctx.filtration.zigzag.m

    def vector(self, q: int) -> np.ndarray:
        """Coordinate vector at a point; zero outside the support."""
        v = self.vectors.get(q)
        if v is None:
            return np.zeros(self._ctx.dims[q], dtype=np.int64)
        return v

    def rep(self, q: int) -> dict:
        """Representative k-cycle at point q (zero chain outside support)."""
        if not self.covers(q):
            return {}
        return self._ctx.table_at(q).class_chain(self.vectors[q])

    @property
    def reps(self) -> dict:
        """All representatives, point index -> chain."""
        if self._reps is None:
            self._reps = {q: self.rep(q) for q in self.support()}
        return self._reps

    def with_vectors(self, vectors) -> "IntervalModule":
        return IntervalModule(self.birth, self.death, self.endpoint_types, vectors, self.serial, self._ctx)

    def __repr__(self):
        return f"IntervalModule([{self.birth}, {self.death}], types={self.endpoint_types})"


class _Tracked:
    """Working state of one not-yet-closed interval during the sweep."""

    __slots__ = ("birth", "open_birth", "vectors", "serial")

    def __init__(self, birth, open_birth, vec, serial):
        self.birth = birth
        self.open_birth = open_birth
        self.vectors = {birth: vec}
        self.serial = serial

    @property
    def key(self):
        return (0, -self.birth) if self.open_birth else (1, self.birth)

    def order_key(self):
        return (self.key, self.serial)


def _core_decompose(dims, steps, field: FieldSpec):
    """Decompose an explicit zigzag module given by dims and arrow matrices.

    ``steps[i]`` is ``(forward, matrix)`` where the matrix maps along the
    arrow (source dimension is dims[i] for forward arrows, dims[i+1] for
    backward ones).  Returns a list of closed ``_Tracked``-style records
    ``(birth, death, open_birth, open_death, vectors)``.
    """
    p = field.p
    serial = 0
    alive: list[_Tracked] = []
    finished = []

    for j in range(dims[0]):
        e = np.zeros(dims[0], dtype=np.int64)
        e[j] = 1
        alive.append(_Tracked(0, True, e, serial))
        serial += 1

    for i, (forward, mat) in enumerate(steps):
        g_next = dims[i + 1]
        if forward:
            # Deaths: kernel of the arrow on the span of the alive classes.
            if alive:
                z_mat = np.stack([tr.vectors[i] for tr in alive], axis=1)
                ker = kernel(FpMatrix(field, matmul_mod(mat, z_mat, p)))
                if ker.cols:
                    order = sorted(range(len(alive)), key=lambda t: alive[t].order_key())
                    kp = ker.data[np.array(order), :].copy()
                    # Full Gauss-Jordan on largest-row pivots: each dying
                    # combination then references only itself and survivors,
                    # never another dying interval.
                    _reduce_low(kp, field)
                    dead_idx = set()
                    for c in range(kp.shape[1]):
                        nz = np.nonzero(kp[:, c])[0]
                        low = int(nz[-1])
                        star = alive[order[low]]
                        combo = [(alive[order[int(r)]], int(kp[int(r), c])) for r in nz]
                        new_vectors = dict(star.vectors)
                        for q in range(star.birth, i + 1):
                            acc = np.zeros(dims[q], dtype=np.int64)
                            for tr, cf in combo:
                                if tr.birth <= q:
                                    acc = acc + cf * tr.vectors[q]
                            new_vectors[q] = np.mod(acc, p)
                        star.vectors = new_vectors
                        finished.append((star.birth, i, star.open_birth, True, star.vectors, star.serial))
                        dead_idx.add(order[low])
                    alive = [tr for t, tr in enumerate(alive) if t not in dead_idx]
            for tr in alive:
                tr.vectors[i + 1] = matmul_mod(mat, tr.vectors[i].reshape(-1, 1), p)[:, 0]
            # Births: complete the surviving images to a basis with unit vectors.
            red = make_reducer(field, g_next)
            taken = 0
            for tr in alive:
                x, _ = red.add(tr.vectors[i + 1])
                assert not _residue_is_zero(field, x), "survivor image collapsed"
                taken += 1
            for j in range(g_next):
                if taken == g_next:
                    break
                e = np.zeros(g_next, dtype=np.int64)
                e[j] = 1
                x, _ = red.add(e)
                if not _residue_is_zero(field, x):
                    alive.append(_Tracked(i + 1, False, e, serial))
                    serial += 1
                    taken += 1
        else:
            # Backward arrow: map from point i+1 into point i.  An interval
            # continues iff its class lies in the image of the arrow after
            # absorbing earlier-keyed intervals; absorption coefficients are
            # collected first and applied together from the pre-rewrite state,
            # so every recorded combination refers to original vectors.
            order = sorted(range(len(alive)), key=lambda t: alive[t].order_key())
            red = make_reducer(field, dims[i], track=True)
            for c in range(g_next):
                red.add(mat[:, c])
            processed = []  # _Tracked in reduction order
            survivors = []
            pending = []    # (tracker, [(coeff, earlier tracker), ...], preimage)
            for t in order:
                tr = alive[t]
                x, v = red.add(tr.vectors[i])
                total = g_next + len(processed) + 1
                if _residue_is_zero(field, x):
                    combo = red.combo_vector(v, total)
                    preimage = np.mod(-combo[:g_next], p)
                    absorbs = [
                        (int(combo[g_next + t2]) % p, tr2)
                        for t2, tr2 in enumerate(processed)
                        if int(combo[g_next + t2]) % p
                    ]
                    pending.append((tr, absorbs, preimage))
                    survivors.append(tr)
                else:
                    finished.append((tr.birth, i, tr.open_birth, False, tr.vectors, tr.serial))
                processed.append(tr)
            originals = {id(tr): tr.vectors for tr in processed}
            for tr, absorbs, preimage in pending:
                if absorbs:
                    base = originals[id(tr)]
                    new_vectors = dict(base)
                    for q in range(tr.birth, i + 1):
                        acc = base[q]
                        for lam, tr2 in absorbs:
                            if tr2.birth <= q:
                                acc = acc + lam * originals[id(tr2)][q]
                        new_vectors[q] = np.mod(acc, p)
                    tr.vectors = new_vectors
            for tr, _, preimage in pending:
                tr.vectors[i + 1] = preimage
            alive = survivors
            ker = kernel(FpMatrix(field, mat))
            for c in range(ker.cols):
                alive.append(_Tracked(i + 1, True, ker.data[:, c].copy(), serial))
                serial += 1

    m = len(dims) - 1
    for tr in alive:
        finished.append((tr.birth, m, tr.open_birth, True, tr.vectors, tr.serial))
    return finished


def _reduce_low(mat: np.ndarray, field: FieldSpec):
    """In-place Gauss-Jordan with pivot = largest nonzero row index.

    After the call every column has a distinct pivot row with coefficient 1,
    and each pivot row is zero in every other column.
    """
    p = field.p
    owner = {}
    for c in range(mat.shape[1]):
        while True:
            nz = np.nonzero(mat[:, c])[0]
            assert nz.size, "kernel column vanished during reduction"
            low = int(nz[-1])
            prev = owner.get(low)
            if prev is None:
                owner[low] = c
                inv = pow(int(mat[low, c]), p - 2, p) if p > 2 else 1
                if inv != 1:
                    mat[:, c] = np.mod(mat[:, c] * inv, p)
                break
            coef = int(mat[low, c]) % p
            mat[:, c] = np.mod(mat[:, c] - coef * mat[:, prev], p)
    # Back-substitute in descending pivot order to clear pivot rows everywhere.
    for low in sorted(owner, reverse=True):
        c = owner[low]
        for c2 in range(mat.shape[1]):
            if c2 == c:
                continue
            coef = int(mat[low, c2]) % p
            if coef:
                mat[:, c2] = np.mod(mat[:, c2] - coef * mat[:, c], p)


class Decomposition:
    """A direct decomposition of the degree-k zigzag module of a filtration."""

    __slots__ = ("intervals", "filtration", "degree", "field", "context")

    def __init__(self, intervals, filtration, degree, field, context):
        self.intervals = intervals
        self.filtration = filtration
        self.degree = degree
        self.field = field
        self.context = context

    def barcode(self):
        """Sorted multiset of interval supports."""
        return sorted((iv.birth, iv.death) for iv in self.intervals)

    def full_intervals(self):
        return [iv for iv in self.intervals if iv.is_full()]

    def limit_modules(self):
        return [iv for iv in self.intervals if is_limit_module(iv, self.filtration)]

    def at_point(self, q: int):
        return [iv for iv in self.intervals if iv.covers(q)]

    def replace(self, old: IntervalModule, new: IntervalModule) -> "Decomposition":
        intervals = [new if iv is old else iv for iv in self.intervals]
        if not any(iv is new for iv in intervals):
            raise InputError("interval to replace is not part of this decomposition")
        return Decomposition(intervals, self.filtration, self.degree, self.field, self.context)

    def validate(self):
        """Check all decomposition invariants; return None or a diagnostic."""
        ctx = self.context
        z = self.filtration.zigzag
        p = self.field.p
        for q in range(len(z)):
            through = self.at_point(q)
            if len(through) != ctx.dims[q]:
                return f"point {q}: {len(through)} intervals but homology dimension {ctx.dims[q]}"
            if through:
                mat = FpMatrix(self.field, np.stack([iv.vector(q) for iv in through], axis=1))
                if fp_rank(mat) != ctx.dims[q]:
                    return f"point {q}: representative classes are dependent"
            for iv in through:
                if not iv.vector(q).any() and ctx.dims[q]:
                    return f"point {q}: zero representative class"
        for i in range(z.m):
            mat = ctx.step_matrices[i]
            for iv in self.intervals:
                if z.forward[i]:
                    if iv.covers(i):
                        img = matmul_mod(mat, iv.vector(i).reshape(-1, 1), p)[:, 0]
                        want = iv.vector(i + 1) if iv.covers(i + 1) else np.zeros(ctx.dims[i + 1], dtype=np.int64)
                        if not np.array_equal(img, want):
                            return f"interval {iv}: incoherent across forward arrow {i}"
                else:
                    if iv.covers(i + 1):
                        img = matmul_mod(mat, iv.vector(i + 1).reshape(-1, 1), p)[:, 0]
                        want = iv.vector(i) if iv.covers(i) else np.zeros(ctx.dims[i], dtype=np.int64)
                        if not np.array_equal(img, want):
                            return f"interval {iv}: incoherent across backward arrow {i}"
        for iv in self.intervals:
            if iv.endpoint_types != _endpoint_types(z, iv.birth, iv.death):
                return f"interval {iv}: endpoint types disagree with the arrows"
        return None

    def __repr__(self):
        return f"Decomposition(degree={self.degree}, intervals={self.barcode()})"


def _endpoint_types(z, b, d):
    birth = "closed" if (b != 0 and z.forward[b - 1]) else "open"
    death = "closed" if (d != z.m and not z.forward[d]) else "open"
    return (birth, death)


def decompose(zf: ZigzagFiltration, k: int | None = None, field: FieldSpec = GF2) -> Decomposition:
    """Decompose the degree-k zigzag module of ``zf`` with representatives.

    Intervals are sorted by (birth, death, representative coordinates) and,
    over odd characteristics, rescaled so the leading simplex of the birth
    representative has coefficient 1.
    """
    if k is None:
        k = zf.degree
    ctx = ZigzagHomology(zf, k, field)
    steps = list(zip(zf.zigzag.forward, ctx.step_matrices))
    raw = _core_decompose(ctx.dims, steps, field)

    intervals = []
    for birth, death, open_birth, open_death, vectors, serial in raw:
        types = _endpoint_types(zf.zigzag, birth, death)
        iv = IntervalModule(birth, death, types, vectors, serial, ctx)
        if field.p > 2:
            _normalize_leading(iv, field)
        intervals.append(iv)
    intervals.sort(key=lambda iv: (iv.birth, iv.death, tuple(iv.vector(iv.birth).tolist()), iv.serial))
    return Decomposition(intervals, zf, k, field, ctx)


def _normalize_leading(iv: IntervalModule, field: FieldSpec):
    chain = iv.rep(iv.birth)
    if not chain:
        return
    lead = max(chain)
    c = chain[lead] % field.p
    if c == 1:
        return
    inv = field.inv(c)
    for q in list(iv.vectors):
        iv.vectors[q] = np.mod(iv.vectors[q] * inv, field.p)
    iv._reps = None


def is_limit_module(i: IntervalModule, zf: ZigzagFiltration | None = None) -> bool:
    """True iff both endpoints are open (full intervals count as open-open)."""
    return i.endpoint_types == ("open", "open")


def rep_sum(targets, zf: ZigzagFiltration) -> dict:
    """Pointwise chain sum of coefficient-scaled representatives.

    ``targets`` is a list of ``(coefficient, IntervalModule)`` drawn from one
    decomposition; points outside an interval's support contribute zero.
    Returns a map from every zigzag point index to a chain.
    """
    if not targets:
        return {}
    field = targets[0][1]._ctx.field
    m = targets[0][1]._ctx.filtration.zigzag.m
    out = {}
    for q in range(m + 1):
        acc: dict = {}
        for coeff, iv in targets:
            if iv.covers(q):
                acc = chain_add(acc, chain_scale(iv.rep(q), coeff, field), field)
        out[q] = acc
    return out
