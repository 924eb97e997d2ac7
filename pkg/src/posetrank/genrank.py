"""Folding full zigzag intervals back: the generalized-rank algorithm.

Pipeline: unfold the filtration's poset along an Eulerian tour, decompose the
induced zigzag module with representatives, then for every full interval
decide (1) whether it can be made foldable by adding limit-module
representatives (a stacked linear system over partner fibers, solved after
linearizing each per-leader block), and (2) whether its complement is
invertible, i.e. whether the decomposition of the quotient by the folded
candidate extends back.  The number of candidates passing both checks is the
generalized rank, and each one yields a folded family of cycles over the
original poset.

The invertibility check works directly on the quotient zigzag module (one
dimension removed pointwise): the quotient is decomposed, and each quotient
interval must admit a lift whose classes stay exactly compatible in the
original homology.  Lifting is a one-parameter correction per interval, so
only intervals with two open interior endpoints can obstruct.  Realizing the
quotient by coning the representative cycles into the complexes, as one
might first try, is not sound for representatives with disconnected support
(the cone can create or kill extra classes), which is why the check here
stays on the module level.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .filtration import PFiltration, require_valid_filtration, unfold_filtration
from .fplinalg import FieldSpec, FpMatrix, FpVector, GF2, matmul_mod, solve
from .poset import PartnerStructure, partners, unfold
from .zigzag import Decomposition, IntervalModule, _core_decompose, decompose

__all__ = [
    "ConvertibilityWitness",
    "GenRankResult",
    "is_foldable",
    "convertibility",
    "convert",
    "is_complement_invertible",
    "generalized_rank",
    "genrank_dcomplex",
    "genrank_graph",
    "kappa",
    "tau",
    "verify_sections",
]


class ConvertibilityWitness:
    """Coefficients over the other limit modules plus the converted reps."""

    __slots__ = ("alpha", "limit_serials", "converted_vectors", "_ctx")

    def __init__(self, alpha, limit_serials, converted_vectors, ctx):
        self.alpha = alpha                      # FpVector, one entry per other limit module
        self.limit_serials = limit_serials      # serials of the limit modules, matching alpha
        self.converted_vectors = converted_vectors
        self._ctx = ctx

    @property
    def converted_reps(self) -> dict:
        table = self._ctx.table_at
        return {q: table(q).class_chain(v) for q, v in sorted(self.converted_vectors.items())}

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.alpha.data))

    def __repr__(self):
        return f"ConvertibilityWitness(alpha={self.alpha.data.tolist()})"


class GenRankResult:
    """Outcome of the main algorithm: the rank, folded sections, and an audit."""

    __slots__ = ("rank", "complete_modules", "audit", "decomposition", "zigzag", "filtration", "bounds")

    def __init__(self, rank, complete_modules, audit, decomposition, zigzag, filtration, bounds=None):
        self.rank = rank
        self.complete_modules = complete_modules  # list of {poset point -> chain}
        self.audit = audit
        self.decomposition = decomposition
        self.zigzag = zigzag
        self.filtration = filtration
        self.bounds = bounds                      # (kappa0, tau0) when requested

    def __repr__(self):
        return f"GenRankResult(rank={self.rank})"


def is_foldable(interval: IntervalModule, ps: PartnerStructure) -> bool:
    """True iff the interval's classes agree on every partner fiber.

    Over F_2 agreement is vector equality; over odd characteristics the
    classes need only span the same line.
    """
    ctx = interval._ctx
    p = ctx.field.p
    for pt in sorted(ps.classes, key=lambda u: ps.classes[u][0]):
        idxs = ps.classes[pt]
        if len(idxs) < 2:
            continue
        in_support = [q for q in idxs if interval.covers(q)]
        if len(in_support) < 2:
            continue
        lead = interval.vector(in_support[0])
        for q in in_support[1:]:
            v = interval.vector(q)
            if p == 2:
                if not np.array_equal(v, lead):
                    return False
            else:
                nz = np.nonzero(lead)[0]
                if nz.size == 0:
                    if v.any():
                        return False
                    continue
                lam = (int(v[nz[0]]) * pow(int(lead[nz[0]]), p - 2, p)) % p
                if lam == 0 or not np.array_equal(v, np.mod(lam * lead, p)):
                    return False
    return True


def convertibility(interval: IntervalModule, d: Decomposition, ps: PartnerStructure | None = None):
    """Solve for limit-module coefficients that make ``interval`` foldable.

    Builds, for every leader and every one of its partners, the column of
    class differences contributed by each other limit module, stacks the
    per-leader blocks (the linearization of the per-leader matrices), and
    solves against the candidate's own difference column.  Returns a
    :class:`ConvertibilityWitness` or ``None``.  An already-foldable interval
    yields the all-zero coefficient vector.
    """
    ctx = d.context
    z = ctx.filtration.zigzag
    if ps is None:
        ps = partners(z)
    if not interval.is_full():
        raise InputError("convertibility is defined for full intervals")
    if not any(iv is interval for iv in d.intervals):
        raise InputError("interval is not part of this decomposition")
    p = ctx.field.p
    others = [iv for iv in d.limit_modules() if iv is not interval]

    blocks = []
    rhs_blocks = []
    for pt in sorted(ps.leaders, key=lambda u: ps.leaders[u]):
        lead_idx = ps.leaders[pt]
        for j in ps.classes[pt]:
            if j == lead_idx:
                continue
            rhs_blocks.append(np.mod(interval.vector(lead_idx) - interval.vector(j), p))
            blocks.append(
                np.stack(
                    [np.mod(o.vector(j) - o.vector(lead_idx), p) for o in others],
                    axis=1,
                )
                if others
                else np.zeros((ctx.dims[lead_idx], 0), dtype=np.int64)
            )
    if rhs_blocks:
        a_mat = FpMatrix(ctx.field, np.concatenate(blocks, axis=0))
        v = FpVector(ctx.field, np.concatenate(rhs_blocks))
    else:
        a_mat = FpMatrix.zeros(ctx.field, 0, len(others))
        v = FpVector(ctx.field, np.zeros(0, dtype=np.int64))
    alpha = solve(a_mat, v)
    if alpha is None:
        return None
    converted = {}
    for q in interval.support():
        acc = interval.vector(q).astype(np.int64)
        for r, o in enumerate(others):
            c = alpha[r]
            if c and o.covers(q):
                acc = acc + c * o.vector(q)
        converted[q] = np.mod(acc, p)
    serials = [o.serial for o in others]
    return ConvertibilityWitness(alpha, serials, converted, ctx)


def convert(d: Decomposition, interval: IntervalModule, w: ConvertibilityWitness) -> Decomposition:
    """Replace ``interval``'s representatives by the witness's converted ones."""
    new_iv = interval.with_vectors(dict(w.converted_vectors))
    return d.replace(interval, new_iv)


def _quotient_data(interval: IntervalModule, ctx):
    """Per-point projections/lifts modulo the interval's class line."""
    p = ctx.field.p
    z = ctx.filtration.zigzag
    w, piv, proj, lift = [], [], [], []
    for q in range(len(z)):
        wq = interval.vector(q)
        nz = np.nonzero(wq)[0]
        if nz.size == 0:
            raise InputError("interval class vanishes inside its support")
        pv = int(nz[0])
        g = wq.shape[0]
        inv = pow(int(wq[pv]), p - 2, p) if p > 2 else 1
        keep = [r for r in range(g) if r != pv]
        pr = np.zeros((g - 1, g), dtype=np.int64)
        for i, r in enumerate(keep):
            pr[i, r] = 1
            pr[i, pv] = (-int(wq[r]) * inv) % p
        lf = np.zeros((g, g - 1), dtype=np.int64)
        for i, r in enumerate(keep):
            lf[r, i] = 1
        w.append(wq)
        piv.append(pv)
        proj.append(pr)
        lift.append(lf)
    return w, piv, proj, lift


def _scalar_multiple(delta: np.ndarray, w: np.ndarray, piv: int, p: int):
    """The scalar c with delta == c * w; raises if delta leaves the line."""
    c = (int(delta[piv]) * (pow(int(w[piv]), p - 2, p) if p > 2 else 1)) % p
    if not np.array_equal(np.mod(delta, p), np.mod(c * w, p)):
        raise AssertionError("defect left the quotient line")
    return c


def is_complement_invertible(interval: IntervalModule, d: Decomposition) -> bool:
    """Decide whether the complement of a foldable full interval is invertible.

    Decomposes the quotient of the zigzag module by the candidate's class
    line and checks that the quotient decomposition extends back: every
    quotient interval must lift to cycles that remain exactly compatible in
    the original homology.  Each interval admits a one-parameter family of
    lifts, so only an interval with two open interior endpoints can fail,
    when the corrections forced at its two ends disagree.
    """
    ctx = interval._ctx
    field = ctx.field
    p = field.p
    z = ctx.filtration.zigzag
    m = z.m
    if not interval.is_full():
        raise InputError("complement invertibility is defined for full intervals")
    w, piv, proj, lift = _quotient_data(interval, ctx)

    # The candidate family must itself be exactly coherent along every arrow,
    # otherwise it is not a summand and cannot be exchanged for one.
    for i in range(m):
        mat = ctx.step_matrices[i]
        if z.forward[i]:
            img = matmul_mod(mat, w[i].reshape(-1, 1), p)[:, 0]
            if not np.array_equal(img, w[i + 1]):
                return False
        else:
            img = matmul_mod(mat, w[i + 1].reshape(-1, 1), p)[:, 0]
            if not np.array_equal(img, w[i]):
                return False

    qdims = [g - 1 for g in ctx.dims]
    qsteps = []
    for i in range(m):
        mat = ctx.step_matrices[i]
        if z.forward[i]:
            qmat = matmul_mod(matmul_mod(proj[i + 1], mat, p), lift[i], p)
        else:
            qmat = matmul_mod(matmul_mod(proj[i], mat, p), lift[i + 1], p)
        qsteps.append((z.forward[i], qmat))

    records = _core_decompose(qdims, qsteps, field)
    for birth, death, open_birth, open_death, vectors, _serial in records:
        lifts = {q: matmul_mod(lift[q], vectors[q].reshape(-1, 1), p)[:, 0] for q in range(birth, death + 1)}
        # Offset of the lift correction along the support, relative to its
        # value at the birth point.
        shift = {birth: 0}
        for q in range(birth, death):
            mat = ctx.step_matrices[q]
            if z.forward[q]:
                delta = np.mod(matmul_mod(mat, lifts[q].reshape(-1, 1), p)[:, 0] - lifts[q + 1], p)
                c = _scalar_multiple(delta, w[q + 1], piv[q + 1], p)
                shift[q + 1] = (shift[q] + c) % p
            else:
                delta = np.mod(matmul_mod(mat, lifts[q + 1].reshape(-1, 1), p)[:, 0] - lifts[q], p)
                c = _scalar_multiple(delta, w[q], piv[q], p)
                shift[q + 1] = (shift[q] - c) % p
        constraints = []
        if open_birth and birth > 0:
            mat = ctx.step_matrices[birth - 1]
            delta = matmul_mod(mat, lifts[birth].reshape(-1, 1), p)[:, 0]
            e = _scalar_multiple(delta, w[birth - 1], piv[birth - 1], p)
            constraints.append((-e - shift[birth]) % p)
        if open_death and death < m:
            mat = ctx.step_matrices[death]
            delta = matmul_mod(mat, lifts[death].reshape(-1, 1), p)[:, 0]
            e = _scalar_multiple(delta, w[death + 1], piv[death + 1], p)
            constraints.append((-e - shift[death]) % p)
        if len(constraints) == 2 and constraints[0] != constraints[1]:
            return False
    return True


def _fold_section(interval: IntervalModule, ps: PartnerStructure) -> dict:
    """One representative cycle per poset point, taken at the fiber leader."""
    out = {}
    for pt, idxs in ps.classes.items():
        out[pt] = interval.rep(idxs[0])
    return out


def generalized_rank(
    f: PFiltration,
    k: int | None = None,
    field: FieldSpec = GF2,
    tour=None,
    compute_bounds: bool = False,
) -> GenRankResult:
    """Compute the generalized rank of the degree-k module of ``f``.

    Unfolds, annotates, decomposes, then walks the full intervals in
    decomposition order: convertible candidates are converted in place (the
    running decomposition is updated), and those whose complement is
    invertible are marked complete.  The rank is the number of complete
    candidates; their folded per-point cycles are returned alongside a
    per-candidate audit trail.
    """
    require_valid_filtration(f)
    if k is None:
        k = f.degree
    z = unfold(f.poset, tour)
    zf = unfold_filtration(f, z)
    d = decompose(zf, k, field)
    ps = partners(z)

    bounds = None
    if compute_bounds:
        bounds = (kappa(d, ps), tau(d, ps))

    audit = []
    complete_modules = []
    rank_count = 0
    for iv in list(d.full_intervals()):
        record = {
            "interval": (iv.birth, iv.death),
            "foldable": is_foldable(iv, ps),
            "convertible": False,
            "alpha": None,
            "nonzero_alpha": 0,
            "complement_invertible": False,
            "complete": False,
        }
        w = convertibility(iv, d, ps)
        current = iv
        if w is None:
            if record["foldable"]:
                # Span-equal but not vector-equal representatives (odd
                # characteristic only): foldable by definition, no conversion.
                record["convertible"] = True
                record["span_equal_only"] = True
            else:
                audit.append(record)
                continue
        else:
            record["convertible"] = True
            record["alpha"] = [int(a) for a in w.alpha]
            record["nonzero_alpha"] = w.nonzero_count()
            d = convert(d, iv, w)
            current = next(c for c in d.intervals if c.serial == iv.serial)
        inv = is_complement_invertible(current, d)
        record["complement_invertible"] = inv
        if inv:
            record["complete"] = True
            rank_count += 1
            complete_modules.append(_fold_section(current, ps))
        audit.append(record)

    return GenRankResult(rank_count, complete_modules, audit, d, z, zf, bounds)


def kappa(d: Decomposition, ps: PartnerStructure | None = None) -> int:
    """Number of complete intervals of ``d`` as it stands (no conversions)."""
    if ps is None:
        ps = partners(d.filtration.zigzag)
    count = 0
    for iv in d.full_intervals():
        if is_foldable(iv, ps) and is_complement_invertible(iv, d):
            count += 1
    return count


def tau(d: Decomposition, ps: PartnerStructure | None = None) -> int:
    """Number of intervals of ``d`` that are convertible with invertible complement."""
    if ps is None:
        ps = partners(d.filtration.zigzag)
    count = 0
    for iv in d.full_intervals():
        w = convertibility(iv, d, ps)
        if w is None:
            if is_foldable(iv, ps) and is_complement_invertible(iv, d):
                count += 1
            continue
        d2 = convert(d, iv, w)
        converted = next(c for c in d2.intervals if c.serial == iv.serial)
        if is_complement_invertible(converted, d2):
            count += 1
    return count


def verify_sections(result: GenRankResult) -> bool:
    """Check the emitted complete modules are genuine global sections.

    Along every poset edge the emitted cycles must be homologous in the
    larger complex, and at every point the emitted classes must be linearly
    independent.
    """
    from .fplinalg import rank as fp_rank

    ctx = result.decomposition.context
    f = ctx.filtration
    poset = f.zigzag.source
    field = ctx.field
    for section in result.complete_modules:
        for p_lo, p_hi in poset.edges:
            t_hi = ctx.tables[p_hi]
            lo_cls = t_hi.annotate(section[p_lo])
            hi_cls = t_hi.annotate(section[p_hi])
            if not np.array_equal(lo_cls, hi_cls):
                return False
    for pt in poset.points:
        table = ctx.tables[pt]
        if not result.complete_modules:
            continue
        cols = np.stack([table.annotate(sec[pt]) for sec in result.complete_modules], axis=1)
        if fp_rank(FpMatrix(field, cols)) != len(result.complete_modules):
            return False
    return True


# --- special-case fast paths -------------------------------------------------


def genrank_dcomplex(f: PFiltration, d_dim: int, field: FieldSpec = GF2) -> int:
    """Rank for degree-d homology of a filtration of d-complexes.

    Equals the number of full bars in the zigzag barcode; no representatives,
    conversions or invertibility checks are needed.
    """
    require_valid_filtration(f)
    for pt in f.poset.points:
        if f.complexes[pt].dimension > d_dim:
            raise InputError(
                f"complex at {pt} has dimension {f.complexes[pt].dimension} > {d_dim}"
            )
    z = unfold(f.poset)
    zf = unfold_filtration(f, z)
    dec = decompose(zf, d_dim, field)
    return len(dec.full_intervals())


def genrank_graph(f: PFiltration) -> int:
    """Rank for degree-1 homology of a graph filtration, by one DFS.

    Walks the zigzag's elementary operations once, dropping every simplex
    that is ever deleted and ignoring insertions; the rank is the number of
    independent cycles of the surviving subgraph.
    """
    require_valid_filtration(f)
    for pt in f.poset.points:
        if f.complexes[pt].dimension > 1:
            raise InputError(f"complex at {pt} is not a graph")
    z = unfold(f.poset)
    zf = unfold_filtration(f, z)
    deleted = set()
    for ops in zf.elementary:
        for op, s in ops:
            if op == "-":
                deleted.add(s)
    survivors = zf.complexes[0].simplices - deleted
    verts = {s[0] for s in survivors if len(s) == 1}
    edges = [s for s in survivors if len(s) == 2]
    adj = {v: [] for v in verts}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = set()
    components = 0
    for v in sorted(verts):
        if v in seen:
            continue
        components += 1
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            for nxt in adj[u]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return len(edges) - len(verts) + components
