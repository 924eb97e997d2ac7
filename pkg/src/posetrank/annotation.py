"""Annotations: coordinates of cycle classes in a fixed homology basis.

For a complex K and degree k, an annotation table is a g x n_k matrix A
(g = dim H_k) such that A applied to any k-cycle gives the coordinates of
its class in a chosen basis; boundaries annotate to zero and the table's own
basis cycles annotate to the standard unit vectors.

The table is computed by one boundary-matrix reduction per complex: a basis
of B_k from the (k+1)-boundary columns, extended to Z_k by kernel columns of
the k-boundary (these become the basis cycles), extended to the full chain
space by unit vectors, and inverted.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .filtration import SimplicialComplex, chain_boundary
from .fplinalg import (
    FieldSpec,
    FpMatrix,
    FpVector,
    GF2,
    make_reducer,
    matmul_mod,
    solve_multi,
    _residue_is_zero,
)

__all__ = ["AnnotationTable", "annotate_complex", "annotate_cycle", "annotate_batch"]


def boundary_matrix(c: SimplicialComplex, k: int, field: FieldSpec) -> np.ndarray:
    """Signed boundary matrix from k-simplices to (k-1)-simplices."""
    rows = c.k_simplices(k - 1)
    cols = c.k_simplices(k)
    idx = {s: i for i, s in enumerate(rows)}
    p = field.p
    mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for j, s in enumerate(cols):
        for i in range(len(s)):
            f = s[:i] + s[i + 1 :]
            if f:
                mat[idx[f], j] = 1 if i % 2 == 0 else p - 1
    return mat


class AnnotationTable:
    """Annotation matrix plus explicit basis cycles for one complex."""

    __slots__ = ("complex", "degree", "field", "simplices", "index", "matrix", "basis_cycles", "point")

    def __init__(self, complex_, degree, field, simplices, matrix, basis_cycles, point=None):
        self.complex = complex_
        self.degree = degree
        self.field = field
        self.simplices = simplices            # sorted k-simplices
        self.index = {s: i for i, s in enumerate(simplices)}
        self.matrix = matrix                  # (g, n_k) int64, reduced mod p
        self.basis_cycles = basis_cycles      # list of g chains
        self.point = point

    @property
    def g(self) -> int:
        return int(self.matrix.shape[0])

    def chain_vector(self, chain: dict) -> np.ndarray:
        """Coefficient vector of a chain over this table's k-simplices."""
        vec = np.zeros(len(self.simplices), dtype=np.int64)
        for s, c in chain.items():
            i = self.index.get(s)
            if i is None:
                raise InputError(f"simplex {s} is not a {self.degree}-simplex of the complex")
            vec[i] = c % self.field.p
        return vec

    def vector_chain(self, vec: np.ndarray) -> dict:
        """Inverse of :meth:`chain_vector` (zero entries dropped)."""
        return {self.simplices[i]: int(v) for i, v in enumerate(vec) if v}

    def annotate(self, chain: dict, check_cycle: bool = False) -> np.ndarray:
        if check_cycle and chain_boundary(chain, self.field):
            raise InputError("chain is not a cycle")
        return matmul_mod(self.matrix, self.chain_vector(chain).reshape(-1, 1), self.field.p)[:, 0]

    def annotate_many(self, chains) -> np.ndarray:
        """Annotations of several chains at once, as matrix columns (E @ G)."""
        chains = list(chains)
        g_mat = np.zeros((len(self.simplices), len(chains)), dtype=np.int64)
        for j, ch in enumerate(chains):
            g_mat[:, j] = self.chain_vector(ch)
        return matmul_mod(self.matrix, g_mat, self.field.p)

    def class_chain(self, coords: np.ndarray) -> dict:
        """A cycle whose class has the given coordinates."""
        out: dict = {}
        p = self.field.p
        for i, a in enumerate(coords):
            a = int(a) % p
            if a == 0:
                continue
            for s, c in self.basis_cycles[i].items():
                v = (out.get(s, 0) + a * c) % p
                if v:
                    out[s] = v
                else:
                    out.pop(s, None)
        return out

    def __repr__(self):
        return f"AnnotationTable(point={self.point}, degree={self.degree}, g={self.g})"


def annotate_complex(c: SimplicialComplex, k: int, field: FieldSpec = GF2, point=None) -> AnnotationTable:
    """Compute an annotation table for degree-k homology of ``c``.

    Deterministic: reduction pivots are chosen lowest-index-first over the
    sorted k-simplices, so identical complexes always produce identical
    tables and basis cycles.
    """
    if k < 0:
        raise InputError("degree must be non-negative")
    witness = c.missing_face()
    if witness is not None:
        raise InputError(f"complex is not face-closed: {witness[0]} lacks {witness[1]}")
    simplices = c.k_simplices(k)
    n = len(simplices)
    p = field.p
    if n == 0:
        return AnnotationTable(c, k, field, [], np.zeros((0, 0), dtype=np.int64), [], point)

    d_k = boundary_matrix(c, k, field)          # (n_{k-1}, n)
    d_k1 = boundary_matrix(c, k + 1, field)     # (n, n_{k+1})

    # Basis of B_k from independent (k+1)-boundary columns.
    red_b = make_reducer(field, n)
    b_cols = []
    for j in range(d_k1.shape[1]):
        col = d_k1[:, j]
        x, _ = red_b.add(col)
        if not _residue_is_zero(field, x):
            b_cols.append(col.copy())

    # Kernel of d_k = Z_k; keep the kernel columns independent from B_k.
    red_z = make_reducer(field, d_k.shape[0], track=True)
    z_cols = []
    for j in range(n):
        x, v = red_z.add(d_k[:, j])
        if _residue_is_zero(field, x):
            z_cols.append(red_z.combo_vector(v, n))

    red_h = make_reducer(field, n)
    for col in b_cols:
        red_h.add(col)
    cycle_cols = []
    for col in z_cols:
        x, _ = red_h.add(col)
        if not _residue_is_zero(field, x):
            cycle_cols.append(col)
    g = len(cycle_cols)

    # Complete to a basis of the chain space with unit vectors.
    comp_cols = []
    need = n - len(b_cols) - g
    for j in range(n):
        if need == 0:
            break
        e = np.zeros(n, dtype=np.int64)
        e[j] = 1
        x, _ = red_h.add(e)
        if not _residue_is_zero(field, x):
            comp_cols.append(e)
            need -= 1

    basis = np.stack(b_cols + cycle_cols + comp_cols, axis=1) if n else np.zeros((0, 0), dtype=np.int64)
    # A @ basis = [0 | I_g | 0]  <=>  basis^T @ A^T = selector columns.
    sel = np.zeros((n, g), dtype=np.int64)
    for i in range(g):
        sel[len(b_cols) + i, i] = 1
    at = solve_multi(FpMatrix(field, basis.T), sel)
    if at is None:  # pragma: no cover - basis is invertible by construction
        raise AssertionError("annotation basis was not invertible")
    a_mat = np.mod(at.T, p)

    cycles = []
    for col in cycle_cols:
        cycles.append({simplices[i]: int(col[i]) for i in range(n) if col[i]})
    return AnnotationTable(c, k, field, simplices, a_mat, cycles, point)


def annotate_cycle(t: AnnotationTable, chain: dict, check_cycle: bool = False) -> FpVector:
    """Annotation of a single k-cycle, as a length-g vector."""
    return FpVector(t.field, t.annotate(chain, check_cycle=check_cycle))


def annotate_batch(t: AnnotationTable, chains) -> FpMatrix:
    """Annotations of many k-cycles at once; column j belongs to chains[j]."""
    return FpMatrix(t.field, t.annotate_many(chains))
