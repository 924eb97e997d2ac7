"""Shared worked examples and independent mini-oracles for the test suite.

The two four-point fixtures realize the classic pair of modules over the
poset A <= D <= C, B <= D that unfold to the same barcode but fold back
differently: in the first the full interval carries the same class at both
copies of D (rank 1), in the second it carries the two different square
classes (rank 0).  The conversion fixture is a three-point chain (with a
transitive edge) whose single full interval is not foldable as computed but
becomes foldable after adding the unique limit module.
"""

import numpy as np

from posetrank import Poset, PFiltration, SimplicialComplex

HEXAGON = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]
CHORD = [(0, 3)]
SQUARE_A = [(0, 1), (1, 2), (2, 3), (0, 3)]       # one half of the chorded hexagon
SQUARE_B = [(0, 3), (3, 4), (4, 5), (0, 5)]       # the other half
FILL_B = [(0, 3, 4), (0, 4, 5)]                   # fills SQUARE_B
CONE_HEX = [(0, 1, 6), (1, 2, 6), (2, 3, 6), (3, 4, 6), (4, 5, 6), (0, 5, 6)]

FIG_POSET = Poset(["A", "B", "C", "D"], [("A", "D"), ("B", "D"), ("D", "C")])
FIG_TOUR = ["A", "D", "C", "D", "B"]


def fig2_top() -> PFiltration:
    """Full interval folds: both D copies carry the hexagon class (rank 1)."""
    k_a = SimplicialComplex.from_closure(HEXAGON)
    k_b = SimplicialComplex.from_closure(HEXAGON)
    k_d = SimplicialComplex.from_closure(HEXAGON + CHORD)
    k_c = SimplicialComplex.from_closure(HEXAGON + CHORD + FILL_B)
    return PFiltration(FIG_POSET, {"A": k_a, "B": k_b, "C": k_c, "D": k_d}, degree=1)


def fig2_bottom() -> PFiltration:
    """Full interval does not fold: different squares at the D copies (rank 0)."""
    k_a = SimplicialComplex.from_closure(SQUARE_A)
    k_b = SimplicialComplex.from_closure(SQUARE_B)
    k_d = SimplicialComplex.from_closure(HEXAGON + CHORD)
    k_c = SimplicialComplex.from_closure(HEXAGON + CHORD + CONE_HEX)
    return PFiltration(FIG_POSET, {"A": k_a, "B": k_b, "C": k_c, "D": k_d}, degree=1)


CONV_POSET = Poset(["p0", "p1", "p2"], [("p0", "p1"), ("p1", "p2"), ("p0", "p2")])
CONV_BASE = [(0, 4), (0, 5), (1, 5), (2, 4), (3, 4), (3, 5), (4, 5), (3, 4, 5)] + [
    (v,) for v in range(6)
]


def conversion_fixture() -> PFiltration:
    """Rank 1 reached only after a nonzero-coefficient conversion."""
    k0 = SimplicialComplex.from_closure(CONV_BASE)
    k1 = SimplicialComplex.from_closure(CONV_BASE + [(0, 2), (1, 2), (2, 5)])
    k2 = SimplicialComplex.from_closure(CONV_BASE + [(0, 2), (1, 2), (2, 5), (2, 4, 5)])
    return PFiltration(CONV_POSET, {"p0": k0, "p1": k1, "p2": k2}, degree=1)


def limit_star_fixture() -> PFiltration:
    """A middle class dying in both directions: a single-point limit module.

    D carries a circle killed at both leaves, so the tour A, D, B produces a
    single-point open-open interval at the D copy.
    """
    poset = Poset(["A", "B", "D"], [("D", "A"), ("D", "B")])
    circle = [(0, 1), (1, 2), (0, 2)]
    k_d = SimplicialComplex.from_closure(circle)
    k_leaf = SimplicialComplex.from_closure([(0, 1, 2)])
    return PFiltration(poset, {"A": k_leaf, "B": k_leaf, "D": k_d}, degree=1)


# --- independent mini-oracles -------------------------------------------------


def betti_bruteforce(complex_: SimplicialComplex, k: int, p: int = 2) -> int:
    """dim H_k = dim ker(d_k) - rank(d_{k+1}) by plain row reduction."""

    def boundary(rows, cols):
        idx = {s: i for i, s in enumerate(rows)}
        mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for j, s in enumerate(cols):
            for i in range(len(s)):
                f = s[:i] + s[i + 1 :]
                if f:
                    mat[idx[f], j] = 1 if i % 2 == 0 else p - 1
        return mat

    def row_rank(mat):
        mat = mat.copy() % p
        r = 0
        for c in range(mat.shape[1]):
            piv = None
            for i in range(r, mat.shape[0]):
                if mat[i, c] % p:
                    piv = i
                    break
            if piv is None:
                continue
            mat[[r, piv]] = mat[[piv, r]]
            inv = pow(int(mat[r, c]), p - 2, p)
            mat[r] = (mat[r] * inv) % p
            for i in range(mat.shape[0]):
                if i != r and mat[i, c] % p:
                    mat[i] = (mat[i] - mat[i, c] * mat[r]) % p
            r += 1
        return r

    sk = complex_.k_simplices(k)
    if not sk:
        return 0
    d_k = boundary(complex_.k_simplices(k - 1), sk)
    d_k1 = boundary(sk, complex_.k_simplices(k + 1))
    dim_z = len(sk) - row_rank(d_k)
    dim_b = row_rank(d_k1)
    return dim_z - dim_b


def zigzag_barcode_by_ranks(zf, k, field=None):
    """Interval multiplicities from ranks of restrictions, by inclusion-exclusion."""
    from collections import Counter

    from posetrank import limit_to_colimit_rank, restrict_module, zigzag_path_module
    from posetrank.fplinalg import GF2

    mod = zigzag_path_module(zf, k, field or GF2)
    m = len(zf.zigzag) - 1
    r = {}
    for b in range(m + 1):
        for d in range(b, m + 1):
            sub = restrict_module(mod, [str(i) for i in range(b, d + 1)])
            r[(b, d)] = limit_to_colimit_rank(sub)
    out = Counter()
    for b in range(m + 1):
        for d in range(b, m + 1):
            mult = r[(b, d)]
            if b > 0:
                mult -= r[(b - 1, d)]
            if d < m:
                mult -= r[(b, d + 1)]
            if b > 0 and d < m:
                mult += r[(b - 1, d + 1)]
            if mult:
                out[(b, d)] = mult
    return sorted(out.elements())
