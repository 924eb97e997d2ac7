import itertools
import random

import numpy as np
import pytest

from posetrank.annotation import annotate_batch, annotate_complex, annotate_cycle
from posetrank.errors import InputError
from posetrank.filtration import SimplicialComplex, chain_add, chain_boundary
from posetrank.fplinalg import FieldSpec, FpMatrix, GF2, rank
from posetrank.randgen import _random_pool
from posetrank.zigzag import ZigzagHomology
from posetrank.filtration import unfold_filtration
from posetrank.poset import Poset, unfold

from fixtures import betti_bruteforce, fig2_top, FIG_TOUR

HOLLOW = SimplicialComplex.from_closure([(0, 1), (1, 2), (0, 2)])
FILLED = SimplicialComplex.from_closure([(0, 1, 2)])
TWO = SimplicialComplex.from_closure([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


def test_hollow_triangle():
    t = annotate_complex(HOLLOW, 1)
    assert t.g == 1 == betti_bruteforce(HOLLOW, 1)
    total = np.zeros(1, dtype=np.int64)
    for e in HOLLOW.k_simplices(1):
        total = (total + t.annotate({e: 1})) % 2
    assert total.tolist() == [1]


def test_filled_triangle():
    t = annotate_complex(FILLED, 1)
    assert t.g == 0 == betti_bruteforce(FILLED, 1)
    assert len(t.annotate({(0, 1): 1, (1, 2): 1, (0, 2): 1})) == 0


def test_two_disjoint_triangles():
    t = annotate_complex(TWO, 1)
    assert t.g == 2 == betti_bruteforce(TWO, 1)
    a = t.annotate({(0, 1): 1, (1, 2): 1, (0, 2): 1})
    b = t.annotate({(3, 4): 1, (4, 5): 1, (3, 5): 1})
    assert rank(FpMatrix(GF2, np.stack([a, b], axis=1))) == 2


def test_annotate_cycle_empty_chain():
    t = annotate_complex(TWO, 1)
    assert not annotate_cycle(t, {}).data.any()


def test_basis_cycles_annotate_to_unit_vectors():
    t = annotate_complex(TWO, 1)
    for i, bc in enumerate(t.basis_cycles):
        v = t.annotate(bc)
        want = np.zeros(t.g, dtype=np.int64)
        want[i] = 1
        assert np.array_equal(v, want)


def test_boundary_annotates_to_zero():
    c = SimplicialComplex.from_closure([(0, 1, 2), (1, 2, 3), (0, 1), (2, 3), (0, 3)])
    t = annotate_complex(c, 1)
    boundary = {(0, 1): 1, (1, 2): 1, (0, 2): 1}
    assert not t.annotate(boundary).any()


def test_annotate_unknown_simplex_rejected():
    t = annotate_complex(HOLLOW, 1)
    with pytest.raises(InputError):
        t.annotate({(7, 8): 1})


def test_annotate_cycle_check_flag():
    t = annotate_complex(HOLLOW, 1)
    with pytest.raises(InputError):
        annotate_cycle(t, {(0, 1): 1}, check_cycle=True)


def test_annotate_batch_empty_list():
    t = annotate_complex(TWO, 1)
    m = annotate_batch(t, [])
    assert m.shape == (2, 0)


def test_annotate_batch_basis_cycles_identity():
    t = annotate_complex(TWO, 1)
    assert annotate_batch(t, t.basis_cycles) == FpMatrix.identity(GF2, 2)


def test_annotate_batch_matches_single_path():
    rng = random.Random(5)
    pool = SimplicialComplex(_random_pool(rng, 2, 25, 6))
    t = annotate_complex(pool, 1)
    # random cycles: boundaries of 2-chains plus random basis combinations
    cycles = []
    for _ in range(6):
        ch = {}
        for s in pool.k_simplices(2):
            if rng.random() < 0.5:
                ch = chain_add(ch, chain_boundary({s: 1}, GF2), GF2)
        for i, bc in enumerate(t.basis_cycles):
            if rng.random() < 0.5:
                ch = chain_add(ch, bc, GF2)
        cycles.append(ch)
    batch = annotate_batch(t, cycles)
    for j, ch in enumerate(cycles):
        assert np.array_equal(batch.data[:, j], t.annotate(ch))


def is_boundary_bruteforce(c: SimplicialComplex, chain, p=2):
    """Independent membership test: enumerate all (k+1)-chain boundaries."""
    cofaces = c.k_simplices(len(next(iter(chain))) if chain else 2)
    tris = c.k_simplices(2)
    for bits in itertools.product(range(p), repeat=len(tris)):
        acc = {}
        for coeff, s in zip(bits, tris):
            if coeff:
                acc = chain_add(acc, chain_boundary({s: coeff}, GF2), GF2)
        if acc == chain:
            return True
    return False


def test_homology_faithfulness_against_boundary_oracle():
    c = SimplicialComplex.from_closure([(0, 1, 2), (1, 2, 3), (0, 3), (1, 3)])
    t = annotate_complex(c, 1)
    rng = random.Random(8)
    cycles = []
    for _ in range(8):
        ch = {}
        for s in c.k_simplices(2):
            if rng.random() < 0.5:
                ch = chain_add(ch, chain_boundary({s: 1}, GF2), GF2)
        for bc in t.basis_cycles:
            if rng.random() < 0.5:
                ch = chain_add(ch, bc, GF2)
        cycles.append(ch)
    for za, zb in itertools.combinations(cycles, 2):
        diff = chain_add(za, zb, GF2, coeff=1)
        same_class = np.array_equal(t.annotate(za), t.annotate(zb))
        assert same_class == is_boundary_bruteforce(c, diff)


def test_rank_soundness_annotations_span():
    t = annotate_complex(TWO, 1)
    cycles = [t.basis_cycles[0], chain_add(t.basis_cycles[0], t.basis_cycles[1], GF2)]
    m = annotate_batch(t, cycles)
    assert rank(m) == 2


def test_partner_points_share_one_table():
    f = fig2_top()
    z = unfold(f.poset, FIG_TOUR)
    zf = unfold_filtration(f, z)
    ctx = ZigzagHomology(zf, 1, GF2)
    assert ctx.table_at(1) is ctx.table_at(3)


def test_odd_characteristic_table():
    f7 = FieldSpec(7)
    t = annotate_complex(HOLLOW, 1, f7)
    assert t.g == 1
    cyc = t.basis_cycles[0]
    doubled = {s: (2 * c) % 7 for s, c in cyc.items()}
    assert t.annotate(doubled).tolist() == [2]
    assert not t.annotate(chain_boundary({(0, 1, 2): 1}, f7) if (0, 1, 2) in HOLLOW else {}).any()


def test_degree_zero_components():
    c = SimplicialComplex([(0,), (1,), (2,), (0, 1)])
    t = annotate_complex(c, 0)
    assert t.g == 2  # two connected components
    # vertices in the same component share a class
    assert np.array_equal(t.annotate({(0,): 1}), t.annotate({(1,): 1}))
    assert not np.array_equal(t.annotate({(0,): 1}), t.annotate({(2,): 1}))
