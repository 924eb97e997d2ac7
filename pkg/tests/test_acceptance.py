"""Acceptance suite: one criterion per test, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.  The randomized criteria share one instance pool so the
invariant checks (pointwise bases, bound sandwich, section validity) run on
exactly the decompositions produced by the equivalence runs.
"""

import random
import time
from functools import lru_cache

import pytest

from posetrank.filtration import size_stats, unfold_filtration
from posetrank.genrank import (
    convert,
    convertibility,
    generalized_rank,
    genrank_dcomplex,
    genrank_graph,
    is_complement_invertible,
    kappa,
    verify_sections,
)
from posetrank.oracle import limit_to_colimit_rank, module_from_filtration
from posetrank.poset import partners, unfold
from posetrank.randgen import (
    perf_graph_filtration,
    random_connected_poset,
    random_filtration,
    random_graph_filtration,
    random_tour,
)
from posetrank.zigzag import decompose

from fixtures import FIG_TOUR, conversion_fixture, fig2_bottom, fig2_top

N_RANDOM = 1000
N_FASTPATH = 300
N_POSETS = 500
N_TOURS = 100


def report(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


@lru_cache(maxsize=1)
def criterion3_pool():
    """1000 randomized instances: results, oracle values, and bound data."""
    rng = random.Random(20240817)
    pool = []
    for _ in range(N_RANDOM):
        poset = random_connected_poset(rng, max_points=8, max_edges=10)
        degree = rng.choice([0, 1, 1, 2])
        f = random_filtration(rng, poset, degree, max_simplices=25)
        res = generalized_rank(f, compute_bounds=True)
        ref = limit_to_colimit_rank(module_from_filtration(f))
        pool.append((f, res, ref))
    return pool


@lru_cache(maxsize=1)
def criterion4_pools():
    rng = random.Random(90125)
    graphs = []
    for _ in range(N_FASTPATH):
        poset = random_connected_poset(rng, max_points=8, max_edges=10)
        f = random_graph_filtration(rng, poset)
        graphs.append((f, generalized_rank(f)))
    dcomplexes = []
    for _ in range(N_FASTPATH):
        poset = random_connected_poset(rng, max_points=8, max_edges=10)
        f = random_filtration(rng, poset, 2, max_simplices=25, max_dim=2)
        dcomplexes.append((f, generalized_rank(f, 2)))
    return graphs, dcomplexes


def fixture_results():
    return [
        generalized_rank(fig2_top(), 1, tour=FIG_TOUR),
        generalized_rank(fig2_bottom(), 1, tour=FIG_TOUR),
        generalized_rank(conversion_fixture()),
    ]


def test_criterion_1_figure2_reproduction():
    t0 = time.perf_counter()
    top = generalized_rank(fig2_top(), 1, tour=FIG_TOUR)
    t_top = time.perf_counter() - t0
    t0 = time.perf_counter()
    bottom = generalized_rank(fig2_bottom(), 1, tour=FIG_TOUR)
    t_bot = time.perf_counter() - t0
    oracle_top = limit_to_colimit_rank(module_from_filtration(fig2_top()))
    oracle_bottom = limit_to_colimit_rank(module_from_filtration(fig2_bottom()))
    ok = (
        top.rank == 1 == oracle_top
        and bottom.rank == 0 == oracle_bottom
        and t_top < 1.0
        and t_bot < 1.0
    )
    report(
        "criterion 1: figure-2 fixtures give ranks 1 and 0",
        ok,
        f"top={top.rank} bottom={bottom.rank} in {t_top:.3f}s/{t_bot:.3f}s",
    )


def test_criterion_2_figure4_reproduction():
    t0 = time.perf_counter()
    res = generalized_rank(conversion_fixture())
    elapsed = time.perf_counter() - t0
    oracle = limit_to_colimit_rank(module_from_filtration(conversion_fixture()))
    conversions = [a for a in res.audit if a["complete"] and a["nonzero_alpha"] > 0]
    ok = res.rank == 1 == oracle and len(conversions) == 1 and elapsed < 1.0
    report(
        "criterion 2: conversion fixture needs one nonzero-alpha conversion, rank 1",
        ok,
        f"rank={res.rank} conversions={len(conversions)} in {elapsed:.3f}s",
    )


def test_criterion_3_oracle_equivalence():
    t0 = time.perf_counter()
    pool = criterion3_pool()
    elapsed = time.perf_counter() - t0
    disagreements = sum(1 for _, res, ref in pool if res.rank != ref)
    ok = len(pool) >= 1000 and disagreements == 0 and elapsed < 300.0
    report(
        "criterion 3: generalized rank equals limit-to-colimit rank",
        ok,
        f"{len(pool)} instances, {disagreements} disagreements, {elapsed:.1f}s",
    )


def test_criterion_4_fast_path_equivalence():
    graphs, dcomplexes = criterion4_pools()
    bad = 0
    for f, res in graphs:
        if not (genrank_graph(f) == genrank_dcomplex(f, 1) == res.rank):
            bad += 1
    for f, res in dcomplexes:
        if genrank_dcomplex(f, 2) != res.rank:
            bad += 1
    ok = bad == 0 and len(graphs) >= 300 and len(dcomplexes) >= 300
    report(
        "criterion 4: fast paths agree with the general path",
        ok,
        f"{len(graphs)} graph + {len(dcomplexes)} 2-complex instances, {bad} disagreements",
    )


def test_criterion_5_unfolding_bound_and_surjectivity():
    rng = random.Random(555000)
    bad = 0
    for _ in range(N_POSETS):
        poset = random_connected_poset(rng, max_points=8, max_edges=10)
        z = unfold(poset)
        try:
            z.check()
        except Exception:
            bad += 1
            continue
        if len(z) > 2 * (len(poset.points) + len(poset.edges)) + 1:
            bad += 1
        if set(z.fold) != set(poset.points):
            bad += 1
        if {z.step_edge(i) for i in range(z.m)} != set(poset.edges):
            bad += 1
    report(
        "criterion 5: unfolding length bound and fold surjectivity",
        bad == 0,
        f"{N_POSETS} posets, {bad} violations",
    )


def test_criterion_6_decomposition_invariants():
    graphs, dcomplexes = criterion4_pools()
    decomps = [res.decomposition for _, res, _ in criterion3_pool()]
    decomps += [res.decomposition for _, res in graphs]
    decomps += [res.decomposition for _, res in dcomplexes]
    decomps += [r.decomposition for r in fixture_results()]
    bad = sum(1 for d in decomps if d.validate() is not None)
    report(
        "criterion 6: pointwise basis property on every decomposition",
        bad == 0,
        f"{len(decomps)} decompositions, {bad} violations",
    )


def test_criterion_7_bound_sandwich_and_increments():
    bad_sandwich = 0
    for _, res, _ in criterion3_pool():
        k0, t0 = res.bounds
        if not (k0 <= res.rank <= t0):
            bad_sandwich += 1
    # replay the driver on a sample, recomputing kappa around each conversion
    rng = random.Random(777)
    sample = random.Random(31).sample(range(len(criterion3_pool())), 60)
    bad_steps = 0
    steps_seen = 0
    for idx in sample:
        f, _, _ = criterion3_pool()[idx]
        z = unfold(f.poset)
        zf = unfold_filtration(f, z)
        d = decompose(zf, f.degree)
        ps = partners(z)
        for iv in list(d.full_intervals()):
            w = convertibility(iv, d, ps)
            if w is None:
                continue
            before = kappa(d, ps)
            d2 = convert(d, iv, w)
            converted = next(c for c in d2.intervals if c.serial == iv.serial)
            if is_complement_invertible(converted, d2):
                steps_seen += 1
                if kappa(d2, ps) != before + 1 and w.nonzero_count() > 0:
                    bad_steps += 1
                d = d2
    ok = bad_sandwich == 0 and bad_steps == 0
    report(
        "criterion 7: kappa <= rank <= tau, conversions increment kappa by 1",
        ok,
        f"{len(criterion3_pool())} sandwiches, {steps_seen} conversion steps checked",
    )


def test_criterion_8_emitted_sections_are_genuine():
    graphs, dcomplexes = criterion4_pools()
    results = [res for _, res, _ in criterion3_pool()]
    results += [res for _, res in graphs] + [res for _, res in dcomplexes]
    results += fixture_results()
    bad = 0
    for res in results:
        if len(res.complete_modules) != res.rank or not verify_sections(res):
            bad += 1
    report(
        "criterion 8: emitted complete modules are coherent and independent",
        bad == 0,
        f"{len(results)} results, {bad} violations",
    )


def test_criterion_9_tour_invariance():
    rng = random.Random(999888)
    bad = 0
    for _ in range(N_TOURS):
        poset = random_connected_poset(rng, max_points=8, max_edges=10)
        f = random_filtration(rng, poset, rng.choice([0, 1, 2]), max_simplices=25)
        base = generalized_rank(f).rank
        for _ in range(3):
            if generalized_rank(f, tour=random_tour(rng, poset)).rank != base:
                bad += 1
    report(
        "criterion 9: rank is invariant under the choice of tour",
        bad == 0,
        f"{N_TOURS} instances x 3 alternative tours, {bad} disagreements",
    )


def test_soft_check_graph_path_speedup():
    rng = random.Random(424242)
    f = perf_graph_filtration(rng)
    stats = size_stats(f)
    t0 = time.perf_counter()
    fast = genrank_graph(f)
    t_fast = time.perf_counter() - t0
    t0 = time.perf_counter()
    general = generalized_rank(f).rank
    t_general = time.perf_counter() - t0
    ratio = t_general / max(t_fast, 1e-9)
    ok = fast == general and stats.t >= 1900 and ratio >= 10.0
    report(
        "soft check: graph fast path is >= 10x faster at t ~ 2000",
        ok,
        f"t={stats.t} general={t_general:.2f}s fast={t_fast:.4f}s ratio={ratio:.0f}x",
    )
