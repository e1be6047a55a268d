import random

import pytest

from conftest import brute_colored_iso
from prooflab.errors import UsageError
from prooflab.wl import ColoredGraph, parse_colored_graph, wl_distinguishes, wl_sweep


def graph(n, edges, colors=None):
    sym = set()
    for (u, v) in edges:
        sym.add((u, v))
        sym.add((v, u))
    return ColoredGraph(n, colors, {"E": frozenset(sym)})


TRIANGLES = graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
C6 = graph(6, [(i, (i + 1) % 6) for i in range(6)])


def test_identical_graphs_never_distinguished():
    for dim in (1, 2, 3):
        assert not wl_distinguishes(TRIANGLES, TRIANGLES, dim)


def test_triangles_vs_c6_split_at_dim2():
    assert not wl_distinguishes(TRIANGLES, C6, 1)
    assert wl_distinguishes(TRIANGLES, C6, 2)
    assert wl_sweep(TRIANGLES, C6, 3) == 2


def test_sweep_absent_for_identical():
    assert wl_sweep(C6, C6, 3) is None


def test_dim_validation():
    with pytest.raises(UsageError):
        wl_distinguishes(C6, C6, 0)
    with pytest.raises(UsageError):
        wl_sweep(C6, C6, 0)


def test_size_mismatch_short_circuits():
    assert wl_distinguishes(graph(2, [(0, 1)]), graph(3, [(0, 1)]), 1)


def test_degree_profiles_split_at_dim1():
    star = graph(4, [(0, 1), (0, 2), (0, 3)])
    path = graph(4, [(0, 1), (1, 2), (2, 3)])
    assert wl_distinguishes(star, path, 1)


def test_colors_enter_the_refinement():
    a = graph(2, [(0, 1)], [0, 0])
    b = graph(2, [(0, 1)], [0, 1])
    assert wl_distinguishes(a, b, 1)


def test_relation_names_matter():
    a = ColoredGraph(2, None, {"E": {(0, 1), (1, 0)}})
    b = ColoredGraph(2, None, {"F": {(0, 1), (1, 0)}})
    assert wl_distinguishes(a, b, 1)


def test_monotone_in_dimension():
    rng = random.Random(51)
    for _ in range(20):
        n = rng.randint(2, 6)
        a = graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4])
        b = graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4])
        if wl_distinguishes(a, b, 1):
            assert wl_distinguishes(a, b, 2)
        if wl_distinguishes(a, b, 2):
            assert wl_distinguishes(a, b, 3)


def test_never_distinguishes_isomorphic_graphs():
    rng = random.Random(52)
    for _ in range(25):
        n = rng.randint(2, 7)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
        perm = list(range(n))
        rng.shuffle(perm)
        a = graph(n, edges)
        b = graph(n, [(perm[u], perm[v]) for (u, v) in edges])
        assert brute_colored_iso(a, b)
        for dim in (1, 2):
            assert not wl_distinguishes(a, b, dim)


def test_stable_under_relabeling_and_relation_reordering():
    a = ColoredGraph(3, (0, 0, 1), {"E": {(0, 1), (1, 0)}, "F": {(1, 2)}})
    b = ColoredGraph(3, (0, 1, 0), {"F": {(2, 1)}, "E": {(0, 2), (2, 0)}})
    # b is a relabeling (swap 1 and 2) with relations listed in another order
    for dim in (1, 2):
        assert not wl_distinguishes(a, b, dim)


def test_parse_colored_graph_text():
    g = parse_colored_graph("3 2\n0 1\n1 2\ncolors 0 1 0\n")
    assert g.n == 3
    assert g.colors == (0, 1, 0)
    assert (0, 1) in g.relations["E"] and (1, 0) in g.relations["E"]
