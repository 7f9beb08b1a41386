# tests/test_cuts.py

import itertools

import numpy as np
import pytest

from hypercut.cuts import (
    CutFunction,
    balance_violation,
    batch_total_cut,
    edge_cut_value,
    total_cut,
)
from hypercut.errors import InfeasibleInputError
from hypercut.hypergraph import (
    Hypergraph,
    NodePartition,
    generate_random_uniform,
    induced_edge_partition,
)
from hypercut.schema import CutKind


@pytest.fixture
def two_triples():
    return Hypergraph(n=4, edges=((0, 1, 2), (1, 2, 3)))


def test_aon_edge_values():
    f = CutFunction(CutKind.AON)
    assert edge_cut_value(f, [frozenset({0, 1, 2})]) == 0
    assert edge_cut_value(f, [frozenset({0}), frozenset({1, 2})]) == 1


def test_two_way_edge_values():
    parts = [frozenset({0}), frozenset({1, 2})]
    assert edge_cut_value(CutFunction(CutKind.QUADRATIC), parts) == 2
    five = [frozenset({0, 1}), frozenset({2, 3, 4})]
    assert edge_cut_value(CutFunction(CutKind.LINEAR), five) == 2


def test_multi_way_edge_values():
    shattered = [frozenset({0}), frozenset({1}), frozenset({2})]
    assert edge_cut_value(CutFunction(CutKind.KMINUS1), shattered) == 2
    assert edge_cut_value(CutFunction(CutKind.AON), shattered) == 1
    split = [frozenset({0, 1}), frozenset({2})]
    assert edge_cut_value(CutFunction(CutKind.QUADRATIC_MULTI), split) == pytest.approx(4 / 3)


def test_ncut2_single_edge():
    h = Hypergraph(n=3, edges=((0, 1, 2),))
    p = NodePartition(labels=(0, 1, 1), k=2)
    f = CutFunction(CutKind.NCUT2)
    value = edge_cut_value(f, [frozenset({0}), frozenset({1, 2})], h, p)
    assert value == pytest.approx(1.0)
    assert total_cut(h, p, f) == pytest.approx(1.0)


def test_ncut_zero_volume_part_is_infeasible():
    h = Hypergraph(n=3, edges=((0, 1),))
    p = NodePartition(labels=(0, 0, 1), k=2)  # part 1 holds only the isolated vertex
    with pytest.raises(InfeasibleInputError):
        total_cut(h, p, CutFunction(CutKind.NCUT2))
    with pytest.raises(InfeasibleInputError):
        total_cut(h, p, CutFunction(CutKind.NCUT_MULTI))


def test_total_cut_examples(two_triples):
    aon = CutFunction(CutKind.AON)
    assert total_cut(two_triples, NodePartition((0, 0, 1, 1), 2), aon) == 2
    assert total_cut(two_triples, NodePartition((0, 0, 0, 0), 2), aon) == 0


def test_total_cut_uses_weights():
    h = Hypergraph(n=3, edges=((0, 1), (1, 2)), weights=(2.5, 1.0))
    p = NodePartition((0, 1, 1), 2)
    assert total_cut(h, p, CutFunction(CutKind.AON)) == pytest.approx(2.5)


def test_hrwc_two_nodes():
    p_matrix = np.array([[0.0, 0.5], [0.5, 0.0]])
    h = Hypergraph(n=2, edges=((0, 1),))
    f = CutFunction(CutKind.HRWC, p_matrix)
    assert total_cut(h, NodePartition((0, 1), 2), f) == pytest.approx(0.5)
    with pytest.raises(InfeasibleInputError):
        total_cut(h, NodePartition((0, 0), 2), f)
    with pytest.raises(InfeasibleInputError):
        edge_cut_value(f, [frozenset({0}), frozenset({1})])


def test_cut_function_validation():
    with pytest.raises(ValueError):
        CutFunction("nonsense")
    with pytest.raises(ValueError):
        CutFunction(CutKind.HRWC)
    with pytest.raises(InfeasibleInputError):
        CutFunction(CutKind.HRWC, np.array([[0.0, -0.1], [0.1, 0.0]]))
    with pytest.raises(ValueError):
        CutFunction(CutKind.AON, np.zeros((2, 2)))


def test_two_way_kinds_refuse_k3(two_triples):
    with pytest.raises(ValueError):
        total_cut(two_triples, NodePartition((0, 1, 2, 0), 3), CutFunction(CutKind.LINEAR))


@pytest.mark.parametrize(
    "labels, k, expected",
    [((0, 0, 1, 1), 2, 0), ((0, 0, 0, 1), 2, 2), ((0, 0, 1, 1, 2), 3, 1)],
)
def test_balance_violation(labels, k, expected):
    assert balance_violation(NodePartition(labels, k)) == expected


@pytest.mark.parametrize(
    "kind, k",
    [
        (CutKind.AON, 2),
        (CutKind.QUADRATIC, 2),
        (CutKind.LINEAR, 2),
        (CutKind.NCUT2, 2),
        (CutKind.AON, 3),
        (CutKind.KMINUS1, 3),
        (CutKind.QUADRATIC_MULTI, 3),
        (CutKind.NCUT_MULTI, 3),
    ],
)
def test_batch_total_cut_matches_scalar(kind, k):
    h = generate_random_uniform(6, 3, 4.0, seed=5)
    f = CutFunction(kind)
    labels = np.array(list(itertools.product(range(k), repeat=h.n)))
    batch = batch_total_cut(h, labels, f, k)
    for row, value in zip(labels, batch):
        try:
            expected = total_cut(h, NodePartition(tuple(row), k), f)
        except InfeasibleInputError:
            assert value == np.inf
            continue
        assert value == pytest.approx(expected, abs=1e-9)


def test_batch_total_cut_hrwc_matches_scalar():
    rng = np.random.default_rng(0)
    p_matrix = rng.random((5, 5))
    h = Hypergraph(n=5, edges=((0, 1, 2), (2, 3, 4)))
    f = CutFunction(CutKind.HRWC, p_matrix)
    labels = np.array(list(itertools.product(range(2), repeat=5)))
    batch = batch_total_cut(h, labels, f, 2)
    for row, value in zip(labels, batch):
        p = NodePartition(tuple(row), 2)
        if min(p.sizes) == 0:
            assert value == np.inf
        else:
            assert value == pytest.approx(total_cut(h, p, f), abs=1e-9)


def _random_partition(seed, n, k):
    rng = np.random.default_rng(seed)
    return NodePartition(labels=tuple(int(c) for c in rng.integers(0, k, size=n)), k=k)


@pytest.mark.parametrize("seed", range(20))
def test_aon_kminus1_quadratic_ordering(seed):
    h = generate_random_uniform(9, 4, 4.0, seed=seed)
    aon = CutFunction(CutKind.AON)
    kminus1 = CutFunction(CutKind.KMINUS1)
    quadratic = CutFunction(CutKind.QUADRATIC)
    quadratic_multi = CutFunction(CutKind.QUADRATIC_MULTI)

    two_way = _random_partition(seed, h.n, 2)
    multi = _random_partition(seed + 1000, h.n, 3)
    for e in range(h.m):
        parts = induced_edge_partition(h, two_way, e)
        assert edge_cut_value(aon, parts) <= edge_cut_value(kminus1, parts)
        assert edge_cut_value(kminus1, parts) <= edge_cut_value(quadratic, parts)

        parts = induced_edge_partition(h, multi, e)
        assert edge_cut_value(aon, parts) <= edge_cut_value(kminus1, parts)
        assert edge_cut_value(kminus1, parts) <= edge_cut_value(quadratic_multi, parts) + 1e-12


@pytest.mark.parametrize("kind", [CutKind.QUADRATIC, CutKind.LINEAR])
@pytest.mark.parametrize("seed", range(10))
def test_two_way_cuts_are_symmetric_under_part_swap(kind, seed):
    h = generate_random_uniform(8, 3, 5.0, seed=seed)
    f = CutFunction(kind)
    p = _random_partition(seed, h.n, 2)
    swapped = NodePartition(labels=tuple(1 - c for c in p.labels), k=2)
    assert total_cut(h, p, f) == total_cut(h, swapped, f)
    for e in range(h.m):
        parts = induced_edge_partition(h, p, e)
        assert edge_cut_value(f, parts) == edge_cut_value(f, parts[::-1])


@pytest.mark.parametrize(
    "kind, k",
    [
        (CutKind.AON, 2),
        (CutKind.QUADRATIC, 2),
        (CutKind.LINEAR, 2),
        (CutKind.KMINUS1, 3),
        (CutKind.QUADRATIC_MULTI, 3),
    ],
)
def test_total_cut_doubles_with_weights(kind, k):
    f = CutFunction(kind)
    for seed in range(10):
        h = generate_random_uniform(8, 3, 5.0, seed=seed)
        rng = np.random.default_rng(seed)
        weights = tuple(float(w) for w in rng.uniform(0.5, 3.0, size=h.m))
        single = Hypergraph(n=h.n, edges=h.edges, weights=weights)
        double = Hypergraph(n=h.n, edges=h.edges, weights=tuple(2 * w for w in weights))
        p = _random_partition(seed, h.n, k)
        assert total_cut(double, p, f) == pytest.approx(2 * total_cut(single, p, f))
