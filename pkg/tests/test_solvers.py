# tests/test_solvers.py

import itertools
import math

import numpy as np
import pytest

from hypercut import settings
from hypercut.cuts import CutFunction, total_cut
from hypercut.errors import InfeasibleInputError, InstanceTooLargeError
from hypercut.hypergraph import (
    Hypergraph,
    NodePartition,
    generate_random_uniform,
    is_balanced,
    random_walk_transitions,
)
from hypercut.pbo import (
    BinaryPolynomial,
    EncodingSpec,
    build_energy,
    build_two_way_balance,
    evaluate,
    evaluate_all,
)
from hypercut.schema import CutKind, SolverName
from hypercut.solvers import (
    QAOAParams,
    SAParams,
    decode_assignment,
    decode_one_hot,
    exact_balanced,
    exact_min_poly,
    exact_oracle_result,
    qaoa_probabilities,
    qaoa_statevector,
    select_best_balanced,
    simulated_annealing,
    solve_instance,
)


@pytest.fixture
def two_triples():
    return Hypergraph(n=4, edges=((0, 1, 2), (1, 2, 3)))


# --- exhaustive search ---------------------------------------------


def test_exact_balanced_examples(two_triples):
    aon = CutFunction(CutKind.AON)
    value, partition = exact_balanced(two_triples, aon, 2)
    assert value == 2
    assert partition.labels == (0, 0, 1, 1)

    value, _ = exact_balanced(Hypergraph(n=2, edges=((0, 1),)), aon, 2)
    assert value == 1

    value, partition = exact_balanced(Hypergraph(n=3, edges=((0, 1, 2),)), aon, 3)
    assert value == 1
    assert partition.sizes == (1, 1, 1)


def test_exact_balanced_is_canonical_and_matches_brute_force():
    h = generate_random_uniform(7, 3, 3.0, seed=4)
    f = CutFunction(CutKind.KMINUS1)
    value, partition = exact_balanced(h, f, 3)
    assert partition.labels[0] == 0
    assert is_balanced(partition)
    brute = min(
        total_cut(h, NodePartition(labels, 3), f)
        for labels in itertools.product(range(3), repeat=7)
        if is_balanced(NodePartition(labels, 3))
    )
    assert value == pytest.approx(brute)


def test_exact_balanced_errors(two_triples):
    with pytest.raises(InfeasibleInputError):
        exact_balanced(Hypergraph(n=2, edges=((0, 1),)), CutFunction(CutKind.AON), 3)
    big = Hypergraph(n=25, edges=((0, 1),))
    with pytest.raises(InstanceTooLargeError):
        exact_balanced(big, CutFunction(CutKind.AON), 2)


def test_exact_balanced_hrwc():
    h = generate_random_uniform(6, 3, 3.0, seed=2)
    f = CutFunction(CutKind.HRWC, random_walk_transitions(h))
    value, partition = exact_balanced(h, f, 2)
    assert value == pytest.approx(total_cut(h, partition, f))


@pytest.mark.parametrize("kind", [CutKind.LINEAR, CutKind.NCUT2, CutKind.NCUT_MULTI])
def test_exact_oracle_result_handles_unencodable_kinds(kind):
    h = generate_random_uniform(8, 3, 5.0, seed=6)
    f = CutFunction(kind)
    result = exact_oracle_result(h, f, 2)
    optimum, partition = exact_balanced(h, f, 2)
    assert result.energy is None
    assert result.feasible
    assert result.assignment == partition.labels
    assert result.cut_value == pytest.approx(optimum)
    assert result.metadata["solver"] == SolverName.EXACT


def test_exact_min_poly_examples(two_triples):
    value, argmins = exact_min_poly(BinaryPolynomial.monomial(1, [0]))
    assert value == 0
    assert argmins == [(0,)]

    balance = build_energy(two_triples, EncodingSpec(k=2, lam=1.0))
    value, argmins = exact_min_poly(balance)
    assert value == pytest.approx(2)
    # the balanced optimum is among the minimizers
    assert (0, 0, 1, 1) in argmins


def test_exact_min_poly_balance_argmins():
    value, argmins = exact_min_poly(build_two_way_balance(4))
    assert value == pytest.approx(0)
    assert len(argmins) == 6
    assert all(sum(x) == 2 for x in argmins)


def test_exact_min_poly_guard():
    with pytest.raises(InstanceTooLargeError):
        exact_min_poly(BinaryPolynomial.zero(settings.EXACT_MAX_VARS + 1))


@pytest.mark.parametrize("n", [6, 8, 10, 12])
def test_large_lambda_argmins_are_balanced_optima(n):
    h = generate_random_uniform(n, 3, 5.0, seed=n)
    lam = h.total_weight + 1.0
    value, argmins = exact_min_poly(build_energy(h, EncodingSpec(k=2, lam=lam)))
    optimum, _ = exact_balanced(h, CutFunction(CutKind.AON), 2)
    for x in argmins:
        p = NodePartition(x, 2)
        assert is_balanced(p)
        assert total_cut(h, p, CutFunction(CutKind.AON)) == pytest.approx(optimum)


# --- decoding ------------------------------------------------------


def test_decode_one_hot():
    assert decode_one_hot((1, 0, 0, 1), 2, 2).labels == (0, 1)
    assert decode_one_hot((1, 1, 0, 1), 2, 2) is None
    assert decode_one_hot((0, 0, 1, 0), 2, 2) is None


def test_decode_assignment_ignores_auxiliaries():
    spec = EncodingSpec(k=2)
    assert decode_assignment((1, 0, 1, 1, 1), 3, spec).labels == (1, 0, 1)
    multi = EncodingSpec(k=3, cut=CutKind.KMINUS1)
    assert decode_assignment((0, 0, 1, 1, 0, 0, 1), 2, multi).labels == (2, 0)


# --- simulated annealing -------------------------------------------


def test_sa_constant_polynomial():
    results = simulated_annealing(BinaryPolynomial.constant(3, 2.5), SAParams(reads=4, sweeps=5))
    assert len(results) == 4
    assert all(r.energy == 2.5 for r in results)


def test_sa_single_variable_settles_at_zero():
    results = simulated_annealing(BinaryPolynomial.monomial(1, [0]), SAParams(seed=9))
    assert len(results) == settings.SA_NUM_READS
    assert all(r.assignment == (0,) for r in results)


def test_sa_is_deterministic_for_fixed_seed():
    h = generate_random_uniform(9, 3, 5.0, seed=1)
    poly = build_energy(h, EncodingSpec(k=2, lam=3.0))
    params = SAParams(reads=10, sweeps=100, seed=123)
    first = [r.assignment for r in simulated_annealing(poly, params)]
    second = [r.assignment for r in simulated_annealing(poly, params)]
    assert first == second


def test_sa_adjacent_seeds_share_no_read_streams():
    reads = 100
    first = SAParams(reads=reads, seed=100)
    second = SAParams(reads=reads, seed=101)
    draws_a = {tuple(first.read_rng(r).random(4)) for r in range(reads)}
    draws_b = {tuple(second.read_rng(r).random(4)) for r in range(reads)}
    assert len(draws_a) == reads
    assert draws_a.isdisjoint(draws_b)


def test_sa_reads_record_seed_and_read_index():
    results = simulated_annealing(
        BinaryPolynomial.monomial(2, [0, 1]), SAParams(reads=3, sweeps=5, seed=7)
    )
    assert [r.metadata["seed"] for r in results] == [7, 7, 7]
    assert [r.metadata["read"] for r in results] == [0, 1, 2]


def test_sa_energy_matches_polynomial():
    h = generate_random_uniform(8, 3, 5.0, seed=2)
    poly = build_energy(h, EncodingSpec(k=3, lam=1.0, cut=CutKind.KMINUS1))
    for r in simulated_annealing(poly, SAParams(reads=5, sweeps=50, seed=0)):
        assert r.energy == pytest.approx(evaluate(poly, r.assignment))


def test_sa_finds_balanced_optimum_with_large_lambda():
    hits = 0
    for seed in range(10):
        h = generate_random_uniform(10, 3, 5.0, seed=seed)
        spec = EncodingSpec(k=2, lam=3.0)
        result = solve_instance(
            h, CutFunction(CutKind.AON), spec, SolverName.SA, sa_params=SAParams(reads=50, seed=seed)
        )
        optimum, _ = exact_balanced(h, CutFunction(CutKind.AON), 2)
        hits += result.feasible and result.cut_value == pytest.approx(optimum)
    assert hits >= 9


def test_sa_params_validation():
    with pytest.raises(ValueError):
        SAParams(reads=0)
    with pytest.raises(ValueError):
        SAParams(beta_min=5.0, beta_max=1.0)
    betas = SAParams(sweeps=3, beta_min=0.1, beta_max=10.0).betas()
    assert betas == pytest.approx([0.1, 1.0, 10.0])


# --- QAOA ----------------------------------------------------------


def test_qaoa_identity_angles_give_uniform_distribution():
    poly = BinaryPolynomial(3, {(0,): 1.0, (1, 2): -2.0, (0, 1, 2): 4.0})
    diag = evaluate_all(poly)
    probs = qaoa_probabilities(diag, [0.0], [0.0])
    assert probs == pytest.approx(np.full(8, 1 / 8))
    assert float(probs @ diag) == pytest.approx(diag.mean())


def test_qaoa_probabilities_are_normalized():
    rng = np.random.default_rng(0)
    diag = rng.normal(size=32)
    for _ in range(5):
        gammas = rng.uniform(0, math.pi, size=2)
        betas = rng.uniform(0, math.pi, size=2)
        assert qaoa_probabilities(diag, gammas, betas).sum() == pytest.approx(1.0, abs=1e-9)


def test_mixer_sign_only_mirrors_the_phase_angle():
    rng = np.random.default_rng(1)
    diag = rng.normal(size=16)
    gammas, betas = [0.7, 1.3], [0.4, 2.1]
    minus = qaoa_probabilities(diag, gammas, betas, mixer_sign=-1)
    plus = qaoa_probabilities(diag, [-g for g in gammas], betas, mixer_sign=1)
    assert minus == pytest.approx(plus, abs=1e-12)


def test_qaoa_distribution_is_complement_symmetric():
    h = generate_random_uniform(6, 3, 5.0, seed=3)
    diag = evaluate_all(build_energy(h, EncodingSpec(k=2, lam=1.0)))
    probs = qaoa_probabilities(diag, [0.37], [1.1])
    full = (1 << 6) - 1
    for idx in range(1 << 6):
        assert probs[idx] == pytest.approx(probs[full ^ idx], abs=1e-12)


def test_qaoa_grid_reaches_uncut_states():
    poly = BinaryPolynomial(2, {(0,): 1.0, (1,): 1.0, (0, 1): -2.0})
    diag = evaluate_all(poly)
    grid = np.arange(0.0, math.pi, 0.01)
    best = max(
        qaoa_probabilities(diag, [g], [b])[[0, 3]].sum() for g in grid[::10] for b in grid[::10]
    )
    assert best > 0.5


def test_qaoa_optimizer_concentrates_on_uncut_states():
    poly = BinaryPolynomial(2, {(0,): 1.0, (1,): 1.0, (0, 1): -2.0})
    dist = qaoa_statevector(poly, QAOAParams(seed=0))
    assert dist.probabilities[0] + dist.probabilities[3] > 0.5
    assert dist.probabilities.sum() == pytest.approx(1.0)
    assert len(dist.gammas) == len(dist.betas) == 1


def test_qaoa_is_deterministic():
    poly = BinaryPolynomial(3, {(0,): 1.0, (1, 2): -1.0, (0, 2): 0.5})
    params = QAOAParams(depth=2, restarts=2, max_iter=50, seed=5)
    a = qaoa_statevector(poly, params)
    b = qaoa_statevector(poly, params)
    assert np.array_equal(a.probabilities, b.probabilities)


def test_qaoa_cap():
    with pytest.raises(InstanceTooLargeError):
        qaoa_statevector(BinaryPolynomial.zero(5), QAOAParams(max_qubits=4))


# --- balanced selection --------------------------------------------


@pytest.fixture
def square():
    return Hypergraph(n=4, edges=((0, 1), (2, 3), (0, 2)))


def test_select_prefers_smaller_cut(square):
    f = CutFunction(CutKind.AON)
    poly = build_energy(square, EncodingSpec(k=2))
    dist = np.zeros(16)
    dist[10] = 0.5  # x = (0, 1, 0, 1): cut 2
    dist[12] = 0.3  # x = (0, 0, 1, 1): cut 1
    dist[0] = 0.2  # imbalanced
    result = select_best_balanced(dist, square, f, 2, 10, poly=poly)
    assert result.feasible
    assert result.assignment == (0, 0, 1, 1)
    assert result.cut_value == 1
    assert result.energy == pytest.approx(evaluate(poly, (0, 0, 1, 1)))


def test_select_flags_infeasible_when_top_states_are_imbalanced(square):
    f = CutFunction(CutKind.AON)
    poly = build_energy(square, EncodingSpec(k=2))
    dist = np.zeros(16)
    dist[0] = 0.6
    dist[15] = 0.4
    result = select_best_balanced(dist, square, f, 2, 2, poly=poly)
    assert not result.feasible
    assert result.assignment == (0, 0, 0, 0)


def test_select_single_peak(square):
    f = CutFunction(CutKind.AON)
    poly = build_energy(square, EncodingSpec(k=2))
    dist = np.zeros(16)
    dist[12] = 1.0
    result = select_best_balanced(dist, square, f, 2, 10, poly=poly)
    assert result.feasible
    assert result.decoded.labels == (0, 0, 1, 1)


# --- solve_instance ------------------------------------------------


def test_solve_instance_exact(two_triples):
    result = solve_instance(
        two_triples, CutFunction(CutKind.AON), EncodingSpec(k=2, lam=1.0), SolverName.EXACT
    )
    assert result.feasible
    assert result.cut_value == 2
    assert result.energy == pytest.approx(2)
    payload = result.to_dict()
    assert payload["labels"] == [0, 0, 1, 1]
    assert payload["metadata"]["solver"] == "exact"


def test_solve_instance_multi_way_sa():
    h = generate_random_uniform(6, 3, 3.0, seed=8)
    spec = EncodingSpec(k=3, lam=1.0, cut=CutKind.KMINUS1)
    result = solve_instance(
        h, CutFunction(CutKind.KMINUS1), spec, SolverName.SA, sa_params=SAParams(reads=10, seed=1)
    )
    assert len(result.assignment) == 18
    assert result.energy == pytest.approx(evaluate(build_energy(h, spec), result.assignment))
    assert result.feasible == (result.decoded is not None and is_balanced(result.decoded))


def test_solve_instance_unknown_solver(two_triples):
    with pytest.raises(ValueError):
        solve_instance(two_triples, CutFunction(CutKind.AON), EncodingSpec(), "gurobi")
