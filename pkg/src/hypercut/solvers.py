"""
Solvers for the partitioning energies.

Key public pieces:
- exact_balanced / exact_min_poly: exhaustive baselines.
- simulated_annealing: single-flip Metropolis over any-degree polynomials.
- qaoa_statevector / qaoa_probabilities: depth-L QAOA on a dense statevector.
- select_best_balanced: best balanced state among the most probable ones.
- solve_instance: one solver on one hypergraph, shared by CLI and harness.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from . import settings
from ._kernels import anneal_reads
from .cuts import CutFunction, batch_total_cut, total_cut
from .errors import InfeasibleInputError, InstanceTooLargeError
from .hypergraph import Hypergraph, NodePartition, is_balanced
from .pbo import (
    BinaryPolynomial,
    EncodingSpec,
    assignment_from_index,
    build_energy,
    encode_partition,
    evaluate,
    evaluate_all,
)
from .schema import CutKind, SolverName

logger = logging.getLogger(__name__)


@dataclass
class SolveResult:
    """
    Outcome of one solver call.

    ``decoded`` is None when the assignment is not a valid partition
    encoding (one-hot violation); ``cut_value`` is None when the cut is
    undefined for the decoded partition; ``energy`` is None when no
    polynomial was built (oracle-only cut kinds).
    """

    assignment: Tuple[int, ...]
    decoded: Optional[NodePartition]
    energy: Optional[float]
    cut_value: Optional[float]
    feasible: bool
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "assignment": list(self.assignment),
            "labels": list(self.decoded.labels) if self.decoded is not None else None,
            "k": self.decoded.k if self.decoded is not None else None,
            "energy": self.energy,
            "cut_value": self.cut_value,
            "feasible": self.feasible,
            "metadata": self.metadata,
        }


@dataclass
class SAParams:
    reads: int = field(default_factory=lambda: settings.SA_NUM_READS)
    sweeps: int = field(default_factory=lambda: settings.SA_NUM_SWEEPS)
    beta_min: float = field(default_factory=lambda: settings.SA_BETA_MIN)
    beta_max: float = field(default_factory=lambda: settings.SA_BETA_MAX)
    seed: int = 0

    def __post_init__(self):
        if self.reads < 1:
            raise ValueError(f"reads must be at least 1, got {self.reads}")
        if self.sweeps < 1:
            raise ValueError(f"sweeps must be at least 1, got {self.sweeps}")
        if not 0 < self.beta_min < self.beta_max:
            raise ValueError(
                f"Need 0 < beta_min < beta_max, got {self.beta_min}, {self.beta_max}"
            )

    def betas(self) -> np.ndarray:
        """Geometric inverse-temperature schedule, one value per sweep."""
        if self.sweeps == 1:
            return np.array([self.beta_max])
        return np.geomspace(self.beta_min, self.beta_max, self.sweeps)

    def read_rng(self, read: int) -> np.random.Generator:
        """Random stream of one read, keyed on (seed, read)."""
        return np.random.default_rng([self.seed, read])


@dataclass
class QAOAParams:
    depth: int = field(default_factory=lambda: settings.QAOA_DEPTH)
    restarts: int = field(default_factory=lambda: settings.QAOA_RESTARTS)
    max_iter: int = field(default_factory=lambda: settings.QAOA_MAX_ITER)
    top_k: int = field(default_factory=lambda: settings.QAOA_TOP_K)
    seed: int = 0
    max_qubits: int = field(default_factory=lambda: settings.QAOA_MAX_QUBITS)

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"depth must be at least 1, got {self.depth}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be at least 1, got {self.restarts}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be at least 1, got {self.top_k}")


@dataclass
class QAOADistribution:
    probabilities: np.ndarray
    gammas: Tuple[float, ...]
    betas: Tuple[float, ...]
    expectation: float


# --- Decoding ----------------------------------------------------


def decode_one_hot(x: Sequence[int], n: int, k: int) -> Optional[NodePartition]:
    """Labels from one-hot blocks, or None unless every block has exactly one 1."""
    if len(x) != n * k:
        raise ValueError(f"Expected {n * k} one-hot bits, got {len(x)}")
    labels = []
    for i in range(n):
        block = x[i * k : (i + 1) * k]
        if sum(block) != 1:
            return None
        labels.append(list(block).index(1))
    return NodePartition(labels=tuple(labels), k=k)


def decode_assignment(
    x: Sequence[int], n: int, spec: EncodingSpec
) -> Optional[NodePartition]:
    """Decode the leading encoding variables; trailing auxiliaries are ignored."""
    if spec.two_way:
        return NodePartition(labels=tuple(int(b) for b in x[:n]), k=2)
    return decode_one_hot([int(b) for b in x[: n * spec.k]], n, spec.k)


@dataclass(frozen=True)
class PartitionProblem:
    """A hypergraph, its cut objective and the encoding used to solve it."""

    h: Hypergraph
    f: CutFunction
    spec: EncodingSpec

    def cut_of(self, partition: Optional[NodePartition]) -> Optional[float]:
        if partition is None:
            return None
        try:
            return total_cut(self.h, partition, self.f)
        except InfeasibleInputError:
            return None

    def make_result(
        self,
        x: Sequence[int],
        poly: BinaryPolynomial,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> SolveResult:
        x = tuple(int(b) for b in x)
        decoded = decode_assignment(x, self.h.n, self.spec)
        feasible = decoded is not None and is_balanced(decoded)
        return SolveResult(
            assignment=x,
            decoded=decoded,
            energy=evaluate(poly, x),
            cut_value=self.cut_of(decoded),
            feasible=feasible,
            metadata=dict(metadata or {}),
        )


# --- Exhaustive search -------------------------------------------


def _balanced_labelings(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """
    Canonical balanced labelings in lexicographic order.

    Canonical: node 0 is in part 0 and each new part gets the next unused
    label. Sizes are ``n // k`` or ``n // k + 1``, with exactly ``n % k``
    parts of the larger size.
    """
    small, extra = divmod(n, k)
    sizes = [0] * k
    labels = [0] * n
    state = {"big": 0}

    def deficit() -> int:
        return sum(max(0, small - s) for s in sizes)

    def place(i: int, opened: int) -> Iterator[Tuple[int, ...]]:
        if i == n:
            yield tuple(labels)
            return
        for c in range(min(opened + 1, k)):
            if sizes[c] == small + 1 or (sizes[c] == small and state["big"] == extra):
                continue
            grows_big = sizes[c] == small
            sizes[c] += 1
            state["big"] += grows_big
            if deficit() <= n - i - 1:
                labels[i] = c
                yield from place(i + 1, max(opened, c + 1))
            sizes[c] -= 1
            state["big"] -= grows_big

    yield from place(0, 0)


def exact_balanced(h: Hypergraph, f: CutFunction, k: int) -> Tuple[float, NodePartition]:
    """
    Minimum ``total_cut`` over all balanced k-way partitions.

    Ties go to the lexicographically smallest canonical label vector.

    Raises
    ------
    InstanceTooLargeError
        If ``n * log2(k)`` exceeds ``settings.EXACT_MAX_BITS``.
    InfeasibleInputError
        If no balanced partition exists (k > n) or none has a defined cut.
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if h.n * math.log2(k) > settings.EXACT_MAX_BITS:
        raise InstanceTooLargeError(
            f"Exhaustive search over {k}^{h.n} labelings exceeds the "
            f"2^{settings.EXACT_MAX_BITS} guard"
        )
    if k > h.n:
        raise InfeasibleInputError(f"No balanced {k}-way partition of {h.n} vertices")

    best_value = math.inf
    best_labels: Optional[Tuple[int, ...]] = None
    batch: List[Tuple[int, ...]] = []

    def flush() -> None:
        nonlocal best_value, best_labels
        values = batch_total_cut(h, np.array(batch), f, k)
        idx = int(np.argmin(values))
        if values[idx] < best_value - settings.OPTIMALITY_TOLERANCE:
            best_value = float(values[idx])
            best_labels = batch[idx]
        batch.clear()

    for labels in _balanced_labelings(h.n, k):
        batch.append(labels)
        if len(batch) >= settings.EXACT_BATCH_SIZE:
            flush()
    if batch:
        flush()

    if best_labels is None or not math.isfinite(best_value):
        raise InfeasibleInputError("No balanced partition has a defined cut value")
    partition = NodePartition(labels=best_labels, k=k)
    # report the scalar oracle value rather than the vectorized sum
    return total_cut(h, partition, f), partition


def exact_oracle_result(h: Hypergraph, f: CutFunction, k: int) -> SolveResult:
    """
    Exact balanced optimum for any cut kind, without an energy.

    The assignment is the label vector and ``energy`` is None. This is the
    only solver path for the kinds that have no polynomial encoding.
    """
    start = time.perf_counter()
    value, partition = exact_balanced(h, f, k)
    return SolveResult(
        assignment=tuple(partition.labels),
        decoded=partition,
        energy=None,
        cut_value=value,
        feasible=True,
        metadata={
            "solver": SolverName.EXACT,
            "seed": None,
            "optimum": value,
            "seconds": time.perf_counter() - start,
        },
    )


def exact_min_poly(poly: BinaryPolynomial) -> Tuple[float, List[Tuple[int, ...]]]:
    """Global minimum of ``poly`` and every assignment attaining it."""
    if poly.num_vars > settings.EXACT_MAX_VARS:
        raise InstanceTooLargeError(
            f"Enumerating 2^{poly.num_vars} assignments exceeds the "
            f"2^{settings.EXACT_MAX_VARS} guard"
        )
    energies = evaluate_all(poly)
    best = float(energies.min())
    hits = np.flatnonzero(energies <= best + settings.ARGMIN_TOLERANCE)
    return best, [assignment_from_index(int(i), poly.num_vars) for i in hits]


# --- Simulated annealing -----------------------------------------


def _flatten(poly: BinaryPolynomial):
    """CSR arrays over the non-constant terms, as used by the annealing kernel."""
    terms = [t for t in poly.terms if t]
    coef = np.array([poly.terms[t] for t in terms], dtype=np.float64)
    term_ptr = np.zeros(len(terms) + 1, dtype=np.int64)
    term_ptr[1:] = np.cumsum([len(t) for t in terms])
    term_vars = np.array([v for t in terms for v in t], dtype=np.int64)

    by_var: List[List[int]] = [[] for _ in range(poly.num_vars)]
    for idx, term in enumerate(terms):
        for v in term:
            by_var[v].append(idx)
    var_ptr = np.zeros(poly.num_vars + 1, dtype=np.int64)
    var_ptr[1:] = np.cumsum([len(ts) for ts in by_var])
    var_terms = np.array([t for ts in by_var for t in ts], dtype=np.int64)
    return coef, term_ptr, term_vars, var_ptr, var_terms


def simulated_annealing(
    poly: BinaryPolynomial,
    params: Optional[SAParams] = None,
    problem: Optional[PartitionProblem] = None,
) -> List[SolveResult]:
    """
    Anneal ``params.reads`` independent chains; one SolveResult per read.

    Read r draws its random start and acceptance numbers from the stream
    ``(seed, r)``, so results are bit-identical for a fixed seed and
    neighbouring seeds share no streams. Each sweep proposes a flip of every
    variable in index order. Without a ``problem`` the results carry no
    decoded partition and are never feasible.
    """
    params = params or SAParams()
    betas = params.betas()
    arrays = _flatten(poly)
    results: List[SolveResult] = []

    for r in range(params.reads):
        start = time.perf_counter()
        rng = params.read_rng(r)
        state = rng.integers(0, 2, size=(1, poly.num_vars), dtype=np.int64)
        uniforms = rng.random((1, params.sweeps, poly.num_vars))
        if poly.num_vars:
            anneal_reads(state, uniforms, betas, *arrays)
        x = tuple(int(b) for b in state[0])
        metadata = {
            "solver": SolverName.SA,
            "seed": params.seed,
            "read": r,
            "seconds": time.perf_counter() - start,
        }
        if problem is not None:
            results.append(problem.make_result(x, poly, metadata))
        else:
            results.append(
                SolveResult(
                    assignment=x,
                    decoded=None,
                    energy=evaluate(poly, x),
                    cut_value=None,
                    feasible=False,
                    metadata=metadata,
                )
            )

    logger.debug(
        "sa: %d reads, best energy %.6g",
        len(results),
        min(res.energy for res in results),
    )
    return results


# --- QAOA statevector simulation --------------------------------


def _apply_mixer(psi: np.ndarray, num_qubits: int, beta: float, sign: int) -> None:
    """psi <- exp(-i beta H_M) psi with H_M = sign * sum_q X_q, in place."""
    c = math.cos(beta)
    s = -1j * sign * math.sin(beta)
    for q in range(num_qubits):
        view = psi.reshape(-1, 2, 1 << q)
        zero = view[:, 0, :].copy()
        one = view[:, 1, :]
        view[:, 0, :] = c * zero + s * one
        view[:, 1, :] = s * zero + c * one


def qaoa_probabilities(
    diag: np.ndarray,
    gammas: Sequence[float],
    betas: Sequence[float],
    mixer_sign: Optional[int] = None,
) -> np.ndarray:
    """
    Basis-state probabilities after alternating phase and mixer layers.

    The state starts in the uniform superposition; layer l applies
    ``exp(-i gamma_l diag)`` then ``exp(-i beta_l H_M)``.
    """
    if len(gammas) != len(betas):
        raise ValueError("gammas and betas must have the same length")
    sign = settings.QAOA_MIXER_SIGN if mixer_sign is None else mixer_sign
    size = diag.shape[0]
    num_qubits = size.bit_length() - 1
    if size != 1 << num_qubits:
        raise ValueError(f"Diagonal length {size} is not a power of two")

    psi = np.full(size, 1.0 / math.sqrt(size), dtype=np.complex128)
    for gamma, beta in zip(gammas, betas):
        psi *= np.exp(-1j * gamma * diag)
        _apply_mixer(psi, num_qubits, beta, sign)
    return np.abs(psi) ** 2


def qaoa_statevector(
    poly: BinaryPolynomial, params: Optional[QAOAParams] = None
) -> QAOADistribution:
    """
    Optimize depth-L QAOA angles for ``poly`` and return the final distribution.

    The diagonal holds the energy of every basis state, so polynomials of any
    degree are simulated without quadratization. Angles are tuned by
    Nelder-Mead from ``params.restarts`` uniform starts in [0, pi).
    """
    params = params or QAOAParams()
    if poly.num_vars > params.max_qubits:
        raise InstanceTooLargeError(
            f"{poly.num_vars} qubits exceed the simulator cap of {params.max_qubits}"
        )
    diag = evaluate_all(poly)
    depth = params.depth

    def expectation(theta: np.ndarray) -> float:
        probs = qaoa_probabilities(diag, theta[:depth], theta[depth:])
        return float(probs @ diag)

    rng = np.random.default_rng(params.seed)
    best_theta: Optional[np.ndarray] = None
    best_value = math.inf
    for restart in range(params.restarts):
        x0 = rng.uniform(0.0, math.pi, size=2 * depth)
        outcome = minimize(
            expectation,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": params.max_iter,
                "xatol": settings.QAOA_XATOL,
                "fatol": settings.QAOA_FATOL,
            },
        )
        logger.debug("qaoa restart %d: <E> = %.6g", restart, outcome.fun)
        if outcome.fun < best_value:
            best_value = float(outcome.fun)
            best_theta = np.asarray(outcome.x, dtype=float)

    probs = qaoa_probabilities(diag, best_theta[:depth], best_theta[depth:])
    return QAOADistribution(
        probabilities=probs,
        gammas=tuple(float(g) for g in best_theta[:depth]),
        betas=tuple(float(b) for b in best_theta[depth:]),
        expectation=float(probs @ diag),
    )


def select_best_balanced(
    dist: np.ndarray,
    h: Hypergraph,
    f: CutFunction,
    k: int,
    top_k: int,
    *,
    poly: BinaryPolynomial,
) -> SolveResult:
    """
    Best balanced partition among the ``top_k`` most probable basis states.

    A distribution over ``2**n`` states is read as the two-way layout, one
    over ``2**(n*k)`` states as one-hot. Ties in probability go to the
    smaller index; ties in cut to the more probable state. When no candidate
    is feasible, the most probable state is returned flagged infeasible.
    """
    dist = np.asarray(dist, dtype=float)
    num_vars = dist.shape[0].bit_length() - 1
    if num_vars == h.n and k == 2:
        spec = EncodingSpec(k=2, cut=CutKind.AON)
    elif num_vars == h.n * k:
        spec = EncodingSpec(k=k, cut=CutKind.QUADRATIC_MULTI)
    else:
        raise ValueError(
            f"Distribution over {num_vars} qubits matches neither n={h.n} nor n*k={h.n * k}"
        )
    problem = PartitionProblem(h, f, spec)

    order = np.argsort(-dist, kind="stable")[:top_k]
    best: Optional[SolveResult] = None
    for index in order:
        x = assignment_from_index(int(index), num_vars)
        candidate = problem.make_result(x, poly, {"probability": float(dist[index])})
        if not candidate.feasible or candidate.cut_value is None:
            continue
        if best is None or candidate.cut_value < best.cut_value - settings.OPTIMALITY_TOLERANCE:
            best = candidate
    if best is not None:
        return best
    x = assignment_from_index(int(order[0]), num_vars)
    fallback = problem.make_result(x, poly, {"probability": float(dist[order[0]])})
    fallback.feasible = False
    return fallback


# --- One-shot entry point ------------------------------------------


def solve_instance(
    h: Hypergraph,
    f: CutFunction,
    spec: EncodingSpec,
    solver: str,
    *,
    sa_params: Optional[SAParams] = None,
    qaoa_params: Optional[QAOAParams] = None,
    poly: Optional[BinaryPolynomial] = None,
    reference: Optional[Tuple[float, NodePartition]] = None,
) -> SolveResult:
    """
    Run one solver on ``h`` and return its SolveResult.

    exact: exhaustive balanced optimum (``reference`` reuses a cached
    ``exact_balanced`` result). sa: the lowest-energy read.
    qaoa: select_best_balanced over the optimized distribution.
    """
    if poly is None:
        poly = build_energy(h, spec, f.transitions)
    problem = PartitionProblem(h, f, spec)
    start = time.perf_counter()

    if solver == SolverName.EXACT:
        if reference is None:
            reference = exact_balanced(h, f, spec.k)
        value, partition = reference
        result = problem.make_result(encode_partition(partition, spec), poly)
        result.metadata.update({"solver": solver, "seed": None, "optimum": value})
    elif solver == SolverName.SA:
        sa_params = sa_params or SAParams()
        reads = simulated_annealing(poly, sa_params, problem)
        # min keeps the first read on ties
        result = min(reads, key=lambda res: res.energy)
        result.metadata.update({"solver": solver, "seed": sa_params.seed, "reads": len(reads)})
    elif solver == SolverName.QAOA:
        qaoa_params = qaoa_params or QAOAParams()
        dist = qaoa_statevector(poly, qaoa_params)
        result = select_best_balanced(
            dist.probabilities, h, f, spec.k, qaoa_params.top_k, poly=poly
        )
        result.metadata.update(
            {
                "solver": solver,
                "seed": qaoa_params.seed,
                "gammas": list(dist.gammas),
                "betas": list(dist.betas),
                "expectation": dist.expectation,
            }
        )
    else:
        raise ValueError(f"Unknown solver {solver!r}")

    result.metadata["seconds"] = time.perf_counter() - start
    return result
