"""
Direct evaluation of hyperedge cut functions and balance predicates.

These evaluators never go through a binary encoding; they are the reference
values that every polynomial builder in ``hypercut.pbo`` is checked against.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InfeasibleInputError
from .hypergraph import Hypergraph, NodePartition, induced_edge_partition
from .schema import ALL_CUT_KINDS, NORMALIZED_KINDS, TWO_WAY_KINDS, CutKind


@dataclass(frozen=True)
class CutFunction:
    """
    A cut objective.

    ``transitions`` is required for HRWC (n x n, nonnegative; the diagonal is
    ignored) and must be absent for every other kind.
    """

    kind: str
    transitions: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ALL_CUT_KINDS:
            raise ValueError(f"Unknown cut kind {self.kind!r}")
        if self.kind == CutKind.HRWC:
            if self.transitions is None:
                raise ValueError("HRWC needs a transition-probability matrix")
            p = np.asarray(self.transitions, dtype=float)
            if p.ndim != 2 or p.shape[0] != p.shape[1]:
                raise ValueError(f"Transition matrix must be square, got shape {p.shape}")
            if np.any(p < 0):
                raise InfeasibleInputError("Transition probabilities must be nonnegative")
            p = p.copy()
            p.setflags(write=False)
            object.__setattr__(self, "transitions", p)
        elif self.transitions is not None:
            raise ValueError(f"Cut kind {self.kind!r} takes no parameters")

    # arrays are not hashable / comparable by value
    def __eq__(self, other):
        if not isinstance(other, CutFunction) or other.kind != self.kind:
            return False
        if self.transitions is None or other.transitions is None:
            return self.transitions is other.transitions
        return np.array_equal(self.transitions, other.transitions)

    def __hash__(self):
        return hash(self.kind)


def _check_k(f: CutFunction, k: int) -> None:
    if f.kind in TWO_WAY_KINDS and k != 2:
        raise ValueError(f"Cut kind {f.kind!r} is two-way only, got k={k}")


def _part_volumes(h: Hypergraph, p: NodePartition) -> np.ndarray:
    degrees = np.asarray(h.degrees, dtype=float)
    return np.bincount(p.labels, weights=degrees, minlength=p.k)


def edge_cut_value(
    f: CutFunction,
    parts: Sequence[frozenset],
    h: Optional[Hypergraph] = None,
    p: Optional[NodePartition] = None,
) -> float:
    """
    Value of cut function ``f`` on one hyperedge.

    ``parts`` is the induced partition of the hyperedge (nonempty sets).
    The normalized-cut kinds also need the hypergraph and node partition to
    compute part volumes.
    """
    if f.kind == CutKind.HRWC:
        raise InfeasibleInputError("HRWC is a whole-partition objective; use total_cut")

    sizes = [len(s) for s in parts]
    if not sizes or min(sizes) == 0:
        raise ValueError("Induced partition must consist of nonempty sets")
    edge_size = sum(sizes)
    spanned = len(sizes)

    volumes = None
    if f.kind in NORMALIZED_KINDS:
        if h is None or p is None:
            raise ValueError(f"Cut kind {f.kind!r} needs the hypergraph and node partition")
        volumes = _part_volumes(h, p)
        if np.any(volumes == 0):
            raise InfeasibleInputError("Normalized cut is undefined for a zero-volume part")

    if f.kind == CutKind.AON:
        return 0.0 if spanned == 1 else 1.0
    if f.kind == CutKind.KMINUS1:
        return float(spanned - 1)

    if f.kind in (CutKind.QUADRATIC, CutKind.LINEAR, CutKind.NCUT2):
        if spanned > 2:
            raise ValueError(f"Cut kind {f.kind!r} needs a two-way partition")
        if spanned == 1:
            return 0.0
        s, rest = sizes
        if f.kind == CutKind.QUADRATIC:
            return float(s * rest)
        if f.kind == CutKind.LINEAR:
            return float(min(s, rest))

    if f.kind == CutKind.QUADRATIC_MULTI:
        return sum(s * (edge_size - s) for s in sizes) / edge_size

    if f.kind == CutKind.NCUT2:
        s, rest = sizes
        return float((1.0 / volumes[0] + 1.0 / volumes[1]) * s * rest / edge_size)

    # NCUT_MULTI: parts missing from the edge contribute zero
    total = 0.0
    for part in parts:
        c = p.labels[next(iter(part))]
        total += len(part) * (edge_size - len(part)) / (volumes[c] * edge_size)
    return float(total)


def _hrwc_phi(p_matrix: np.ndarray, partition: NodePartition) -> float:
    labels = np.asarray(partition.labels)
    sizes = np.bincount(labels, minlength=partition.k)
    if np.any(sizes == 0):
        raise InfeasibleInputError("HRWC is undefined for a partition with an empty part")
    total = 0.0
    for c in range(partition.k):
        inside = labels == c
        escape = p_matrix[np.ix_(inside, ~inside)].sum()
        total += escape / sizes[c]
    return float(total / partition.k)


def total_cut(h: Hypergraph, p: NodePartition, f: CutFunction) -> float:
    """
    Weighted sum of per-edge cut values; for HRWC the conductance Φ.

    Raises
    ------
    InfeasibleInputError
        Empty part under HRWC, zero-volume part under a normalized cut.
    """
    if p.n != h.n:
        raise ValueError(f"Partition covers {p.n} vertices, hypergraph has {h.n}")
    _check_k(f, p.k)

    if f.kind == CutKind.HRWC:
        if f.transitions.shape != (h.n, h.n):
            raise ValueError(
                f"Transition matrix shape {f.transitions.shape} does not match n={h.n}"
            )
        return _hrwc_phi(f.transitions, p)

    total = 0.0
    for e, w in enumerate(h.weights):
        total += w * edge_cut_value(f, induced_edge_partition(h, p, e), h, p)
    return total


def balance_violation(p: NodePartition) -> int:
    """Largest pairwise difference between part sizes."""
    return max(p.sizes) - min(p.sizes)


def batch_total_cut(
    h: Hypergraph, labels: np.ndarray, f: CutFunction, k: int
) -> np.ndarray:
    """
    ``total_cut`` for every row of an (M, n) label matrix at once.

    Rows under the normalized kinds with an empty or zero-volume part get
    ``inf`` instead of raising.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 2 or labels.shape[1] != h.n:
        raise ValueError(f"Expected labels of shape (M, {h.n}), got {labels.shape}")
    _check_k(f, k)
    rows = labels.shape[0]
    # one_hot[r, v, c] = labels[r, v] == c
    one_hot = labels[:, :, None] == np.arange(k)[None, None, :]

    if f.kind == CutKind.HRWC:
        p_matrix = np.array(f.transitions, dtype=float)
        np.fill_diagonal(p_matrix, 0.0)
        sizes = one_hot.sum(axis=1)
        phi = np.zeros(rows)
        for c in range(k):
            inside = one_hot[:, :, c].astype(float)
            escape = np.einsum("ri,ij,rj->r", inside, p_matrix, 1.0 - inside)
            with np.errstate(divide="ignore", invalid="ignore"):
                phi += escape / sizes[:, c]
        phi /= k
        phi[np.any(sizes == 0, axis=1)] = np.inf
        return phi

    if f.kind in (CutKind.NCUT2, CutKind.NCUT_MULTI):
        degrees = np.asarray(h.degrees, dtype=float)
        volumes = np.einsum("rvc,v->rc", one_hot.astype(float), degrees)
        bad = np.any(volumes == 0, axis=1)
        volumes = np.where(volumes == 0, 1.0, volumes)

    total = np.zeros(rows)
    for edge, w in zip(h.edges, h.weights):
        counts = one_hot[:, list(edge), :].sum(axis=1)  # (M, k)
        size = len(edge)
        spanned = (counts > 0).sum(axis=1)
        if f.kind == CutKind.AON:
            value = (spanned > 1).astype(float)
        elif f.kind == CutKind.KMINUS1:
            value = (spanned - 1).astype(float)
        elif f.kind == CutKind.QUADRATIC:
            value = (counts[:, 0] * counts[:, 1]).astype(float)
        elif f.kind == CutKind.LINEAR:
            value = np.minimum(counts[:, 0], counts[:, 1]).astype(float)
        elif f.kind == CutKind.QUADRATIC_MULTI:
            value = (counts * (size - counts)).sum(axis=1) / size
        elif f.kind == CutKind.NCUT2:
            crossing = counts[:, 0] * counts[:, 1] / size
            value = (1.0 / volumes[:, 0] + 1.0 / volumes[:, 1]) * crossing
        else:
            value = (counts * (size - counts) / (volumes * size)).sum(axis=1)
        total += w * value

    if f.kind in (CutKind.NCUT2, CutKind.NCUT_MULTI):
        total[bad] = np.inf
    return total
