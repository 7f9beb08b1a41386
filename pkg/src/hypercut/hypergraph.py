"""
Hypergraph representation, hMETIS-style file I/O and random instances.

Key public pieces:
- Hypergraph / NodePartition: immutable, validated on construction.
- parse_hmetis / serialize_hmetis: 1-indexed text on disk, 0-indexed in memory.
- generate_random_uniform: connected r-uniform instances, deterministic per seed.
- random_walk_transitions: default transition matrix for the HRWC objective.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from . import settings
from .errors import GenerationError, HypergraphFormatError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hypergraph:
    """
    Weighted hypergraph on vertices ``0 .. n-1``.

    Attributes
    ----------
    n:
        Vertex count.
    edges:
        Hyperedges as ascending vertex tuples. Accepts any iterables of
        vertices; they are normalised on construction.
    weights:
        Positive weight per hyperedge. Defaults to all ones.
    """

    n: int
    edges: Tuple[Tuple[int, ...], ...]
    weights: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"Vertex count must be a positive integer, got {self.n!r}")

        edges = []
        for idx, edge in enumerate(self.edges):
            vertices = [int(v) for v in edge]
            if len(vertices) < 2:
                raise ValueError(f"Hyperedge {idx} has fewer than 2 vertices")
            if len(set(vertices)) != len(vertices):
                raise ValueError(f"Hyperedge {idx} contains a duplicate vertex")
            for v in vertices:
                if not 0 <= v < self.n:
                    raise ValueError(
                        f"Hyperedge {idx} references vertex {v} outside [0, {self.n})"
                    )
            edges.append(tuple(sorted(vertices)))

        if self.weights:
            weights = tuple(float(w) for w in self.weights)
            if len(weights) != len(edges):
                raise ValueError(
                    f"Got {len(weights)} weights for {len(edges)} hyperedges"
                )
        else:
            weights = (1.0,) * len(edges)
        for idx, w in enumerate(weights):
            if not (w > 0 and math.isfinite(w)):
                raise ValueError(f"Hyperedge {idx} has non-positive weight {w!r}")

        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "weights", weights)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_weighted(self) -> bool:
        return any(w != 1.0 for w in self.weights)

    @property
    def total_weight(self) -> float:
        return float(sum(self.weights))

    @cached_property
    def degrees(self) -> Tuple[int, ...]:
        counts = [0] * self.n
        for edge in self.edges:
            for v in edge:
                counts[v] += 1
        return tuple(counts)


@dataclass(frozen=True)
class NodePartition:
    """
    Assignment of every vertex to one of ``k`` parts.

    Balance is a predicate (``is_balanced``), not an invariant: imbalanced
    and even empty-part partitions are representable.
    """

    labels: Tuple[int, ...]
    k: int

    def __post_init__(self):
        labels = tuple(int(c) for c in self.labels)
        if not labels:
            raise ValueError("A partition needs at least one vertex")
        if self.k < 1:
            raise ValueError(f"Part count must be positive, got {self.k!r}")
        for v, c in enumerate(labels):
            if not 0 <= c < self.k:
                raise ValueError(f"Label {c} of vertex {v} outside [0, {self.k})")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "k", int(self.k))

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(int(s) for s in np.bincount(self.labels, minlength=self.k))

    @cached_property
    def parts(self) -> Tuple[frozenset, ...]:
        members: List[List[int]] = [[] for _ in range(self.k)]
        for v, c in enumerate(self.labels):
            members[c].append(v)
        return tuple(frozenset(part) for part in members)


# --- hMETIS text format ----------------------------------------


def _format_number(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _content_lines(text: str) -> Iterable[Tuple[int, List[str]]]:
    """Yield (line_number, tokens) for every non-blank, non-comment line."""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("%"):
            continue
        yield line_no, stripped.split()


def _parse_int(token: str, what: str, line_no: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise HypergraphFormatError(f"{what} {token!r} is not an integer", line_no)


def parse_hmetis(text: str) -> Hypergraph:
    """
    Parse hMETIS-style text into a Hypergraph.

    The first content line is ``m n [fmt]``; ``fmt`` is ``1`` for weighted
    files (each edge line then starts with its weight) or ``0``/absent. Edge
    lines list 1-indexed vertices. Lines starting with ``%`` are comments.

    Raises
    ------
    HypergraphFormatError
        With the offending line number.
    """
    lines = list(_content_lines(text))
    if not lines:
        raise HypergraphFormatError("missing header line", 1)

    header_no, header = lines[0]
    if len(header) not in (2, 3):
        raise HypergraphFormatError(
            f"header must be 'm n [fmt]', got {' '.join(header)!r}", header_no
        )
    m = _parse_int(header[0], "edge count", header_no)
    n = _parse_int(header[1], "vertex count", header_no)
    if m < 0:
        raise HypergraphFormatError(f"negative edge count {m}", header_no)
    if n < 1:
        raise HypergraphFormatError(f"vertex count must be positive, got {n}", header_no)

    weighted = False
    if len(header) == 3:
        fmt = header[2]
        if fmt == "1":
            weighted = True
        elif fmt != "0":
            raise HypergraphFormatError(
                f"unsupported format flag {fmt!r} (only 0 and 1 are accepted)",
                header_no,
            )

    body = lines[1:]
    if len(body) != m:
        line_no = body[m][0] if len(body) > m else (lines[-1][0] + 1)
        raise HypergraphFormatError(
            f"header declares {m} hyperedges but {len(body)} edge lines follow",
            line_no,
        )

    edges: List[Tuple[int, ...]] = []
    weights: List[float] = []
    for line_no, tokens in body:
        if weighted:
            try:
                weight = float(tokens[0])
            except ValueError:
                raise HypergraphFormatError(f"weight {tokens[0]!r} is not a number", line_no)
            if not (weight > 0 and math.isfinite(weight)):
                raise HypergraphFormatError(f"non-positive weight {tokens[0]}", line_no)
            tokens = tokens[1:]
        else:
            weight = 1.0

        vertices: List[int] = []
        seen: Set[int] = set()
        for token in tokens:
            v = _parse_int(token, "vertex", line_no)
            if not 1 <= v <= n:
                raise HypergraphFormatError(f"vertex {v} outside [1, {n}]", line_no)
            if v in seen:
                raise HypergraphFormatError(f"duplicate vertex {v} in hyperedge", line_no)
            seen.add(v)
            vertices.append(v - 1)
        if len(vertices) < 2:
            raise HypergraphFormatError("hyperedge needs at least 2 vertices", line_no)

        edges.append(tuple(vertices))
        weights.append(weight)

    return Hypergraph(n=n, edges=tuple(edges), weights=tuple(weights))


def serialize_hmetis(h: Hypergraph) -> str:
    """Render ``h`` in the format read by ``parse_hmetis``."""
    weighted = h.is_weighted
    header = f"{h.m} {h.n} 1" if weighted else f"{h.m} {h.n}"
    lines = [header]
    for edge, weight in zip(h.edges, h.weights):
        vertices = " ".join(str(v + 1) for v in edge)
        if weighted:
            lines.append(f"{_format_number(weight)} {vertices}")
        else:
            lines.append(vertices)
    return "\n".join(lines) + "\n"


# --- Structural queries ------------------------------------------


def degree(h: Hypergraph, v: int) -> int:
    """Number of hyperedges containing ``v``."""
    if not 0 <= v < h.n:
        raise IndexError(f"Vertex {v} outside [0, {h.n})")
    return h.degrees[v]


def volume(h: Hypergraph, subset: Iterable[int]) -> int:
    """Sum of degrees over ``subset``."""
    total = 0
    for v in set(subset):
        total += degree(h, v)
    return total


def is_connected(h: Hypergraph) -> bool:
    """True iff vertices sharing hyperedges link all ``n`` vertices."""
    graph = nx.Graph()
    graph.add_nodes_from(range(h.n))
    for edge in h.edges:
        # A path through the edge's members is enough for connectivity.
        nx.add_path(graph, edge)
    return nx.is_connected(graph)


def induced_edge_partition(
    h: Hypergraph, p: NodePartition, e: int
) -> List[frozenset]:
    """Nonempty sets ``edge ∩ C_i``, ordered by part index."""
    if not 0 <= e < h.m:
        raise IndexError(f"Edge index {e} outside [0, {h.m})")
    if p.n != h.n:
        raise ValueError(f"Partition covers {p.n} vertices, hypergraph has {h.n}")
    groups: List[List[int]] = [[] for _ in range(p.k)]
    for v in h.edges[e]:
        groups[p.labels[v]].append(v)
    return [frozenset(g) for g in groups if g]


def is_balanced(p: NodePartition) -> bool:
    """Part sizes differ by at most one and no part is empty."""
    sizes = p.sizes
    return min(sizes) > 0 and max(sizes) - min(sizes) <= 1


# --- Random instances --------------------------------------------


def expected_edge_count(n: int, r: int, avg_degree: float) -> int:
    """``round(n * avg_degree / r)`` with halves rounded up."""
    return int(math.floor(n * avg_degree / r + 0.5))


def _draw_edges(
    rng: np.random.Generator, n: int, r: int, m: int, total: int
) -> List[Tuple[int, ...]]:
    if total <= settings.GENERATOR_ENUMERATION_LIMIT:
        candidates = list(combinations(range(n), r))
        picks = rng.choice(len(candidates), size=m, replace=False)
        return sorted(candidates[i] for i in picks)

    chosen: Set[Tuple[int, ...]] = set()
    while len(chosen) < m:
        edge = tuple(sorted(int(v) for v in rng.choice(n, size=r, replace=False)))
        chosen.add(edge)
    return sorted(chosen)


def generate_random_uniform(
    n: int, r: int, avg_degree: float, seed: int
) -> Hypergraph:
    """
    Draw a connected r-uniform hypergraph with ``round(n * avg_degree / r)``
    distinct edges.

    Edges are sampled uniformly without replacement. Disconnected draws are
    rejected and redrawn from the stream ``(seed, attempt)`` until one is
    connected or the retry budget runs out.

    Raises
    ------
    GenerationError
        If the edge count exceeds C(n, r) or no connected draw was found.
    """
    if not (2 <= r <= n):
        raise ValueError(f"Need n >= r >= 2, got n={n}, r={r}")
    if seed < 0:
        raise ValueError(f"Seed must be non-negative, got {seed}")
    if avg_degree * n / r < 1:
        raise ValueError(
            f"avg_degree * n / r must be at least 1, got {avg_degree * n / r:g}"
        )
    m = expected_edge_count(n, r, avg_degree)
    total = math.comb(n, r)
    if m > total:
        raise GenerationError(f"Requested {m} edges but only C({n}, {r}) = {total} exist")

    for attempt in range(settings.GENERATOR_RETRY_BUDGET):
        rng = np.random.default_rng([seed, attempt])
        h = Hypergraph(n=n, edges=tuple(_draw_edges(rng, n, r, m, total)))
        if is_connected(h):
            if attempt:
                logger.debug("seed %d: connected draw after %d rejections", seed, attempt)
            return h

    raise GenerationError(
        f"No connected instance (n={n}, r={r}, m={m}) within "
        f"{settings.GENERATOR_RETRY_BUDGET} draws for seed {seed}"
    )


def random_walk_transitions(h: Hypergraph) -> np.ndarray:
    """
    Transition matrix of the standard hypergraph random walk.

    From ``u`` the walk picks an incident hyperedge with probability
    proportional to its weight, then moves to a uniformly chosen other member
    of that hyperedge. Rows of isolated vertices are zero.
    """
    p = np.zeros((h.n, h.n), dtype=float)
    weighted_degree = np.zeros(h.n, dtype=float)
    for edge, w in zip(h.edges, h.weights):
        for u in edge:
            weighted_degree[u] += w

    for edge, w in zip(h.edges, h.weights):
        share = w / (len(edge) - 1)
        for u in edge:
            for v in edge:
                if u != v:
                    p[u, v] += share / weighted_degree[u]
    return p


def partition_from_labels(labels: Sequence[int], k: Optional[int] = None) -> NodePartition:
    """Build a NodePartition, inferring ``k`` as ``max(label) + 1`` if omitted."""
    labels = tuple(int(c) for c in labels)
    if k is None:
        k = max(labels) + 1
    return NodePartition(labels=labels, k=k)
