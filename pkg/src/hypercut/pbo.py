"""
Multilinear pseudo-Boolean polynomials and the partitioning encodings.

Key public pieces:
- BinaryPolynomial: sorted-tuple -> coefficient map with x**2 == x applied.
- IsingModel: fields, couplings and offset over spins z in {-1, +1}.
- EncodingSpec / build_energy: the composed energy
  E_cut + alpha * E_partition + lambda * E_balance.
- build_* helpers for every encodable cut function and penalty.
- quadratize_rosenberg / to_ising: degree reduction and spin export.

Variable layout: two-way encodings use one variable per vertex (x_i = 1
means part 1); multi-way encodings use one-hot blocks with the variable of
(vertex i, part c) at index ``i * k + c``.
"""

import logging
import numbers
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import settings
from .errors import InfeasibleInputError
from .hypergraph import Hypergraph, NodePartition
from .schema import ENCODABLE_KINDS, TEXT_HEADERS, CutKind, TextFormat

logger = logging.getLogger(__name__)

Term = Tuple[int, ...]


def _canonical_term(variables: Iterable[int]) -> Term:
    return tuple(sorted(set(int(v) for v in variables)))


def _prune(terms: Mapping[Term, float]) -> Dict[Term, float]:
    tol = settings.ZERO_TOLERANCE
    return {t: float(c) for t, c in terms.items() if abs(c) > tol}


@dataclass(frozen=True)
class BinaryPolynomial:
    """
    Multilinear polynomial over binary variables ``x_0 .. x_{num_vars-1}``.

    ``terms`` maps ascending, duplicate-free index tuples to coefficients;
    the empty tuple holds the constant. Construction canonicalises keys,
    merges duplicates and prunes near-zero coefficients.
    """

    num_vars: int
    terms: Mapping[Term, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError(f"num_vars must be non-negative, got {self.num_vars}")
        merged: Dict[Term, float] = defaultdict(float)
        for variables, coef in self.terms.items():
            term = _canonical_term(variables)
            if term and term[-1] >= self.num_vars:
                raise ValueError(
                    f"Term {term} references a variable outside [0, {self.num_vars})"
                )
            if term and term[0] < 0:
                raise ValueError(f"Term {term} has a negative variable index")
            merged[term] += float(coef)
        object.__setattr__(self, "num_vars", int(self.num_vars))
        object.__setattr__(self, "terms", dict(sorted(_prune(merged).items())))

    # --- constructors ---------------------------------------------

    @classmethod
    def zero(cls, num_vars: int) -> "BinaryPolynomial":
        return cls(num_vars, {})

    @classmethod
    def constant(cls, num_vars: int, value: float) -> "BinaryPolynomial":
        return cls(num_vars, {(): value})

    @classmethod
    def monomial(
        cls, num_vars: int, variables: Sequence[int], coef: float = 1.0
    ) -> "BinaryPolynomial":
        return cls(num_vars, {tuple(variables): coef})

    # --- algebra --------------------------------------------------

    def _check_compatible(self, other: "BinaryPolynomial") -> None:
        if other.num_vars != self.num_vars:
            raise ValueError(
                f"Variable count mismatch: {self.num_vars} vs {other.num_vars}"
            )

    def __add__(self, other):
        if isinstance(other, numbers.Real):
            return self + BinaryPolynomial.constant(self.num_vars, other)
        self._check_compatible(other)
        merged = Counter()
        merged.update(self.terms)
        merged.update(other.terms)
        return BinaryPolynomial(self.num_vars, dict(merged))

    __radd__ = __add__

    def __neg__(self):
        return BinaryPolynomial(self.num_vars, {t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return BinaryPolynomial(
                self.num_vars, {t: c * other for t, c in self.terms.items()}
            )
        self._check_compatible(other)
        product: Dict[Term, float] = defaultdict(float)
        for t1, c1 in self.terms.items():
            for t2, c2 in other.terms.items():
                product[_canonical_term(t1 + t2)] += c1 * c2
        return BinaryPolynomial(self.num_vars, product)

    __rmul__ = __mul__

    def with_num_vars(self, num_vars: int) -> "BinaryPolynomial":
        """Same terms over a larger variable set."""
        if num_vars < self.num_vars:
            raise ValueError("Cannot shrink the variable set")
        return BinaryPolynomial(num_vars, self.terms)

    # --- queries --------------------------------------------------

    @property
    def constant_term(self) -> float:
        return self.terms.get((), 0.0)

    def is_zero(self) -> bool:
        return not self.terms

    @cached_property
    def var_terms(self) -> Tuple[Tuple[Term, ...], ...]:
        """For each variable, the terms that contain it."""
        index: List[List[Term]] = [[] for _ in range(self.num_vars)]
        for term in self.terms:
            for v in term:
                index[v].append(term)
        return tuple(tuple(ts) for ts in index)

    def isclose(self, other: "BinaryPolynomial", tol: float = 1e-9) -> bool:
        if other.num_vars != self.num_vars:
            return False
        keys = set(self.terms) | set(other.terms)
        return all(
            abs(self.terms.get(t, 0.0) - other.terms.get(t, 0.0)) <= tol for t in keys
        )

    # --- text format ----------------------------------------------

    def to_text(self) -> str:
        return _terms_to_text(TextFormat.POLY, self.num_vars, self.terms)

    @classmethod
    def from_text(cls, text: str) -> "BinaryPolynomial":
        num_vars, terms = _terms_from_text(TextFormat.POLY, text)
        return cls(num_vars, terms)


def degree(poly: BinaryPolynomial) -> int:
    """Length of the longest stored term; 0 for constant or zero polynomials."""
    return max((len(t) for t in poly.terms), default=0)


def _check_assignment(poly: BinaryPolynomial, x: Sequence[int]) -> None:
    if len(x) != poly.num_vars:
        raise ValueError(f"Assignment has {len(x)} entries, polynomial has {poly.num_vars} variables")


def evaluate(poly: BinaryPolynomial, x: Sequence[int]) -> float:
    """Sum over terms of coefficient times the product of the term's bits."""
    _check_assignment(poly, x)
    total = 0.0
    for term, coef in poly.terms.items():
        if all(x[v] for v in term):
            total += coef
    return total


def flip_delta(poly: BinaryPolynomial, x: Sequence[int], i: int) -> float:
    """
    Energy change from flipping bit ``i``, using only terms that contain it.
    """
    _check_assignment(poly, x)
    if not 0 <= i < poly.num_vars:
        raise IndexError(f"Variable {i} outside [0, {poly.num_vars})")
    gain = 0.0
    for term in poly.var_terms[i]:
        if all(x[v] for v in term if v != i):
            gain += poly.terms[term]
    # turning the bit on adds the terms, turning it off removes them
    return gain if not x[i] else -gain


def evaluate_all(poly: BinaryPolynomial) -> np.ndarray:
    """
    Energies of all ``2**num_vars`` assignments.

    Entry ``idx`` is the energy of the assignment whose bit ``i`` is
    ``(idx >> i) & 1``.
    """
    if poly.num_vars > 30:
        raise ValueError(f"Refusing to enumerate 2**{poly.num_vars} assignments")
    idx = np.arange(1 << poly.num_vars, dtype=np.int64)
    energies = np.full(idx.shape, poly.constant_term, dtype=float)
    for term, coef in poly.terms.items():
        if not term:
            continue
        mask = 0
        for v in term:
            mask |= 1 << v
        energies += coef * ((idx & mask) == mask)
    return energies


def assignment_from_index(index: int, num_vars: int) -> Tuple[int, ...]:
    return tuple((index >> i) & 1 for i in range(num_vars))


# --- Encoding builders ---------------------------------------------


def _accumulate_product(
    acc: Dict[Term, float], variables: Sequence[int], coef: float
) -> None:
    """acc += coef * prod(x_v for v in variables)"""
    acc[_canonical_term(variables)] += coef


def _accumulate_complement_product(
    acc: Dict[Term, float], variables: Sequence[int], coef: float
) -> None:
    """acc += coef * prod(1 - x_v for v in variables), fully expanded."""
    for size in range(len(variables) + 1):
        sign = -1.0 if size % 2 else 1.0
        for subset in combinations(variables, size):
            acc[_canonical_term(subset)] += sign * coef


def _accumulate_ordered_pairs(
    acc: Dict[Term, float], variables: Sequence[int], coef: float
) -> None:
    """acc += coef * sum over ordered pairs i != j of x_i (1 - x_j)."""
    # sum_{i != j} x_i - x_i x_j = (|S| - 1) * sum x_i - 2 * sum_{i<j} x_i x_j
    size = len(variables)
    for v in variables:
        acc[(v,)] += coef * (size - 1)
    for u, v in combinations(variables, 2):
        acc[_canonical_term((u, v))] -= 2.0 * coef


def _accumulate_square_of_sum(
    acc: Dict[Term, float], variables: Sequence[int], target: float, coef: float
) -> None:
    """acc += coef * (sum x_v - target)**2 with x**2 = x."""
    for v in variables:
        acc[(v,)] += coef * (1.0 - 2.0 * target)
    for u, v in combinations(variables, 2):
        acc[_canonical_term((u, v))] += 2.0 * coef
    acc[()] += coef * target * target


def one_hot_index(i: int, c: int, k: int) -> int:
    return i * k + c


def build_two_way_cut(h: Hypergraph, kind: str) -> BinaryPolynomial:
    """
    Two-way cut polynomial over ``n`` variables.

    AoN: sum_e w_e (1 - prod x - prod (1 - x)); a HUBO for edges larger
    than 3, degree 2 on 3-uniform hypergraphs because the cubic terms cancel.
    Quadratic: sum_e w_e sum over ordered pairs x_i (1 - x_j), which equals
    |S| * |e \\ S| per edge.
    """
    acc: Dict[Term, float] = defaultdict(float)
    if kind == CutKind.AON:
        for edge, w in zip(h.edges, h.weights):
            acc[()] += w
            _accumulate_product(acc, edge, -w)
            _accumulate_complement_product(acc, edge, -w)
    elif kind == CutKind.QUADRATIC:
        for edge, w in zip(h.edges, h.weights):
            _accumulate_ordered_pairs(acc, edge, w)
    else:
        raise ValueError(f"No two-way encoding for cut kind {kind!r}")
    return BinaryPolynomial(h.n, acc)


def build_two_way_balance(n: int) -> BinaryPolynomial:
    """(sum_i x_i - n/2)**2, constant n**2/4 included."""
    if n < 2:
        raise ValueError(f"Two-way balance needs n >= 2, got {n}")
    acc: Dict[Term, float] = defaultdict(float)
    _accumulate_square_of_sum(acc, range(n), n / 2.0, 1.0)
    return BinaryPolynomial(n, acc)


def build_multi_partition_penalty(n: int, k: int) -> BinaryPolynomial:
    """sum_i (sum_c x_ic - 1)**2 over the one-hot layout."""
    if k < 2:
        raise ValueError(f"Multi-way encodings need k >= 2, got {k}")
    acc: Dict[Term, float] = defaultdict(float)
    for i in range(n):
        block = [one_hot_index(i, c, k) for c in range(k)]
        _accumulate_square_of_sum(acc, block, 1.0, 1.0)
    return BinaryPolynomial(n * k, acc)


def build_multi_balance(n: int, k: int) -> BinaryPolynomial:
    """sum_c (sum_i x_ic - n/k)**2 over the one-hot layout."""
    if k < 2:
        raise ValueError(f"Multi-way encodings need k >= 2, got {k}")
    acc: Dict[Term, float] = defaultdict(float)
    for c in range(k):
        column = [one_hot_index(i, c, k) for i in range(n)]
        _accumulate_square_of_sum(acc, column, n / k, 1.0)
    return BinaryPolynomial(n * k, acc)


def build_multi_cut(h: Hypergraph, k: int, kind: str) -> BinaryPolynomial:
    """
    One-hot cut polynomial over ``n * k`` variables.

    AoN: sum_e w_e (1 - sum_c prod_{v in e} x_vc). The all-zero product of
    the two-way form is left out; the partition penalty enforces one-hot.
    KMinus1: sum_e w_e (sum_c (1 - prod (1 - x_vc)) - 1).
    QuadraticMulti: sum_e (w_e / |e|) sum_c sum over ordered pairs x_ic (1 - x_jc).
    """
    if k < 2:
        raise ValueError(f"Multi-way encodings need k >= 2, got {k}")
    acc: Dict[Term, float] = defaultdict(float)
    for edge, w in zip(h.edges, h.weights):
        blocks = [[one_hot_index(v, c, k) for v in edge] for c in range(k)]
        if kind == CutKind.AON:
            acc[()] += w
            for column in blocks:
                _accumulate_product(acc, column, -w)
        elif kind == CutKind.KMINUS1:
            acc[()] += w * (k - 1)
            for column in blocks:
                _accumulate_complement_product(acc, column, -w)
        elif kind == CutKind.QUADRATIC_MULTI:
            for column in blocks:
                _accumulate_ordered_pairs(acc, column, w / len(edge))
        else:
            raise ValueError(f"No multi-way encoding for cut kind {kind!r}")
    return BinaryPolynomial(h.n * k, acc)


def build_hrwc(p: np.ndarray, n: int, k: int) -> BinaryPolynomial:
    """
    (1/n) sum_{i != j} p(i, j) sum_c x_ic (1 - x_jc); the diagonal is ignored.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (n, n):
        raise ValueError(f"Transition matrix must be {n}x{n}, got {p.shape}")
    if np.any(p < 0):
        raise InfeasibleInputError("Transition probabilities must be nonnegative")
    if k < 2:
        raise ValueError(f"Multi-way encodings need k >= 2, got {k}")
    acc: Dict[Term, float] = defaultdict(float)
    for i in range(n):
        for j in range(n):
            weight = p[i, j] / n
            if i == j or weight == 0.0:
                continue
            for c in range(k):
                xi = one_hot_index(i, c, k)
                xj = one_hot_index(j, c, k)
                acc[(xi,)] += weight
                acc[_canonical_term((xi, xj))] -= weight
    return BinaryPolynomial(n * k, acc)


def compose_energy(
    cut: BinaryPolynomial,
    partition: BinaryPolynomial,
    balance: BinaryPolynomial,
    alpha: float,
    lam: float,
) -> BinaryPolynomial:
    """cut + alpha * partition + lam * balance, zero terms pruned."""
    if not (cut.num_vars == partition.num_vars == balance.num_vars):
        raise ValueError(
            "Variable count mismatch: "
            f"cut={cut.num_vars}, partition={partition.num_vars}, balance={balance.num_vars}"
        )
    merged: Dict[Term, float] = defaultdict(float)
    for poly, weight in ((cut, 1.0), (partition, alpha), (balance, lam)):
        if weight == 0:
            continue
        for term, coef in poly.terms.items():
            merged[term] += weight * coef
    return BinaryPolynomial(cut.num_vars, merged)


@dataclass
class EncodingSpec:
    """
    Parameters of a composed partitioning energy.

    Attributes
    ----------
    k:
        Number of parts. ``k == 2`` selects the n-variable two-way layout,
        anything larger the one-hot layout.
    lam:
        Balance-penalty weight (lambda).
    alpha:
        One-hot validity weight. Ignored for two-way encodings; ``None``
        picks ``lam * n + sum(w_e) + ALPHA_MARGIN`` at build time.
    cut:
        Encodable cut kind.
    """

    k: int = 2
    lam: float = field(default_factory=lambda: settings.DEFAULT_LAMBDA)
    alpha: Optional[float] = None
    cut: str = CutKind.AON

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        if self.lam < 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")
        if self.alpha is not None and self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if self.cut not in ENCODABLE_KINDS:
            raise ValueError(
                f"Cut kind {self.cut!r} has no polynomial encoding; "
                f"expected one of {sorted(ENCODABLE_KINDS)}"
            )
        if self.k > 2 and self.cut == CutKind.QUADRATIC:
            raise ValueError("The two-way quadratic cut needs k=2; use quadratic_multi")

    @property
    def two_way(self) -> bool:
        # HRWC and the multi-way surrogates are defined on the one-hot layout
        return self.k == 2 and self.cut in (CutKind.AON, CutKind.QUADRATIC)

    def num_vars(self, n: int) -> int:
        return n if self.two_way else n * self.k

    def resolve_alpha(self, h: Hypergraph) -> float:
        if self.two_way:
            return 0.0
        if self.alpha is not None:
            return float(self.alpha)
        return self.lam * h.n + h.total_weight + settings.ALPHA_MARGIN


def build_energy(
    h: Hypergraph, spec: EncodingSpec, transitions: Optional[np.ndarray] = None
) -> BinaryPolynomial:
    """Compose the full penalized energy for ``h`` under ``spec``."""
    if spec.two_way:
        cut = build_two_way_cut(h, spec.cut)
        partition = BinaryPolynomial.zero(h.n)
        balance = build_two_way_balance(h.n)
    else:
        if spec.cut == CutKind.HRWC:
            if transitions is None:
                raise ValueError("HRWC encoding needs a transition matrix")
            cut = build_hrwc(transitions, h.n, spec.k)
        else:
            cut = build_multi_cut(h, spec.k, spec.cut)
        partition = build_multi_partition_penalty(h.n, spec.k)
        balance = build_multi_balance(h.n, spec.k)
    return compose_energy(cut, partition, balance, spec.resolve_alpha(h), spec.lam)


def encode_partition(p: NodePartition, spec: EncodingSpec) -> Tuple[int, ...]:
    """Assignment that represents ``p`` in the layout chosen by ``spec``."""
    if spec.two_way:
        if p.k != 2:
            raise ValueError(f"Two-way layout needs k=2, got {p.k}")
        return tuple(p.labels)
    x = [0] * (p.n * spec.k)
    for i, c in enumerate(p.labels):
        x[one_hot_index(i, c, spec.k)] = 1
    return tuple(x)


# --- Quadratization ------------------------------------------------


def quadratize_rosenberg(poly: BinaryPolynomial) -> Tuple[BinaryPolynomial, int]:
    """
    Reduce ``poly`` to degree <= 2 by Rosenberg substitution.

    Repeatedly picks the variable pair occurring in the most degree >= 3
    terms (ties: smallest pair), replaces it there by a fresh auxiliary y
    and adds M * (uv - 2uy - 2vy + 3y) with M = 1 + sum of |coefficients| of
    the terms containing the pair. Auxiliaries are appended after the
    original variables. For every original assignment, the minimum over the
    auxiliaries equals the original value.

    Returns
    -------
    (quadratic polynomial, number of auxiliary variables)
    """
    terms: Dict[Term, float] = dict(poly.terms)
    num_vars = poly.num_vars
    aux = 0

    while True:
        pair_counts: Counter = Counter()
        for term in terms:
            if len(term) >= 3:
                pair_counts.update(combinations(term, 2))
        if not pair_counts:
            break

        best = max(pair_counts.values())
        u, v = min(pair for pair, count in pair_counts.items() if count == best)
        y = num_vars
        num_vars += 1
        aux += 1

        penalty = 1.0 + sum(
            abs(coef) for term, coef in terms.items() if u in term and v in term
        )

        rewritten: Dict[Term, float] = defaultdict(float)
        for term, coef in terms.items():
            if len(term) >= 3 and u in term and v in term:
                reduced = tuple(t for t in term if t != u and t != v) + (y,)
                rewritten[_canonical_term(reduced)] += coef
            else:
                rewritten[term] += coef
        rewritten[(u, v)] += penalty
        rewritten[(u, y)] -= 2.0 * penalty
        rewritten[(v, y)] -= 2.0 * penalty
        rewritten[(y,)] += 3.0 * penalty
        terms = _prune(rewritten)
        logger.debug("rosenberg: x%d*x%d -> y%d (M=%g)", u, v, y, penalty)

    return BinaryPolynomial(num_vars, terms), aux


# --- Ising export ----------------------------------------------------


@dataclass(frozen=True)
class IsingModel:
    """
    Spin Hamiltonian ``offset + sum_i h_i z_i + sum_{i<j} J_ij z_i z_j``.
    """

    h: Tuple[float, ...]
    J: Mapping[Tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        fields_ = tuple(float(v) for v in self.h)
        couplings: Dict[Tuple[int, int], float] = defaultdict(float)
        for (i, j), value in self.J.items():
            if i == j:
                raise ValueError(f"Self-coupling ({i}, {j}) is not allowed")
            a, b = sorted((int(i), int(j)))
            if not 0 <= a < b < len(fields_):
                raise ValueError(f"Coupling ({i}, {j}) outside [0, {len(fields_)})")
            couplings[(a, b)] += float(value)
        object.__setattr__(self, "h", fields_)
        object.__setattr__(self, "J", dict(sorted(_prune(couplings).items())))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def num_spins(self) -> int:
        return len(self.h)

    def energy(self, z: Sequence[int]) -> float:
        if len(z) != self.num_spins:
            raise ValueError(f"Spin vector has {len(z)} entries, model has {self.num_spins}")
        total = self.offset
        for i, hi in enumerate(self.h):
            total += hi * z[i]
        for (i, j), value in self.J.items():
            total += value * z[i] * z[j]
        return total

    def to_polynomial(self) -> BinaryPolynomial:
        """Inverse substitution z = 2x - 1."""
        acc: Dict[Term, float] = defaultdict(float)
        acc[()] += self.offset
        for i, hi in enumerate(self.h):
            acc[(i,)] += 2.0 * hi
            acc[()] -= hi
        for (i, j), value in self.J.items():
            acc[(i, j)] += 4.0 * value
            acc[(i,)] -= 2.0 * value
            acc[(j,)] -= 2.0 * value
            acc[()] += value
        return BinaryPolynomial(self.num_spins, acc)

    def to_text(self) -> str:
        terms: Dict[Term, float] = {(): self.offset}
        for i, hi in enumerate(self.h):
            terms[(i,)] = hi
        terms.update(self.J)
        return _terms_to_text(TextFormat.ISING, self.num_spins, _prune(terms))

    @classmethod
    def from_text(cls, text: str) -> "IsingModel":
        num_spins, terms = _terms_from_text(TextFormat.ISING, text)
        fields_ = [0.0] * num_spins
        couplings: Dict[Tuple[int, int], float] = {}
        offset = 0.0
        for term, coef in terms.items():
            if len(term) == 0:
                offset += coef
            elif len(term) == 1:
                fields_[term[0]] += coef
            elif len(term) == 2:
                couplings[term] = couplings.get(term, 0.0) + coef
            else:
                raise ValueError(f"Ising text has a degree-{len(term)} term {term}")
        return cls(tuple(fields_), couplings, offset)


def to_ising(poly: BinaryPolynomial) -> IsingModel:
    """
    Exact substitution x = (z + 1) / 2 for a polynomial of degree <= 2.

    ising.energy(2x - 1) equals evaluate(poly, x) for every x, offset included.
    """
    if degree(poly) > 2:
        raise ValueError(
            f"Ising export needs degree <= 2, got {degree(poly)}; quadratize first"
        )
    fields_ = [0.0] * poly.num_vars
    couplings: Dict[Tuple[int, int], float] = defaultdict(float)
    offset = 0.0
    for term, coef in poly.terms.items():
        if len(term) == 0:
            offset += coef
        elif len(term) == 1:
            # a x = a/2 + (a/2) z
            offset += coef / 2.0
            fields_[term[0]] += coef / 2.0
        else:
            # b x_i x_j = b/4 (1 + z_i + z_j + z_i z_j)
            i, j = term
            offset += coef / 4.0
            fields_[i] += coef / 4.0
            fields_[j] += coef / 4.0
            couplings[(i, j)] += coef / 4.0
    return IsingModel(tuple(fields_), couplings, offset)


# --- Plain-text term format -----------------------------------------


def _terms_to_text(fmt: str, num_vars: int, terms: Mapping[Term, float]) -> str:
    max_deg = max((len(t) for t in terms), default=0)
    lines = [f"{TEXT_HEADERS[fmt]} {num_vars} maxdeg {max_deg}"]
    for term in sorted(terms):
        parts = [repr(float(terms[term]))] + [str(v) for v in term]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _terms_from_text(fmt: str, text: str) -> Tuple[int, Dict[Term, float]]:
    keyword = TEXT_HEADERS[fmt]
    rows = [
        (no, line.split())
        for no, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not rows:
        raise ValueError("Empty term file")
    header_no, header = rows[0]
    if len(header) != 4 or header[0] != keyword or header[2] != "maxdeg":
        raise ValueError(
            f"line {header_no}: expected '{keyword} <N> maxdeg <D>', got {' '.join(header)!r}"
        )
    try:
        num_vars = int(header[1])
        max_deg = int(header[3])
    except ValueError:
        raise ValueError(f"line {header_no}: header counts must be integers")

    terms: Dict[Term, float] = defaultdict(float)
    for line_no, tokens in rows[1:]:
        try:
            coef = float(tokens[0])
            variables = [int(t) for t in tokens[1:]]
        except ValueError:
            raise ValueError(f"line {line_no}: malformed term {' '.join(tokens)!r}")
        if len(variables) > max_deg:
            raise ValueError(f"line {line_no}: term degree exceeds declared maxdeg {max_deg}")
        if any(not 0 <= v < num_vars for v in variables):
            raise ValueError(f"line {line_no}: variable index outside [0, {num_vars})")
        if len(set(variables)) != len(variables):
            raise ValueError(f"line {line_no}: repeated variable in term")
        terms[tuple(sorted(variables))] += coef
    return num_vars, dict(terms)
