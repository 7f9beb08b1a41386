from typing import Dict, FrozenSet


class CutKind:
    AON = "aon"
    QUADRATIC = "quadratic"
    LINEAR = "linear"
    NCUT2 = "ncut2"
    KMINUS1 = "kminus1"
    QUADRATIC_MULTI = "quadratic_multi"
    NCUT_MULTI = "ncut_multi"
    HRWC = "hrwc"


ALL_CUT_KINDS: FrozenSet[str] = frozenset(
    {
        CutKind.AON,
        CutKind.QUADRATIC,
        CutKind.LINEAR,
        CutKind.NCUT2,
        CutKind.KMINUS1,
        CutKind.QUADRATIC_MULTI,
        CutKind.NCUT_MULTI,
        CutKind.HRWC,
    }
)

# Kinds defined only for k = 2
TWO_WAY_KINDS: FrozenSet[str] = frozenset(
    {CutKind.QUADRATIC, CutKind.LINEAR, CutKind.NCUT2}
)

# Kinds whose value depends on part volumes or sizes, not only on the edge
NORMALIZED_KINDS: FrozenSet[str] = frozenset(
    {CutKind.NCUT2, CutKind.NCUT_MULTI, CutKind.HRWC}
)

# Kinds with a polynomial (QUBO/HUBO) encoding
ENCODABLE_KINDS: FrozenSet[str] = frozenset(
    {
        CutKind.AON,
        CutKind.QUADRATIC,
        CutKind.KMINUS1,
        CutKind.QUADRATIC_MULTI,
        CutKind.HRWC,
    }
)

# CLI spellings -> kind
CUT_ALIASES: Dict[str, str] = {
    "aon": CutKind.AON,
    "all-or-nothing": CutKind.AON,
    "quadratic": CutKind.QUADRATIC,
    "quad": CutKind.QUADRATIC,
    "linear": CutKind.LINEAR,
    "ncut": CutKind.NCUT2,
    "ncut2": CutKind.NCUT2,
    "kminus1": CutKind.KMINUS1,
    "k-1": CutKind.KMINUS1,
    "quadratic-multi": CutKind.QUADRATIC_MULTI,
    "quadratic_multi": CutKind.QUADRATIC_MULTI,
    "ncut-multi": CutKind.NCUT_MULTI,
    "ncut_multi": CutKind.NCUT_MULTI,
    "hrwc": CutKind.HRWC,
}


class SolverName:
    EXACT = "exact"
    SA = "sa"
    QAOA = "qaoa"


ALL_SOLVERS: FrozenSet[str] = frozenset({SolverName.EXACT, SolverName.SA, SolverName.QAOA})


class TextFormat:
    POLY = "poly"
    ISING = "ising"
    JSON = "json"


# Header keyword of each plain-text term format
TEXT_HEADERS: Dict[str, str] = {
    TextFormat.POLY: "vars",
    TextFormat.ISING: "spins",
}


def normalize_cut_kind(name: str) -> str:
    """Map a user spelling (``"aon"``, ``"k-1"``, ...) to a CutKind value."""
    key = name.strip().lower()
    if key not in CUT_ALIASES:
        raise ValueError(
            f"Unknown cut kind {name!r}; expected one of {sorted(CUT_ALIASES)}"
        )
    return CUT_ALIASES[key]
