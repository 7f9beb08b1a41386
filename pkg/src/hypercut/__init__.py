from importlib.metadata import PackageNotFoundError, version

from . import settings
from .cuts import CutFunction, total_cut
from .errors import (
    GenerationError,
    HypercutError,
    HypergraphFormatError,
    InfeasibleInputError,
    InstanceTooLargeError,
)
from .hypergraph import (
    Hypergraph,
    NodePartition,
    generate_random_uniform,
    parse_hmetis,
    serialize_hmetis,
)
from .pbo import BinaryPolynomial, EncodingSpec, IsingModel, build_energy, to_ising
from .schema import CutKind, SolverName


def _get_package_version() -> str:
    """Return installed version of hypercut, or 'unknown'."""
    try:
        return version("hypercut")
    except PackageNotFoundError:
        return "unknown"


__version__ = _get_package_version()

__all__ = [
    "BinaryPolynomial",
    "CutFunction",
    "CutKind",
    "EncodingSpec",
    "GenerationError",
    "HypercutError",
    "Hypergraph",
    "HypergraphFormatError",
    "InfeasibleInputError",
    "InstanceTooLargeError",
    "IsingModel",
    "NodePartition",
    "SolverName",
    "build_energy",
    "generate_random_uniform",
    "parse_hmetis",
    "serialize_hmetis",
    "settings",
    "to_ising",
    "total_cut",
    "__version__",
]
