"""
Experiment harness: dataset generation, lambda sweeps over solvers,
feasibility / optimality rates with run-level standard errors, and report
output.
"""

import json
import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import jsonlines
import numpy as np
import pandas as pd

from . import settings
from .cuts import CutFunction
from .errors import InstanceTooLargeError
from .hypergraph import generate_random_uniform, random_walk_transitions
from .pbo import EncodingSpec, build_energy
from .schema import ALL_SOLVERS, CutKind, SolverName, normalize_cut_kind
from .solvers import QAOAParams, SAParams, exact_balanced, solve_instance

logger = logging.getLogger(__name__)

GROUP_KEYS = ["solver", "lambda", "n"]


@dataclass
class ExperimentConfig:
    """
    One lambda sweep over generated instances.

    Field names double as the keys of the flat JSON config file.
    """

    n_values: List[int] = field(default_factory=lambda: list(settings.EXPERIMENT_N_VALUES))
    instances: int = field(default_factory=lambda: settings.EXPERIMENT_INSTANCES)
    runs: int = field(default_factory=lambda: settings.EXPERIMENT_RUNS)
    lambda_values: List[float] = field(
        default_factory=lambda: list(settings.EXPERIMENT_LAMBDAS)
    )
    solvers: List[str] = field(default_factory=lambda: list(settings.EXPERIMENT_SOLVERS))
    cut: str = CutKind.AON
    k: int = 2
    edge_size: int = field(default_factory=lambda: settings.DEFAULT_EDGE_SIZE)
    avg_degree: float = field(default_factory=lambda: settings.DEFAULT_AVG_DEGREE)
    output: Optional[str] = None
    base_seed: int = field(default_factory=lambda: settings.EXPERIMENT_BASE_SEED)
    alpha: Optional[float] = None
    sa_reads: int = field(default_factory=lambda: settings.SA_NUM_READS)
    sa_sweeps: int = field(default_factory=lambda: settings.SA_NUM_SWEEPS)
    qaoa_depth: int = field(default_factory=lambda: settings.QAOA_DEPTH)
    qaoa_restarts: int = field(default_factory=lambda: settings.QAOA_RESTARTS)
    qaoa_max_iter: int = field(default_factory=lambda: settings.QAOA_MAX_ITER)
    top_k: int = field(default_factory=lambda: settings.QAOA_TOP_K)
    record_timing: bool = True
    records: Optional[str] = None

    def __post_init__(self):
        self.cut = normalize_cut_kind(self.cut)
        self.n_values = [int(n) for n in self.n_values]
        self.lambda_values = [float(lam) for lam in self.lambda_values]

        for name in ("instances", "runs", "sa_reads", "sa_sweeps", "qaoa_depth",
                     "qaoa_restarts", "qaoa_max_iter", "top_k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.n_values or not self.lambda_values or not self.solvers:
            raise ValueError("n_values, lambda_values and solvers must be non-empty")
        unknown = set(self.solvers) - ALL_SOLVERS
        if unknown:
            raise ValueError(f"Unknown solvers {sorted(unknown)}; expected {sorted(ALL_SOLVERS)}")
        if min(self.n_values) < self.k:
            raise ValueError(f"Every n must be at least k={self.k}")
        # validates cut/k/lambda/alpha together
        for lam in self.lambda_values:
            self.encoding(lam)
        self._check_caps()

    def _check_caps(self) -> None:
        n_max = max(self.n_values)
        # the exact optimum is the reference for every solver
        if n_max * math.log2(self.k) > settings.EXACT_MAX_BITS:
            raise InstanceTooLargeError(
                f"n={n_max}, k={self.k} exceeds the exhaustive-search guard"
            )
        if SolverName.QAOA in self.solvers:
            qubits = self.encoding(self.lambda_values[0]).num_vars(n_max)
            if qubits > settings.QAOA_MAX_QUBITS:
                raise InstanceTooLargeError(
                    f"QAOA needs {qubits} qubits at n={n_max}; "
                    f"the simulator cap is {settings.QAOA_MAX_QUBITS}"
                )

    def encoding(self, lam: float) -> EncodingSpec:
        return EncodingSpec(k=self.k, lam=lam, alpha=self.alpha, cut=self.cut)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"Unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise ValueError(f"Config {path} must be a JSON object")
        return cls.from_dict(data)


@dataclass
class ExperimentReport:
    """Aggregated rows (one per solver, lambda, n) plus per-instance records."""

    rows: pd.DataFrame
    records: List[Dict[str, Any]] = field(default_factory=list)


def _standard_error(values: pd.Series) -> float:
    if len(values) < 2:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(len(values)))


def aggregate_records(
    records: Sequence[Mapping[str, Any]], record_timing: bool = True
) -> pd.DataFrame:
    """
    Per-run rates first, then mean and standard error across runs.

    Optimality counts instances that are feasible and hit the optimum, so a
    run without feasible results scores 0.
    """
    if not records:
        return pd.DataFrame(columns=settings.REPORT_COLUMNS)

    df = pd.DataFrame.from_records(list(records))
    per_run = (
        df.groupby(GROUP_KEYS + ["run"], sort=True)
        .agg(
            feasibility=("feasible", "mean"),
            optimality=("optimal", "mean"),
            seconds=("seconds", "mean"),
        )
        .reset_index()
    )
    rows = (
        per_run.groupby(GROUP_KEYS, sort=True)
        .agg(
            feasibility_mean=("feasibility", "mean"),
            feasibility_se=("feasibility", _standard_error),
            optimality_mean=("optimality", "mean"),
            optimality_se=("optimality", _standard_error),
            mean_seconds=("seconds", "mean"),
        )
        .reset_index()
    )
    if not record_timing:
        rows["mean_seconds"] = 0.0
    rows = rows.sort_values(GROUP_KEYS, kind="mergesort").reset_index(drop=True)
    return rows[settings.REPORT_COLUMNS]


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """
    Generate, solve and score every (run, n, instance, lambda, solver).

    Each run re-samples its instances from ``run_seed``; the exact balanced
    optimum of an instance is computed once and shared by all lambdas and
    solvers.
    """
    records: List[Dict[str, Any]] = []
    for run in range(config.runs):
        run_seed = config.base_seed * settings.RUN_SEED_MULTIPLIER + run
        for n in config.n_values:
            logger.info("run %d/%d: n=%d, %d instances", run + 1, config.runs, n, config.instances)
            for index in range(config.instances):
                instance_seed = run_seed * settings.INSTANCE_SEED_MULTIPLIER + index
                records.extend(
                    _score_instance(config, run, n, index, instance_seed)
                )

    if config.records:
        write_records(records, config.records)
    return ExperimentReport(
        rows=aggregate_records(records, config.record_timing), records=records
    )


def _score_instance(
    config: ExperimentConfig, run: int, n: int, index: int, seed: int
) -> List[Dict[str, Any]]:
    h = generate_random_uniform(n, config.edge_size, config.avg_degree, seed=seed)
    transitions = random_walk_transitions(h) if config.cut == CutKind.HRWC else None
    f = CutFunction(config.cut, transitions)
    reference = exact_balanced(h, f, config.k)
    optimum = reference[0]

    out = []
    for lam in config.lambda_values:
        spec = config.encoding(lam)
        poly = build_energy(h, spec, transitions)
        for solver in config.solvers:
            result = solve_instance(
                h,
                f,
                spec,
                solver,
                sa_params=SAParams(
                    reads=config.sa_reads, sweeps=config.sa_sweeps, seed=seed
                ),
                qaoa_params=QAOAParams(
                    depth=config.qaoa_depth,
                    restarts=config.qaoa_restarts,
                    max_iter=config.qaoa_max_iter,
                    top_k=config.top_k,
                    seed=seed,
                ),
                poly=poly,
                reference=reference,
            )
            optimal = (
                result.feasible
                and result.cut_value is not None
                and abs(result.cut_value - optimum) <= settings.OPTIMALITY_TOLERANCE
            )
            out.append(
                {
                    "solver": solver,
                    "lambda": lam,
                    "n": n,
                    "run": run,
                    "instance": index,
                    "seed": seed,
                    "cut": result.cut_value,
                    "optimum": optimum,
                    "energy": result.energy,
                    "feasible": bool(result.feasible),
                    "optimal": bool(optimal),
                    "seconds": result.metadata["seconds"] if config.record_timing else 0.0,
                }
            )
    return out


def conditional_optimality(records: Sequence[Mapping[str, Any]]) -> pd.DataFrame:
    """
    Fraction of feasible results that hit the optimum, per (solver, lambda, n).

    Groups without any feasible result get NaN.
    """
    columns = GROUP_KEYS + ["feasible_count", "optimal_count", "conditional_optimality"]
    if not records:
        return pd.DataFrame(columns=columns)
    df = pd.DataFrame.from_records(list(records))
    rows = (
        df.groupby(GROUP_KEYS, sort=True)
        .agg(feasible_count=("feasible", "sum"), optimal_count=("optimal", "sum"))
        .reset_index()
    )
    rows["conditional_optimality"] = np.where(
        rows["feasible_count"] > 0,
        rows["optimal_count"] / rows["feasible_count"].where(rows["feasible_count"] > 0, 1),
        np.nan,
    )
    return rows[columns]


def emit_report(report: ExperimentReport, fmt: str = "csv") -> bytes:
    """Serialize the report rows as CSV (exact column order) or a JSON list."""
    rows = report.rows
    if rows.empty:
        rows = pd.DataFrame(columns=settings.REPORT_COLUMNS)
    rows = rows[settings.REPORT_COLUMNS]
    if fmt == "csv":
        return rows.to_csv(index=False).encode("utf-8")
    if fmt == "json":
        return json.dumps(
            [
                {col: _plain(value) for col, value in record.items()}
                for record in rows.to_dict(orient="records")
            ],
            indent=2,
        ).encode("utf-8")
    raise ValueError(f"Unknown report format {fmt!r}; expected 'csv' or 'json'")


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    return value


def write_report(report: ExperimentReport, path) -> Path:
    """Write the report, choosing JSON for a ``.json`` suffix and CSV otherwise."""
    path = Path(path)
    fmt = "json" if path.suffix.lower() == ".json" else "csv"
    path.write_bytes(emit_report(report, fmt))
    logger.info("Wrote %d report rows to %s", len(report.rows), path)
    return path


def write_records(records: Sequence[Mapping[str, Any]], path) -> None:
    with jsonlines.open(path, mode="w") as writer:
        writer.write_all([{k: _plain(v) for k, v in r.items()} for r in records])
    logger.info("Wrote %d instance records to %s", len(records), path)


def read_records(path) -> List[Dict[str, Any]]:
    with jsonlines.open(path) as reader:
        return list(reader)
