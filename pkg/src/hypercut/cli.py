# src/hypercut/cli.py

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, settings
from .cuts import CutFunction
from .errors import HypercutError
from .harness import ExperimentConfig, run_experiment, write_report
from .hypergraph import (
    Hypergraph,
    generate_random_uniform,
    parse_hmetis,
    random_walk_transitions,
    serialize_hmetis,
)
from .pbo import (
    BinaryPolynomial,
    EncodingSpec,
    IsingModel,
    build_energy,
    degree,
    quadratize_rosenberg,
    to_ising,
)
from .schema import (
    ALL_SOLVERS,
    CUT_ALIASES,
    ENCODABLE_KINDS,
    TEXT_HEADERS,
    CutKind,
    SolverName,
    TextFormat,
    normalize_cut_kind,
)
from .solvers import QAOAParams, SAParams, exact_oracle_result, solve_instance

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_text(input_path: Optional[str]) -> str:
    if input_path and input_path != "-":
        return Path(input_path).read_text(encoding="utf-8")
    # "-" or None => stdin
    return sys.stdin.read()


def _write_text(output_path: Optional[str], text: str) -> None:
    if output_path and output_path != "-":
        Path(output_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _poly_to_json(poly: BinaryPolynomial) -> str:
    return json.dumps(
        {
            "num_vars": poly.num_vars,
            "degree": degree(poly),
            "terms": [{"vars": list(t), "coef": c} for t, c in poly.terms.items()],
        },
        indent=2,
    )


def _load_transitions(path: Optional[str], h: Hypergraph) -> np.ndarray:
    if path is None:
        return random_walk_transitions(h)
    return np.loadtxt(path, dtype=float, ndmin=2)


def _encoding_from_args(args, h: Hypergraph):
    cut = normalize_cut_kind(args.cut)
    spec = EncodingSpec(k=args.k, lam=args.lam, alpha=args.alpha, cut=cut)
    transitions = _load_transitions(args.transitions, h) if cut == CutKind.HRWC else None
    return spec, CutFunction(cut, transitions)


# --- Subcommands -------------------------------------------------


def _cmd_gen(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for index in range(args.count):
        seed = args.seed * settings.INSTANCE_SEED_MULTIPLIER + index
        h = generate_random_uniform(args.n, args.r, args.avg_degree, seed=seed)
        path = out_dir / f"n{args.n}_r{args.r}_{index:04d}.hgr"
        path.write_text(serialize_hmetis(h), encoding="utf-8")
    logger.info("Wrote %d instances to %s", args.count, out_dir)
    return EXIT_OK


def _cmd_build(args) -> int:
    h = parse_hmetis(_read_text(args.input))
    spec, f = _encoding_from_args(args, h)
    poly = build_energy(h, spec, f.transitions)
    if args.quadratize:
        poly, aux = quadratize_rosenberg(poly)
        logger.info("Quadratization added %d auxiliary variables", aux)

    if args.format == TextFormat.POLY:
        text = poly.to_text()
    elif args.format == TextFormat.ISING:
        text = to_ising(poly).to_text()
    else:
        text = _poly_to_json(poly)
    _write_text(args.output, text)
    return EXIT_OK


def _cmd_solve(args) -> int:
    h = parse_hmetis(_read_text(args.input))
    cut = normalize_cut_kind(args.cut)
    if cut not in ENCODABLE_KINDS:
        # oracle-only objectives are solved by enumeration, never encoded
        if args.solver != SolverName.EXACT:
            raise ValueError(
                f"Cut kind {cut!r} has no polynomial encoding; only --solver exact supports it"
            )
        result = exact_oracle_result(h, CutFunction(cut), args.k)
        _write_text(args.output, json.dumps(result.to_dict(), indent=2))
        return EXIT_OK

    spec, f = _encoding_from_args(args, h)
    sa_params = SAParams(
        reads=args.reads if args.reads is not None else settings.SA_NUM_READS,
        sweeps=args.sweeps if args.sweeps is not None else settings.SA_NUM_SWEEPS,
        seed=args.seed,
    )
    qaoa_params = QAOAParams(
        depth=args.depth if args.depth is not None else settings.QAOA_DEPTH,
        restarts=args.restarts if args.restarts is not None else settings.QAOA_RESTARTS,
        top_k=args.topk if args.topk is not None else settings.QAOA_TOP_K,
        seed=args.seed,
    )
    result = solve_instance(
        h, f, spec, args.solver, sa_params=sa_params, qaoa_params=qaoa_params
    )
    _write_text(args.output, json.dumps(result.to_dict(), indent=2))
    return EXIT_OK


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    if args.records:
        config.records = args.records
    out = args.out or config.output
    report = run_experiment(config)
    if out:
        write_report(report, out)
    else:
        _write_text(None, report.rows.to_csv(index=False))
    return EXIT_OK


def _cmd_convert(args) -> int:
    text = _read_text(args.input)
    first = next(
        (ln.split()[0] for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")),
        None,
    )
    if first == TEXT_HEADERS[TextFormat.POLY]:
        poly = BinaryPolynomial.from_text(text)
    elif first == TEXT_HEADERS[TextFormat.ISING]:
        poly = IsingModel.from_text(text).to_polynomial()
    else:
        raise ValueError(
            f"Unrecognized header {first!r}; expected "
            f"{TEXT_HEADERS[TextFormat.POLY]!r} or {TEXT_HEADERS[TextFormat.ISING]!r}"
        )

    if args.to == TextFormat.ISING:
        if args.quadratize:
            poly, _ = quadratize_rosenberg(poly)
        out = to_ising(poly).to_text()
    else:
        out = poly.to_text()
    _write_text(args.output, out)
    return EXIT_OK


# --- Parser ------------------------------------------------------


def _add_encoding_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-i", "--input", metavar="PATH", help="hMETIS file. Use '-' or omit for stdin.")
    p.add_argument(
        "--cut",
        default=CutKind.AON,
        choices=sorted(CUT_ALIASES),
        help="Cut objective (default: aon).",
    )
    p.add_argument("--k", type=int, default=2, help="Number of parts (default: 2).")
    p.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=settings.DEFAULT_LAMBDA,
        help="Balance-penalty weight.",
    )
    p.add_argument(
        "--alpha",
        type=float,
        default=None,
        help="One-hot validity weight (multi-way only; default: lambda*n + sum(w) + 1).",
    )
    p.add_argument(
        "--transitions",
        metavar="PATH",
        help="Whitespace-separated n x n transition matrix for hrwc "
        "(default: hypergraph random walk).",
    )
    p.add_argument("-o", "--output", metavar="PATH", help="Output file. Use '-' or omit for stdout.")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hypercut",
        description="Balanced hypergraph partitioning as penalized binary optimization.",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for progress, -vv for debug output.",
    )
    parser.add_argument(
        "-V",
        "--version",
        action="version",
        version=f"hypercut {__version__}",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    gen = sub.add_parser("gen", help="Generate random connected r-uniform hypergraphs.")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--r", type=int, default=settings.DEFAULT_EDGE_SIZE)
    gen.add_argument("--avg-degree", type=float, default=settings.DEFAULT_AVG_DEGREE)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out-dir", metavar="DIR", default=".")
    gen.set_defaults(func=_cmd_gen)

    build = sub.add_parser("build", help="Print the composed partitioning energy.")
    _add_encoding_args(build)
    build.add_argument(
        "--format",
        default=TextFormat.POLY,
        choices=[TextFormat.POLY, TextFormat.ISING, TextFormat.JSON],
    )
    build.add_argument(
        "--quadratize",
        action="store_true",
        help="Reduce to degree 2 before output (required for ising with k > 2).",
    )
    build.set_defaults(func=_cmd_build)

    solve = sub.add_parser("solve", help="Run one solver on one instance.")
    _add_encoding_args(solve)
    solve.add_argument("--solver", required=True, choices=sorted(ALL_SOLVERS))
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--reads", type=int, default=None, help="SA reads.")
    solve.add_argument("--sweeps", type=int, default=None, help="SA sweeps per read.")
    solve.add_argument("--depth", type=int, default=None, help="QAOA depth.")
    solve.add_argument("--restarts", type=int, default=None, help="QAOA optimizer restarts.")
    solve.add_argument("--topk", type=int, default=None, help="QAOA states considered.")
    solve.set_defaults(func=_cmd_solve)

    experiment = sub.add_parser("experiment", help="Run a lambda sweep from a JSON config.")
    experiment.add_argument("--config", required=True, metavar="PATH")
    experiment.add_argument("--out", metavar="PATH", help="Report path (.csv or .json).")
    experiment.add_argument("--records", metavar="PATH", help="Per-instance JSON Lines log.")
    experiment.set_defaults(func=_cmd_experiment)

    convert = sub.add_parser("convert", help="Translate polynomial text to and from Ising text.")
    convert.add_argument("-i", "--input", metavar="PATH")
    convert.add_argument("-o", "--output", metavar="PATH")
    convert.add_argument("--to", required=True, choices=[TextFormat.POLY, TextFormat.ISING])
    convert.add_argument("--quadratize", action="store_true")
    convert.set_defaults(func=_cmd_convert)

    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"hypercut: error: {exc}\n")
        return EXIT_USAGE
    except (HypercutError, ValueError) as exc:
        sys.stderr.write(f"hypercut: {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
