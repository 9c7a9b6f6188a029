"""Command-line entry point and the error-versus-samples benchmark.

    mubtrace bench --input ca-GrQc.txt --format snap --task triangles \\
        --estimators mubs,hutchinson,gaussian --samples 1,10,100 --out grqc.csv
    mubtrace trace matrix.mtx --estimator mubs --samples 100
    mubtrace triangles graph.txt --estimator hutchinson --samples 50
    mubtrace mub 7 verify
    mubtrace table matrix.mtx

Exit status: 0 on success, 1 on usage errors, 2 on I/O or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analysis import (enumerate_variance, analytic_variance, format_variance_table,
                       variance_reports)
from .estimators import EstimatorKind, estimate_trace, prepare_oracle
from .graphs import (ParseError, estimate_triangles, exact_triangle_count,
                     parse_snap_edge_list, triangle_oracle)
from .io import load_matrix_market
from .mub import NotPrimeError, generate_mub_family, verify_mub_family, write_family_csv
from .oracle import DenseOracle, SparseOracle

DEFAULT_SAMPLES = (1, 2, 5, 10, 20, 50, 100)
DEFAULT_TRIALS = 500
CSV_HEADER = ("estimator", "samples", "mean_abs_rel_err", "std_abs_rel_err", "mean_bits")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


@dataclass
class ExperimentConfig:
    input: Path
    format: str = "snap"
    task: str = "triangles"
    estimators: Sequence[EstimatorKind] = tuple(EstimatorKind)
    sample_counts: Sequence[int] = DEFAULT_SAMPLES
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    out: Optional[Path] = None
    count_real_equivalents: bool = False

    def __post_init__(self):
        self.input = Path(self.input)
        self.estimators = tuple(EstimatorKind.parse(k) for k in self.estimators)
        self.sample_counts = tuple(int(s) for s in self.sample_counts)
        if self.format not in ("matrix-market", "snap"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.task not in ("trace", "triangles"):
            raise UsageError(f"unknown task {self.task!r}")
        if self.task == "triangles" and self.format != "snap":
            raise UsageError("the triangles task needs a snap edge list")
        if not self.sample_counts or any(s < 1 for s in self.sample_counts):
            raise UsageError("sample counts must be positive")
        if any(b <= a for a, b in zip(self.sample_counts, self.sample_counts[1:])):
            raise UsageError("sample counts must be strictly ascending")
        if self.trials < 1:
            raise UsageError("trials must be at least 1")
        if not self.estimators:
            raise UsageError("no estimators selected")


@dataclass(frozen=True)
class BenchmarkRow:
    estimator: str
    samples: int
    mean_abs_rel_err: float
    std_abs_rel_err: float
    mean_bits: float

    def csv_fields(self):
        return [self.estimator, str(self.samples), f"{self.mean_abs_rel_err:.12g}",
                f"{self.std_abs_rel_err:.12g}", f"{self.mean_bits:.12g}"]


def _load_graph(path: Path):
    try:
        return parse_snap_edge_list(path)
    except (OSError, UnicodeDecodeError, ParseError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_matrix(path: Path):
    try:
        return load_matrix_market(path)
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _exact_trace(oracle) -> float:
    if isinstance(oracle, (DenseOracle, SparseOracle)):
        return oracle.trace()
    raise InputError("exact reference trace unavailable for this input")


def probes_for_budget(kind: EstimatorKind, samples: int, count_real_equivalents: bool) -> int:
    """Probe vectors drawn for a sample budget; a complex probe costs two real evaluations."""
    if count_real_equivalents and kind is EstimatorKind.MUBS:
        return max(1, samples // 2)
    return samples


def run_benchmark(config: ExperimentConfig) -> list[BenchmarkRow]:
    """Mean and spread of |estimate - exact| / exact over independent trials.

    Trial ``t`` of cell ``(estimator, samples)`` uses streams keyed
    ``(seed, estimator, samples, t, i)``, so every cell is reproducible alone.
    """
    if config.task == "triangles":
        graph = _load_graph(config.input)
        oracle = triangle_oracle(graph)
        exact = 6.0 * exact_triangle_count(graph)
    else:
        oracle = _load_matrix(config.input)
        exact = _exact_trace(oracle)
    if exact == 0:
        raise InputError("exact reference is zero; relative error undefined")

    rows = []
    for kind in config.estimators:
        prepared = prepare_oracle(oracle, kind)
        for s in config.sample_counts:
            probes = probes_for_budget(kind, s, config.count_real_equivalents)
            errs = np.empty(config.trials)
            bits = np.empty(config.trials)
            for t in range(config.trials):
                est = estimate_trace(prepared, kind, probes, config.seed,
                                     stream_prefix=(kind.code, s, t))
                errs[t] = abs(est.mean - exact) / abs(exact)
                bits[t] = est.total_bits
            rows.append(BenchmarkRow(
                kind.value, s, math.fsum(errs) / errs.size,
                float(np.std(errs)), math.fsum(bits) / bits.size))
    if config.out is not None:
        write_benchmark_csv(rows, config.out)
    return rows


def format_benchmark_csv(rows: Sequence[BenchmarkRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def write_benchmark_csv(rows: Sequence[BenchmarkRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_benchmark_csv(rows))


def _format_rows(rows: Sequence[BenchmarkRow]) -> str:
    lines = [f"{'estimator':<11} {'samples':>7} {'mean|rel err|':>14} {'std':>12} {'bits':>12}"]
    for r in rows:
        lines.append(f"{r.estimator:<11} {r.samples:>7} {r.mean_abs_rel_err:>14.6g} "
                     f"{r.std_abs_rel_err:>12.6g} {r.mean_bits:>12.6g}")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _kind_list(text: str) -> list[EstimatorKind]:
    try:
        return [EstimatorKind.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _kind(text: str) -> EstimatorKind:
    try:
        return EstimatorKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mubtrace", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bench", help="error versus sample count over repeated trials")
    b.add_argument("--input", required=True, type=Path)
    b.add_argument("--format", choices=["matrix-market", "snap"])
    b.add_argument("--task", choices=["trace", "triangles"])
    b.add_argument("--estimators", type=_kind_list, default=list(EstimatorKind))
    b.add_argument("--samples", type=_int_list, default=list(DEFAULT_SAMPLES))
    b.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", type=Path)
    b.add_argument("--count-real-equivalents", action="store_true",
                   help="book each complex probe as two real quadratic-form evaluations")

    t = sub.add_parser("trace", help="estimate the trace of a Matrix Market matrix")
    t.add_argument("input", type=Path)
    t.add_argument("--estimator", type=_kind, default=EstimatorKind.MUBS)
    t.add_argument("--samples", type=int, default=100)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--enumerate", action="store_true",
                   help="average over every probe exactly (fixed and mubs only)")

    g = sub.add_parser("triangles", help="estimate the triangle count of an edge list")
    g.add_argument("input", type=Path)
    g.add_argument("--estimator", type=_kind, default=EstimatorKind.MUBS)
    g.add_argument("--samples", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--no-exact", action="store_true", help="skip the exact count")

    m = sub.add_parser("mub", help="verify or dump the MUB family of a prime dimension")
    m.add_argument("p", type=int)
    m.add_argument("action", choices=["verify", "dump"])
    m.add_argument("--tol", type=float, default=1e-10)
    m.add_argument("--out", type=Path)

    v = sub.add_parser("table", help="variance and randomness table for a small matrix")
    v.add_argument("input", type=Path)
    return parser


def _infer_format(path: Path) -> str:
    return "matrix-market" if path.suffix.lower() in (".mtx", ".mm") else "snap"


def _cmd_bench(args, out) -> int:
    fmt = args.format or _infer_format(args.input)
    task = args.task or ("triangles" if fmt == "snap" else "trace")
    config = ExperimentConfig(args.input, fmt, task, args.estimators, args.samples,
                              args.trials, args.seed, args.out,
                              args.count_real_equivalents)
    rows = run_benchmark(config)
    if args.out is None:
        out.write(format_benchmark_csv(rows))
    else:
        print(_format_rows(rows), file=out)
    return 0


def _cmd_trace(args, out) -> int:
    oracle = _load_matrix(args.input)
    kind = args.estimator
    small = isinstance(oracle, DenseOracle) and oracle.dim <= 1000
    if args.enumerate:
        if kind not in (EstimatorKind.FIXED, EstimatorKind.MUBS):
            raise UsageError("--enumerate supports the fixed and mubs estimators only")
        target = prepare_oracle(oracle, kind)
        mean, var = enumerate_variance(target, kind, cap=max(target.dim, 1))
        print(f"estimator        {kind.value}", file=out)
        print(f"exact mean       {mean:.12g}", file=out)
        print(f"exact variance   {var:.12g}", file=out)
    else:
        if args.samples < 1:
            raise UsageError("--samples must be positive")
        est = estimate_trace(oracle, kind, args.samples, args.seed)
        print(f"estimator        {kind.value}", file=out)
        print(f"dimension        {est.dim}", file=out)
        print(f"samples          {est.samples}", file=out)
        print(f"mean             {est.mean:.12g}", file=out)
        print(f"sample variance  {est.sample_variance:.12g}", file=out)
        print(f"bits used        {est.total_bits}", file=out)
        if est.theoretical_bits is not None:
            print(f"bits (minimum)   {est.theoretical_bits}", file=out)
    if isinstance(oracle, (DenseOracle, SparseOracle)):
        print(f"exact trace      {oracle.trace():.12g}", file=out)
    if small:
        print(f"analytic var     {analytic_variance(kind, oracle):.12g}", file=out)
    return 0


def _cmd_triangles(args, out) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    graph = _load_graph(args.input)
    exact = None if args.no_exact else exact_triangle_count(graph)
    est = estimate_triangles(graph, args.estimator, args.samples, args.seed, exact)
    print(f"vertices         {graph.num_vertices}", file=out)
    print(f"edges            {graph.num_edges}", file=out)
    print(f"estimator        {args.estimator.value}", file=out)
    print(f"samples          {est.samples}", file=out)
    print(f"estimate         {est.estimate:.12g}", file=out)
    print(f"bits used        {est.total_bits}", file=out)
    if exact is not None:
        print(f"exact            {exact}", file=out)
        if est.abs_rel_error is not None:
            print(f"relative error   {est.abs_rel_error:.6g}", file=out)
    return 0


def _cmd_mub(args, out) -> int:
    try:
        family = generate_mub_family(args.p)
    except NotPrimeError as exc:
        raise UsageError(str(exc)) from exc
    if args.action == "verify":
        report = verify_mub_family(family, args.tol)
        print(f"dimension               {family.p}", file=out)
        print(f"bases                   {family.num_bases}", file=out)
        print(f"max orthonormality err  {report.max_orthonormality_error:.3e}", file=out)
        print(f"max unbiasedness err    {report.max_unbiasedness_error:.3e}", file=out)
        print("pass" if report.passed else "FAIL", file=out)
        return 0 if report.passed else 1
    if args.out is None:
        write_family_csv(family, out)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_family_csv(family, fh)
    return 0


def _cmd_table(args, out) -> int:
    oracle = _load_matrix(args.input)
    matrix = oracle.matrix.toarray() if isinstance(oracle, SparseOracle) else oracle.matrix
    print(format_variance_table(variance_reports(matrix)), file=out)
    return 0


_COMMANDS = {"bench": _cmd_bench, "trace": _cmd_trace, "triangles": _cmd_triangles,
             "mub": _cmd_mub, "table": _cmd_table}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"mubtrace: error: {exc}", file=sys.stderr)
        return 1
    except (InputError, OSError) as exc:
        print(f"mubtrace: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
