"""Command-line front end; every command writes CSV.

Exit codes: 0 ok, 1 usage error, 2 physically invalid input, 3 verify failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys
import time
from typing import Iterable, Sequence

from . import anchors
from .distill import ad_map_block, dejmps
from .mc import McConfig, compare_to_closed_form
from .rates import GRID_POINTS
from .scan import (
    PROTOCOLS,
    RegionSummary,
    ScanRecord,
    evaluate_bb84,
    evaluate_six_state,
    grid_values,
    parse_qy_rule,
    scan1d,
    scan_region,
)
from .states import (
    Basis,
    BellDiagonal,
    InvalidStateError,
    QberTriple,
    lambdas_from_qbers,
    permute_for_key_basis,
)

EXIT_OK, EXIT_USAGE, EXIT_PHYSICS, EXIT_VERIFY = 0, 1, 2, 3

RECORD_COLUMNS = [
    "qx", "qy", "qz", "rate_X", "rate_Y", "rate_Z",
    "best_basis", "best_rate", "p_succ", "valid", "entangled",
]
SCAN1D_COLUMNS = RECORD_COLUMNS + ["fidelity", "eof"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(value) -> str:
    """Nine significant digits in scientific notation; blanks for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Basis):
        return value.value
    if isinstance(value, (int, float)):
        return f"{float(value):.8e}"
    return str(value)


def record_row(record: ScanRecord, columns: Sequence[str] = RECORD_COLUMNS) -> list[str]:
    values = {
        "qx": record.qx,
        "qy": record.qy,
        "qz": record.qz,
        "rate_X": record.rates.get(Basis.X),
        "rate_Y": record.rates.get(Basis.Y),
        "rate_Z": record.rates.get(Basis.Z),
        "best_basis": record.best_basis,
        "best_rate": record.best_rate,
        "p_succ": record.best_p_succ,
        "valid": record.valid,
        "entangled": record.entangled,
        "fidelity": record.fidelity,
        "eof": record.eof,
    }
    return [fmt(values[c]) for c in columns]


def summary_row(summary: RegionSummary) -> list[str]:
    return [
        "#summary",
        f"points={summary.points}",
        f"positive={summary.positive}",
        f"higher_qber_wins={summary.higher_qber_wins}",
        f"inverted={summary.inverted}",
    ]


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write(args, header: Sequence[str] | None, rows: Iterable[Sequence[str]]) -> None:
    with _output(args.out) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(header)
        writer.writerows(rows)


def _state_from_args(args) -> BellDiagonal:
    if getattr(args, "lambdas", None):
        return BellDiagonal.from_sequence(args.lambdas)
    if None in (args.qx, args.qy, args.qz):
        raise UsageError("give --qx --qy --qz or --lambdas")
    return lambdas_from_qbers(QberTriple(args.qx, args.qy, args.qz))


def cmd_rate(args) -> int:
    if args.protocol == "bb84":
        if args.qx is None or args.qz is None:
            raise UsageError("bb84 needs --qx and --qz")
        record = evaluate_bb84(args.qx, args.qz, args.basis, args.block, args.f, args.grid_points)
    else:
        if None in (args.qx, args.qy, args.qz):
            raise UsageError("six-state needs --qx --qy --qz")
        q = QberTriple(args.qx, args.qy, args.qz)
        record = evaluate_six_state(q, args.basis, args.block, args.f)
    _write(args, RECORD_COLUMNS, [record_row(record)])
    return EXIT_OK


def cmd_scan1d(args) -> int:
    if args.protocol != "six-state":
        raise UsageError("scan1d sweeps the Y-basis QBER of the six-state protocol")
    try:
        qys = grid_values(args.qy_min, args.qy_max, args.qy_step, open_interval=False)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not qys:
        raise UsageError("empty qy range")
    records = scan1d(args.qx, args.qz, qys, args.basis, args.block, args.f)
    _write(args, SCAN1D_COLUMNS, (record_row(r, SCAN1D_COLUMNS) for r in records))
    return EXIT_OK


def cmd_scan_region(args) -> int:
    qy_rule = None
    if args.protocol == "six-state":
        if args.qy_rule is None:
            raise UsageError("six-state region scans need --qy-rule (rank3, worst or a number)")
        qy_rule = parse_qy_rule(args.qy_rule)
    try:
        values = grid_values(args.lo, args.hi, args.step, open_interval=True)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not values:
        raise UsageError("grid is empty; reduce --step")
    records = scan_region(
        values, args.protocol, qy_rule, args.basis, args.block, args.f, args.grid_points
    )
    rows = [record_row(r) for r in records]
    rows.append(summary_row(RegionSummary.from_records(records)))
    _write(args, RECORD_COLUMNS, rows)
    return EXIT_OK


def cmd_distill(args) -> int:
    s = _state_from_args(args)
    if args.mode == "dejmps":
        outcome = dejmps(s)
        block, basis = 2, ""
    else:
        outcome = ad_map_block(permute_for_key_basis(s, args.basis), args.block)
        block, basis = args.block, args.basis
    out = outcome.out.as_tuple() if outcome.defined else (None,) * 4
    header = ["mode", "block", "basis", "p_succ", "l00", "l01", "l10", "l11", "fidelity"]
    row = [args.mode, str(block), basis, fmt(outcome.p_succ), *map(fmt, out), fmt(out[0])]
    _write(args, header, [row])
    return EXIT_OK


MC_COLUMNS = [
    "q", "b", "blocks", "seed", "p_succ", "p_succ_hat", "p_succ_z",
    "qber", "qber_hat", "qber_z", "pass",
]


def cmd_mc(args) -> int:
    if args.q is not None:
        # Any state with this Z-basis QBER has the same block statistics.
        s = BellDiagonal(1 - args.q, 0.0, args.q, 0.0)
    else:
        s = permute_for_key_basis(_state_from_args(args), args.basis)
    q = s.l10 + s.l11
    cfg = McConfig(q, args.blocks, args.block, args.seed)
    report = compare_to_closed_form(cfg, s, transcript=args.transcript)
    row = [
        fmt(report.q), str(report.b), str(report.blocks), str(report.seed),
        fmt(report.p_succ), fmt(report.p_succ_hat), fmt(report.p_succ_z),
        fmt(report.qber), fmt(report.qber_hat), fmt(report.qber_z), fmt(report.passed),
    ]
    _write(args, MC_COLUMNS, [row])
    return EXIT_OK


def cmd_verify(args) -> int:
    rows, failed = [], 0
    for anchor in anchors.all_anchors(args.region_step):
        start = time.perf_counter()
        result = anchor()
        elapsed = time.perf_counter() - start
        failed += not result.passed
        rows.append([result.name, result.expected, result.computed,
                     "pass" if result.passed else "FAIL", f"{elapsed:.3f}"])
    _write(args, ["anchor", "expected", "computed", "status", "seconds"], rows)
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--grid-points", type=int, default=GRID_POINTS,
                        help="grid density of the worst-case qy search")

    rate_opts = _Parser(add_help=False)
    rate_opts.add_argument("--protocol", choices=PROTOCOLS, default="six-state")
    rate_opts.add_argument("--basis", choices=["X", "Y", "Z", "best"], default="best")
    rate_opts.add_argument("--block", type=int, default=1, help="advantage distillation block size")
    rate_opts.add_argument("--f", type=float, default=1.0, help="reconciliation efficiency >= 1")

    state_opts = _Parser(add_help=False)
    state_opts.add_argument("--qx", type=float)
    state_opts.add_argument("--qy", type=float)
    state_opts.add_argument("--qz", type=float)

    parser = _Parser(prog="qkdrates", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", parents=[common, rate_opts, state_opts],
                       help="key rates at one QBER point")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("scan1d", parents=[common, rate_opts],
                       help="sweep qy at fixed qx, qz")
    p.add_argument("--qx", type=float, required=True)
    p.add_argument("--qz", type=float, required=True)
    p.add_argument("--qy-min", type=float, default=0.0)
    p.add_argument("--qy-max", type=float, required=True)
    p.add_argument("--qy-step", type=float, default=0.001)
    p.set_defaults(func=cmd_scan1d)

    p = sub.add_parser("scan-region", parents=[common, rate_opts],
                       help="square grid over (qx, qz), bounds excluded")
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=0.5)
    p.add_argument("--step", type=float, default=0.005)
    p.add_argument("--qy-rule", help="six-state only: rank3 (qy = qx + qz), worst, or a number")
    p.set_defaults(func=cmd_scan_region)

    p = sub.add_parser("distill", parents=[common, state_opts],
                       help="advantage distillation or DEJMPS on one state")
    p.add_argument("--lambdas", type=float, nargs=4, metavar=("L00", "L01", "L10", "L11"))
    p.add_argument("--mode", choices=["ad", "dejmps"], default="ad")
    p.add_argument("--block", type=int, default=2)
    p.add_argument("--basis", choices=["X", "Y", "Z"], default="Z",
                   help="key basis rotated into Z before the ad map")
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("mc", parents=[common, state_opts],
                       help="Monte-Carlo check of acceptance and post-distillation QBER")
    p.add_argument("--q", type=float, help="key-basis QBER (instead of a full state)")
    p.add_argument("--basis", choices=["X", "Y", "Z"], default="Z")
    p.add_argument("--block", type=int, default=2)
    p.add_argument("--blocks", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transcript", action="store_true",
                   help="simulate full bit transcripts instead of error patterns")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("verify", parents=[common], help="check every published anchor")
    p.add_argument("--region-step", type=float, default=0.005)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidStateError as exc:
        print(f"qkdrates: invalid state: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"qkdrates: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
