"""Command-line interface.

Every subcommand that writes a file also writes ``<file>.manifest.json``
next to it with the command, parameters, inputs, outputs, tool version and
wall time.  Data files themselves carry no timestamps, so identical runs
produce identical bytes.

Exit codes: 0 success, 1 computation or I/O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from gmpy2 import mpfr, mpq

from . import __version__
from .accel import SequenceData, richardson_report, write_report_csv
from .errors import StrongCouplingError
from .exact import DEFAULT_PREC, format_rational, parse_rational
from .large_order import (best_pure_cosine, fit_growth, row_signs, sign_grid_search,
                          sign_score, write_estimates_csv, write_peaks_json,
                          zeta_consistency_K)
from .lattice import ModelId, generate, load_table, save_table
from .oracles import ShootingConfig, blasius_shoot, instanton_slope
from .pade import FrobeniusSeries, approximant_sweep, write_sweep_csv
from .vpt import Strategy, VptProblem, vpt_sequence, write_vpt_csv

log = logging.getLogger("strongcoupling")

# scaling exponents of the two lattice problems
MODEL_EXPONENTS = {ModelId.INSTANTON: (-1, 2), ModelId.BLASIUS: (-2, 4)}


class Run:
    """Collects inputs and outputs of one invocation for the manifest."""

    def __init__(self, command: str, args: argparse.Namespace):
        self.command = command
        self.params = {k: _jsonable(v) for k, v in vars(args).items() if k != "func"}
        self.inputs: list = []
        self.outputs: list = []
        self.started = time.time()

    def output(self, path) -> Path:
        path = Path(path)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        self.outputs.append(str(path))
        return path

    def write_manifests(self) -> None:
        manifest = {
            "command": self.command,
            "parameters": self.params,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "tool_version": f"strongcoupling {__version__}",
            "started": datetime.fromtimestamp(self.started, timezone.utc).isoformat(),
            "wall_time_s": round(time.time() - self.started, 3),
        }
        for out in self.outputs:
            Path(out + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _jsonable(v):
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


def _rational_arg(text: str):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fmt(x, digits: int = 25) -> str:
    return f"{x:.{digits}g}"


def _load(run: Run, path):
    run.inputs.append(str(path))
    return load_table(path)


# -- subcommands --------------------------------------------------------------

def cmd_generate(args, run: Run) -> int:
    t0 = time.time()
    table = generate(args.model, args.order)
    log.info("generated %s through order %d in %.1f s", args.model, args.order, time.time() - t0)
    save_table(table, run.output(args.out), args.max_site)
    for j in range(1, min(args.show, args.order) + 1):
        print(f"a[1,{j}] = {format_rational(table.value(1, j))}")
    return 0


def cmd_pade(args, run: Run) -> int:
    table = _load(run, args.coeffs)
    n_max = args.n_max or table.max_order
    series = FrobeniusSeries(table.site_series(args.site, n_max), args.M)
    reference = mpfr(args.reference, args.prec) if args.reference else None
    sweep = approximant_sweep(series, n_max, reference, args.prec, args.jobs)
    if args.out:
        write_sweep_csv(sweep, run.output(args.out))
    for r in sweep.records[: args.show]:
        print(f"S_{r.N} = {_fmt(r.S_N.re, 12)}" + ("" if r.is_real else f" {_fmt(r.S_N.im, 12)}i"))
    m = sweep.minimum()
    if m is not None:
        print(f"first minimum: N={m.N} S={_fmt(m.S_N.re, 12)}")
    for n, direction in sweep.crossings():
        print(f"crossing: N={n} ({direction})")
    for start, end in sweep.complex_windows():
        print(f"complex window: {start}..{'end' if end is None else end - 1}"
              + ("" if end is None else f", real again at {end}"))
    if sweep.gaps:
        print(f"undefined (c_N = 0) at N = {sweep.gaps}")
    if args.richardson:
        real = [r for r in sweep.records[: args.richardson_terms] if r.is_real]
        seq = SequenceData([r.S_N.re for r in real], real[0].N)
        _print_report(richardson_report(seq, args.richardson, prec=args.prec))
    return 0


def _print_report(rows) -> None:
    for r in rows:
        print(f"richardson k={r.k}: {_fmt(r.value, 22)} {r.flag}")


def cmd_vpt(args, run: Run) -> int:
    table = _load(run, args.coeffs)
    default_p, default_q = MODEL_EXPONENTS[table.model]
    p = default_p if args.p is None else args.p
    q = default_q if args.q is None else args.q
    n_max = args.n_max or table.max_order
    problem = VptProblem(table.site_coefficients(args.site, n_max), p, q)
    strategy = Strategy(args.strategy) if args.strategy else None
    seq = vpt_sequence(problem, n_max, strategy, args.prec, args.derivative, args.jobs,
                       args.n_min)
    if args.out:
        write_vpt_csv(seq, run.output(args.out))
    for r in seq.results[-args.show:] if args.show else []:
        print(f"N={r.N} k0={_fmt(r.k0, 15)} b0={_fmt(r.b0, 20)}")
    for n, why in seq.gaps:
        print(f"N={n}: {why}")
    if args.richardson:
        rows = richardson_report(SequenceData(seq.b0_values(), seq.results[0].N),
                                 args.richardson, prec=args.prec)
        _print_report(rows)
        if args.report_out:
            write_report_csv(rows, run.output(args.report_out))
    return 0


def _read_column(path, column, index_column):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path} has no data rows")
    if column not in rows[0]:
        raise ValueError(f"{path} has no column {column!r}; columns: {list(rows[0])}")
    if "is_real" in rows[0]:
        rows = [r for r in rows if r["is_real"] == "1"]
    rows = [r for r in rows if r[column] != ""]
    if index_column not in rows[0]:
        return rows, 1
    # Richardson weights need consecutive indices: keep the longest run
    idx = [int(r[index_column]) for r in rows]
    runs, lo = [], 0
    for i in range(1, len(idx) + 1):
        if i == len(idx) or idx[i] != idx[i - 1] + 1:
            runs.append((i - lo, -lo, lo, i))
            lo = i
    _, _, lo, hi = max(runs)
    if hi - lo < len(rows):
        log.warning("using rows %d..%d of %s (longest run of consecutive indices)",
                    idx[lo], idx[hi - 1], path)
    return rows[lo:hi], idx[lo]


def cmd_richardson(args, run: Run) -> int:
    run.inputs.append(str(args.input))
    rows, start = _read_column(args.input, args.column, args.index_column)
    if args.terms:
        rows = rows[: args.terms]
    values = [mpfr(r[args.column], args.prec) for r in rows]
    report = richardson_report(SequenceData(values, start), args.k_max, args.window, args.prec)
    _print_report(report)
    if args.out:
        write_report_csv(report, run.output(args.out))
    return 0


def cmd_large_order(args, run: Run) -> int:
    table = _load(run, args.coeffs)
    n_max = args.n_max or table.max_order
    row = table.site_coefficients(args.site, n_max)
    fit = fit_growth(row, args.site, args.k_max, args.A, args.K, prec=args.prec)
    for name, rep in (("A", fit.A_report), ("K", fit.K_report), ("B", fit.B_report)):
        for r in rep:
            print(f"{name} k={r.k}: {_fmt(r.value, 15)} {r.flag}")
    print(f"K used for B: {_fmt(fit.K_used, 15)}")
    if args.out:
        write_estimates_csv(fit, run.output(args.out))
    if args.B1 is not None and args.B2 is not None:
        print(f"zeta-consistency K: {_fmt(zeta_consistency_K(args.B1, args.B2, args.prec), 10)}")
    return 0


def cmd_signfit(args, run: Run) -> int:
    table = _load(run, args.coeffs)
    terms = args.terms or table.max_order
    signs = row_signs(table.site_coefficients(args.site, terms))
    fits = []
    for a, b in args.check or []:
        fit = sign_score(signs, a, b)
        fits.append(fit)
        print(f"f({a}, {b}) = {fit.score}/{len(signs)} mismatches {list(fit.mismatches)}")
    if args.a_range and args.b_range:
        peaks = sign_grid_search(signs, args.a_range, args.b_range, args.resolution,
                                 args.refine_depth)
        for f in peaks:
            print(f"peak a={f.a:.6f} b={f.b:.5f} score {f.score} mismatches {list(f.mismatches)}")
        fits.extend(peaks)
    if args.pure_cosine:
        for f in best_pure_cosine(signs):
            print(f"pure cosine a in [{f.a_lo:.6f}, {f.a_hi:.6f}] b={f.b:.4f} "
                  f"score {f.score} mismatches {list(f.mismatches)}")
    if args.out:
        write_peaks_json(fits, run.output(args.out))
    return 0


def cmd_oracle(args, run: Run) -> int:
    if args.which == "instanton":
        print(_fmt(instanton_slope(args.epsilon, args.prec), 20))
    else:
        cfg = ShootingConfig(args.epsilon, args.L, args.h)
        print(f"{blasius_shoot(cfg):.12f}")
    return 0


def cmd_report(args, run: Run) -> int:
    from .report import build_report
    out = Path(args.out_dir)
    inputs = {}
    for model in ModelId:
        path = getattr(args, model.value)
        if path:
            run.inputs.append(str(path))
            inputs[model] = load_table(path)
    written = build_report(out, inputs, args.prec, args.jobs, args.signfit_resolution)
    for p in written:
        run.output(p)
    print((out / "summary.md").read_text())
    return 0


# -- parser -------------------------------------------------------------------

def _pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected 'a,b'")
    return float(parts[0]), float(parts[1])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=DEFAULT_PREC,
                        help="binary precision for floating results (default %(default)s)")
    common.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="strongcoupling",
        description="Lattice weak-coupling series and their strong-coupling resummation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="exact coefficient table")
    g.add_argument("--model", required=True, choices=[m.value for m in ModelId])
    g.add_argument("--order", type=int, required=True)
    g.add_argument("--out", required=True, help="JSON file; a .gz suffix compresses")
    g.add_argument("--max-site", type=int, help="store explicit values only up to this site")
    g.add_argument("--show", type=int, default=0, help="print a[1,j] for j <= SHOW")
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("pade", parents=[common], help="strong-coupling approximant sweep")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--site", type=int, default=1)
    p.add_argument("--M", type=_rational_arg, default=mpq(1, 2), help="Frobenius exponent")
    p.add_argument("--n-max", type=int)
    p.add_argument("--reference", help="value to report crossings against")
    p.add_argument("--out")
    p.add_argument("--show", type=int, default=20)
    p.add_argument("--richardson", type=int, default=0, help="Richardson orders over real S_N")
    p.add_argument("--richardson-terms", type=int, default=70)
    p.set_defaults(func=cmd_pade)

    v = sub.add_parser("vpt", parents=[common], help="variational b0 sequence")
    v.add_argument("--coeffs", required=True)
    v.add_argument("--site", type=int, default=1)
    v.add_argument("--p", type=int, help="default from the table's model")
    v.add_argument("--q", type=int, help="default from the table's model")
    v.add_argument("--n-max", type=int)
    v.add_argument("--n-min", type=int, default=1)
    v.add_argument("--strategy", choices=[s.value for s in Strategy])
    v.add_argument("--derivative", type=int, help="override the derivative order")
    v.add_argument("--out")
    v.add_argument("--show", type=int, default=5)
    v.add_argument("--richardson", type=int, default=0)
    v.add_argument("--report-out")
    v.set_defaults(func=cmd_vpt)

    r = sub.add_parser("richardson", parents=[common], help="Richardson report for a CSV column")
    r.add_argument("--input", required=True)
    r.add_argument("--column", required=True)
    r.add_argument("--index-column", default="N")
    r.add_argument("--k-max", type=int, default=6)
    r.add_argument("--window", type=int, default=10)
    r.add_argument("--terms", type=int, help="use only the first TERMS rows")
    r.add_argument("--out")
    r.set_defaults(func=cmd_richardson)

    lo = sub.add_parser("large-order", parents=[common], help="growth estimators A, K, B")
    lo.add_argument("--coeffs", required=True)
    lo.add_argument("--site", type=int, default=1)
    lo.add_argument("--n-max", type=int)
    lo.add_argument("--k-max", type=int, default=6)
    lo.add_argument("--A", type=_rational_arg, default=mpq(-3, 2),
                    help="exponent assumed for K and B (write --A=-3/2)")
    lo.add_argument("--K", help="K assumed for B (default: extrapolated K)")
    lo.add_argument("--B1", type=float)
    lo.add_argument("--B2", type=float)
    lo.add_argument("--out")
    lo.set_defaults(func=cmd_large_order)

    s = sub.add_parser("signfit", parents=[common], help="cosine sign-pattern fit")
    s.add_argument("--coeffs", required=True)
    s.add_argument("--site", type=int, default=1)
    s.add_argument("--terms", type=int)
    s.add_argument("--check", type=_pair, action="append", metavar="A,B")
    s.add_argument("--a-range", type=float, nargs=2)
    s.add_argument("--b-range", type=float, nargs=2)
    s.add_argument("--resolution", type=int, default=2000)
    s.add_argument("--refine-depth", type=int, default=3)
    s.add_argument("--pure-cosine", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_signfit)

    o = sub.add_parser("oracle", parents=[common], help="continuum reference values")
    o.add_argument("which", choices=["instanton", "blasius"])
    o.add_argument("--epsilon", type=float, default=1.0)
    o.add_argument("--L", type=float)
    o.add_argument("--h", type=float)
    o.set_defaults(func=cmd_oracle)

    rp = sub.add_parser("report", parents=[common], help="reproduce all reference tables")
    rp.add_argument("--out-dir", required=True)
    rp.add_argument("--instanton", help="existing instanton table (else generated, order 200)")
    rp.add_argument("--blasius", help="existing Blasius table (else generated, order 300)")
    rp.add_argument("--signfit-resolution", type=int, default=2000)
    rp.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    run = Run(args.command, args)
    try:
        code = args.func(args, run)
    except (StrongCouplingError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    run.write_manifests()
    return code


if __name__ == "__main__":
    sys.exit(main())
