"""Command-line surface: fit, eval, sweep, plunge, bench.

Conventions
-----------
stdout carries data (CSV or JSON), stderr carries human text.  Exit
codes classify failures: 1 usage or bad parameter values, 2 I/O or
malformed input files, 3 solver did not converge (outputs are still
written), 4 the randomized sketch failed twice.

Sample files are plain text: a header line ``# fourex-samples v1,
m=<int>`` followed by 2m+1 lines ``<l> <value>`` for l = -m..m, where
value is the raw sample f(l/m) (the 1/sqrt(m) data weight is applied
internally).  Coefficient files are JSON objects with keys schema
("fourex-coeffs-v1"), T ("p/q" as given), n, re, im.

The extension parameter --T accepts "p/q" or a decimal and is echoed
back verbatim in outputs.  CSV numbers use 17 significant digits so
doubles round-trip exactly.  FOUREX_SEED overrides the default --seed.
"""

import argparse
import json
import math
import os
import re
import statistics
import sys

import numpy as np

from .approx import SQUARE, by_name, convergence_sweep, evaluate, sample, sup_error
from .errors import FourexError, NotConverged, SketchFailure
from .operator import Coefficients, SampleVector, values_of
from .params import DEFAULT_TAU, ProblemConfig, as_ratio, resolve
from .plunge import pdpss_triplets, plunge_window
from .solver import solve_explicit, solve_implicit, solve_tsvd_dense

SWEEP_COLUMNS = "method,T,gamma,N,M,L,tau,sup_error,residual,plunge_size,wall_seconds"
BENCH_COLUMNS = "method,T,gamma,N,M,L,repeats,median_seconds"


class _UsageError(Exception):
    """Bad flag combination or value; exit 1."""


class _InputError(Exception):
    """Missing or malformed input file; exit 2."""


def _fmt(v):
    return format(float(v), ".17g")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is the I/O code here
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _resolved_seed(args):
    if args.seed is not None:
        return args.seed
    raw = os.environ.get("FOUREX_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"FOUREX_SEED must be an integer, got {raw!r}") from None


def _run_solver(config, b, method, seed):
    if method == "explicit":
        return solve_explicit(config, b, config.tau)
    if method == "implicit":
        return solve_implicit(config, b, config.tau, seed=seed)
    return solve_tsvd_dense(config, b, config.tau)


def _read_samples(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as err:
        raise _InputError(f"cannot read {path}: {err}") from None
    if not lines or not lines[0].startswith("# fourex-samples v1"):
        raise _InputError(f"{path}: missing '# fourex-samples v1' header")
    match = re.search(r"m=(\d+)\s*$", lines[0])
    if match is None:
        raise _InputError(f"{path}: header does not declare m=<int>")
    m = int(match.group(1))
    rows = lines[1:]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != 2 * m + 1:
        raise _InputError(f"{path}: expected {2 * m + 1} rows for m={m}, got {len(rows)}")
    values = np.empty(2 * m + 1)
    for i, row in enumerate(rows):
        parts = row.split()
        try:
            l, value = int(parts[0]), float(parts[1])
        except (ValueError, IndexError):
            raise _InputError(f"{path}: malformed row {i + 2}: {row!r}") from None
        if l != i - m:
            raise _InputError(f"{path}: row {i + 2} has l={l}, expected {i - m}")
        values[i] = value
    return m, values


def write_samples(path, m, values):
    """Inverse of the sample-file reader; values are raw f(l/m)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# fourex-samples v1, m={m}\n")
        for l, value in zip(range(-m, m + 1), values):
            fh.write(f"{l} {_fmt(value)}\n")


def _coeffs_payload(coefficients, T_raw, n):
    vals = np.asarray(values_of(coefficients), dtype=np.complex128)
    return {
        "schema": "fourex-coeffs-v1",
        "T": T_raw,
        "n": n,
        "re": [float(v) for v in vals.real],
        "im": [float(v) for v in vals.imag],
    }


def _read_coeffs(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        raise _InputError(f"cannot read {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise _InputError(f"{path}: not valid JSON: {err}") from None
    if not isinstance(data, dict) or data.get("schema") != "fourex-coeffs-v1":
        raise _InputError(f"{path}: expected schema 'fourex-coeffs-v1'")
    try:
        n = int(data["n"])
        T = as_ratio(str(data["T"]))
        re_part = np.asarray(data["re"], dtype=np.float64)
        im_part = np.asarray(data["im"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as err:
        raise _InputError(f"{path}: malformed coefficient file: {err}") from None
    if re_part.shape != (2 * n + 1,) or im_part.shape != (2 * n + 1,):
        raise _InputError(f"{path}: re/im must have length 2n+1 = {2 * n + 1}")
    return Coefficients(values=re_part + 1j * im_part, T=T)


def _cmd_fit(args):
    seed = _resolved_seed(args)
    if args.func is not None:
        f = by_name(args.func)
        config = resolve(args.T, args.n, args.gamma, args.tau)
        b = sample(f, config)
    else:
        f = None
        if args.n < 1:
            raise _UsageError(f"--n must be >= 1, got {args.n}")
        m, raw = _read_samples(args.samples)
        config = ProblemConfig(
            n=args.n, m=m, T=as_ratio(args.T), gamma=m / args.n, tau=args.tau
        )
        b = SampleVector(values=raw / math.sqrt(m))

    converged = True
    try:
        report = _run_solver(config, b, args.method, seed)
    except NotConverged as err:
        report = err.report
        converged = False

    payload = json.dumps(_coeffs_payload(report.coefficients, args.T, config.n))
    parts = [
        f"method={report.method}",
        f"T={args.T}",
        f"N={config.N}",
        f"M={config.M}",
        f"L={config.L}",
        f"residual={report.residual_l2:.6e}",
    ]
    if f is not None:
        parts.append(f"sup_error={sup_error(f, report.coefficients, config):.6e}")
    parts.append(f"wall_seconds={report.wall_seconds:.4f}")
    parts.append(f"converged={'yes' if converged else 'no'}")
    line = " ".join(parts)

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        print(line)
    else:
        print(payload)
        print(line, file=sys.stderr)
    return 0 if converged else 3


def _cmd_eval(args):
    coeffs = _read_coeffs(args.coeffs)
    if args.points is not None:
        try:
            with open(args.points, encoding="utf-8") as fh:
                tokens = fh.read().split()
        except OSError as err:
            raise _InputError(f"cannot read {args.points}: {err}") from None
        try:
            pts = np.array([float(tok) for tok in tokens])
        except ValueError as err:
            raise _InputError(f"{args.points}: {err}") from None
    else:
        if args.grid < 1:
            raise _UsageError(f"--grid must be >= 1, got {args.grid}")
        pts = np.linspace(-1.0, 1.0, args.grid)
    print("x,re,im")
    if pts.size:
        vals = evaluate(coeffs, pts)
        for x, v in zip(pts, vals):
            print(f"{_fmt(x)},{_fmt(v.real)},{_fmt(v.imag)}")
    return 0


def _cmd_sweep(args):
    f = by_name(args.func)
    if args.Nmin < 3 or args.Nmax < args.Nmin:
        raise _UsageError(f"need 3 <= Nmin <= Nmax, got {args.Nmin}..{args.Nmax}")
    if args.geom_steps < 1:
        raise _UsageError(f"--geom-steps must be >= 1, got {args.geom_steps}")
    targets = sorted(
        {int(round(v)) for v in np.geomspace(args.Nmin, args.Nmax, args.geom_steps)}
    )
    records = convergence_sweep(
        f,
        args.T,
        args.gamma,
        targets,
        method=args.method,
        tau=args.tau,
        seed=_resolved_seed(args),
        jobs=args.jobs,
    )
    lines = [SWEEP_COLUMNS]
    for r in records:
        lines.append(
            f"{r.method},{args.T},{_fmt(r.gamma)},{r.N},{r.M},{r.L},{_fmt(r.tau)},"
            f"{_fmt(r.sup_error)},{_fmt(r.residual)},{r.plunge_size},{_fmt(r.wall_seconds)}"
        )
    body = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
        skipped = sum(not r.converged for r in records)
        note = f", {skipped} not converged" if skipped else ""
        print(f"wrote {len(records)} rows to {args.out}{note}", file=sys.stderr)
    else:
        sys.stdout.write(body)
    return 0


def _cmd_plunge(args):
    config = resolve(args.T, args.n, args.gamma, args.tau)
    window = plunge_window(config)
    basis = pdpss_triplets(config, window)
    print(
        f"# window lo={window.lo} hi={window.hi} center={_fmt(window.center)} "
        f"size={window.size} N={config.N} M={config.M} L={config.L}"
    )
    print("index,sigma")
    for i, t in enumerate(basis.triplets):
        print(f"{window.lo + i},{_fmt(t.sigma)}")
    return 0


def _cmd_bench(args):
    try:
        targets = [int(tok) for tok in args.Nlist.split(",") if tok.strip()]
    except ValueError:
        raise _UsageError(f"--Nlist must be comma-separated integers, got {args.Nlist!r}") from None
    if not targets:
        raise _UsageError("--Nlist is empty")
    if args.repeats < 1:
        raise _UsageError(f"--repeats must be >= 1, got {args.repeats}")
    seed = _resolved_seed(args)
    print(BENCH_COLUMNS)
    for target in targets:
        config = resolve(args.T, target // 2, args.gamma)
        b = sample(SQUARE, config)
        times = []
        for _ in range(args.repeats):
            try:
                report = _run_solver(config, b, args.method, seed)
            except NotConverged as err:
                report = err.report
            times.append(report.wall_seconds)
        print(
            f"{args.method},{args.T},{_fmt(args.gamma)},{config.N},{config.M},"
            f"{config.L},{args.repeats},{_fmt(statistics.median(times))}"
        )
    return 0


def _add_common(sp, tau=True, seed=False):
    sp.add_argument("--T", default="2", metavar="P/Q",
                    help="extension parameter > 1, as 'p/q' or decimal (default 2)")
    sp.add_argument("--gamma", type=float, default=2.0,
                    help="requested oversampling m/n (default 2)")
    if tau:
        sp.add_argument("--tau", type=float, default=DEFAULT_TAU,
                        help="TSVD truncation threshold (default 1e-14)")
    if seed:
        sp.add_argument("--seed", type=int, default=None,
                        help="RNG seed for the implicit method "
                             "(default: FOUREX_SEED or 0)")


def _build_parser():
    parser = _Parser(prog="fourex", description="Fourier extension toolkit")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    fit = sub.add_parser("fit", help="fit a named function or a sample file")
    src = fit.add_mutually_exclusive_group(required=True)
    src.add_argument("--func", help="square | runge | abs | sin:<omega>")
    src.add_argument("--samples", metavar="FILE", help="sample file (see module help)")
    fit.add_argument("--n", type=int, required=True, help="half-bandwidth; N = 2n+1")
    _add_common(fit, seed=True)
    fit.add_argument("--method", choices=("explicit", "implicit", "dense"),
                     default="explicit")
    fit.add_argument("--out", metavar="FILE", help="coefficient JSON (default: stdout)")
    fit.set_defaults(handler=_cmd_fit)

    ev = sub.add_parser("eval", help="evaluate a coefficient file at points")
    ev.add_argument("--coeffs", metavar="FILE", required=True)
    where = ev.add_mutually_exclusive_group(required=True)
    where.add_argument("--points", metavar="FILE", help="whitespace-separated abscissae")
    where.add_argument("--grid", type=int, metavar="P",
                       help="P equispaced points on [-1, 1]")
    ev.set_defaults(handler=_cmd_eval)

    sweep = sub.add_parser("sweep", help="error/time sweep over a range of N")
    sweep.add_argument("--func", required=True, help="square | runge | abs | sin:<omega>")
    sweep.add_argument("--Nmin", type=int, required=True)
    sweep.add_argument("--Nmax", type=int, required=True)
    sweep.add_argument("--geom-steps", type=int, default=12,
                       help="geometric grid size between Nmin and Nmax (default 12)")
    _add_common(sweep, seed=True)
    sweep.add_argument("--method", choices=("explicit", "implicit", "dense"),
                       default="explicit")
    sweep.add_argument("--jobs", type=int, default=1,
                       help="parallel fits (default 1, best for timing fidelity)")
    sweep.add_argument("--out", metavar="FILE", help="CSV output (default: stdout)")
    sweep.set_defaults(handler=_cmd_sweep)

    plunge = sub.add_parser("plunge", help="print the validated plunge window spectrum")
    plunge.add_argument("--n", type=int, required=True, help="half-bandwidth; N = 2n+1")
    _add_common(plunge)
    plunge.set_defaults(handler=_cmd_plunge)

    bench = sub.add_parser("bench", help="median solve times over a list of N")
    bench.add_argument("--Nlist", required=True, metavar="N1,N2,...",
                       help="comma-separated target sizes")
    _add_common(bench, tau=False, seed=True)
    bench.add_argument("--method", choices=("explicit", "implicit", "dense"),
                       default="explicit")
    bench.add_argument("--repeats", type=int, default=3)
    bench.set_defaults(handler=_cmd_bench)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except _UsageError as err:
        print(f"fourex: error: {err}", file=sys.stderr)
        return 1
    except _InputError as err:
        print(f"fourex: error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"fourex: error: {err}", file=sys.stderr)
        return 2
    except SketchFailure as err:
        print(f"fourex: sketch failure: {err}", file=sys.stderr)
        return 4
    except NotConverged as err:
        print(f"fourex: not converged: {err}", file=sys.stderr)
        return 3
    except FourexError as err:
        print(f"fourex: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
