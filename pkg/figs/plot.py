#!/usr/bin/env python3
"""Figures from the Fourier extension CLI's CSV output.

Three kinds, all pure file-to-file (nothing numerical is recomputed
here):

convergence
    sup-error against N on log-log axes, one series per (T, method),
    from ``fourex sweep`` CSV files.
timing
    seconds against N on log-log axes, one series per (T, method),
    from ``fourex bench`` CSV files; ``fourex sweep`` files work too
    and plot their wall_seconds column.
spectrum
    singular values against window index on a log y axis from
    ``fourex plunge`` output, with the validated window shaded.

Usage::

    python3 figs/plot.py --kind convergence --in sweep.csv --out fig.svg

``--in`` repeats to overlay several CSV files in one figure.  The
output format follows the file suffix (.svg or .png).  Exit codes:
1 for usage errors, 2 for unreadable, empty, or wrong-schema input.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
# keep labels as literal text in SVG output so figures stay greppable,
# and pin the id hash salt so identical inputs give identical bytes
matplotlib.rcParams["svg.fonttype"] = "none"
matplotlib.rcParams["svg.hashsalt"] = "figs"

import matplotlib.pyplot as plt
from matplotlib.ticker import FuncFormatter, LogLocator

SWEEP_COLUMNS = "method,T,gamma,N,M,L,tau,sup_error,residual,plunge_size,wall_seconds"
BENCH_COLUMNS = "method,T,gamma,N,M,L,repeats,median_seconds"
SPECTRUM_COLUMNS = "index,sigma"

KINDS = ("convergence", "timing", "spectrum")
SUFFIXES = (".svg", ".png")

_WINDOW_RE = re.compile(
    r"#\s*window\s+lo=(?P<lo>\d+)\s+hi=(?P<hi>\d+).*?N=(?P<N>\d+)"
)


class _UsageError(Exception):
    """Bad command line; exit 1."""


class _DataError(Exception):
    """Unreadable, empty, or wrong-schema input file; exit 2."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: what to read, what to draw, where to write."""

    kind: str
    inputs: tuple[Path, ...]
    output: Path


@dataclass(frozen=True)
class Table:
    """One parsed CSV file: header columns, string-valued rows, and any
    leading comment lines (``# ...``)."""

    path: Path
    columns: tuple[str, ...]
    rows: tuple[dict, ...]
    comments: tuple[str, ...]


def read_table(path):
    """Parse a CSV file into a Table.

    Raises
    ------
    _DataError
        If the file is missing, has no header, or has no data rows.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise _DataError(f"cannot read {path}: {err}") from err
    comments = []
    lines = []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line)
        elif line.strip():
            lines.append(line)
    if not lines:
        raise _DataError(f"{path}: empty file, no CSV header")
    columns = tuple(tok.strip() for tok in lines[0].split(","))
    rows = tuple(
        dict(zip(columns, (tok.strip() for tok in line.split(","))))
        for line in lines[1:]
    )
    if not rows:
        raise _DataError(f"{path}: no data rows")
    return Table(
        path=Path(path), columns=columns, rows=rows, comments=tuple(comments)
    )


def require_columns(table, needed):
    """Raise _DataError naming any column the table is missing."""
    missing = [c for c in needed.split(",") if c not in table.columns]
    if missing:
        raise _DataError(
            f"{table.path}: missing columns {', '.join(missing)} "
            f"(found {', '.join(table.columns)})"
        )


def _series_by_T_method(tables, value_column_of):
    """Group rows of all tables into {(T, method): sorted (N, y) pairs}.

    Non-finite y values are dropped; a series that loses every point
    this way is an error, since the figure would silently omit it.
    """
    groups = {}
    for table in tables:
        ycol = value_column_of(table)
        for row in table.rows:
            key = (row["T"], row["method"])
            y = float(row[ycol])
            groups.setdefault(key, [])
            if math.isfinite(y) and y > 0:
                groups[key].append((int(row["N"]), y))
    for key, pts in groups.items():
        if not pts:
            raise _DataError(
                f"series T={key[0]} {key[1]} has no plottable values"
            )
        pts.sort()
    return groups


def _decade_label(value, _pos=None):
    """Plain '1e-10' style tick labels for log axes."""
    if value <= 0:
        return ""
    exponent = math.log10(value)
    if abs(exponent - round(exponent)) > 1e-9:
        return ""
    return f"1e{round(exponent)}"


def _log_axis(axis):
    axis.set_major_locator(LogLocator(base=10.0))
    axis.set_major_formatter(FuncFormatter(_decade_label))


def _pad_decades(ax, values):
    """Extend the y limits to whole decades around the data."""
    lo = 10.0 ** math.floor(math.log10(min(values)))
    hi = 10.0 ** math.ceil(math.log10(max(values)))
    if lo == hi:
        hi = lo * 10.0
    ax.set_ylim(lo, hi)


def _draw_series(ax, groups, ylabel):
    for (T, method), pts in sorted(groups.items()):
        ax.plot(
            [N for N, _ in pts],
            [y for _, y in pts],
            marker="o",
            markersize=4,
            label=f"T={T} {method}",
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    _log_axis(ax.xaxis)
    _log_axis(ax.yaxis)
    _pad_decades(ax, [y for pts in groups.values() for _, y in pts])
    ax.set_xlabel("N")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="major", alpha=0.4)
    ax.legend(frameon=False)


def _draw_convergence(ax, tables):
    for table in tables:
        require_columns(table, SWEEP_COLUMNS)
    _draw_series(ax, _series_by_T_method(tables, lambda t: "sup_error"),
                 "sup error")


def _draw_timing(ax, tables):
    def value_column_of(table):
        if all(c in table.columns for c in BENCH_COLUMNS.split(",")):
            return "median_seconds"
        require_columns(table, SWEEP_COLUMNS)
        return "wall_seconds"

    _draw_series(ax, _series_by_T_method(tables, value_column_of), "seconds")


def _draw_spectrum(ax, tables):
    for table in tables:
        require_columns(table, SPECTRUM_COLUMNS)
        window = None
        for comment in table.comments:
            match = _WINDOW_RE.search(comment)
            if match:
                window = match
                break
        label = f"N={window['N']}" if window else table.path.stem
        pts = sorted(
            (int(row["index"]), float(row["sigma"])) for row in table.rows
        )
        positive = [(i, s) for i, s in pts if math.isfinite(s) and s > 0]
        if not positive:
            raise _DataError(f"{table.path}: no plottable sigma values")
        ax.plot(
            [i for i, _ in positive],
            [s for _, s in positive],
            marker=".",
            linestyle="-",
            label=label,
        )
        if window:
            ax.axvspan(
                int(window["lo"]),
                int(window["hi"]),
                alpha=0.15,
                label=f"window [{window['lo']}, {window['hi']}]",
            )
    ax.set_yscale("log")
    _log_axis(ax.yaxis)
    ax.set_xlabel("index")
    ax.set_ylabel("sigma")
    ax.grid(True, which="major", alpha=0.4)
    ax.legend(frameon=False)


_DRAWERS = {
    "convergence": _draw_convergence,
    "timing": _draw_timing,
    "spectrum": _draw_spectrum,
}


def plot(spec):
    """Render spec.inputs into the image file spec.output.

    Returns the output path.  Raises _DataError on schema or content
    problems; never recomputes any numerical result.
    """
    tables = [read_table(path) for path in spec.inputs]
    fig, ax = plt.subplots(figsize=(6.4, 4.2), constrained_layout=True)
    try:
        _DRAWERS[spec.kind](ax, tables)
        save_args = {"metadata": {"Date": None}} if (
            spec.output.suffix == ".svg"
        ) else {}
        fig.savefig(spec.output, **save_args)
    finally:
        plt.close(fig)
    return spec.output


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser():
    parser = _Parser(
        prog="plot.py",
        description="Render figures from fourex CSV output.",
    )
    parser.add_argument(
        "--kind", required=True, choices=KINDS, help="figure kind"
    )
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        metavar="CSV",
        help="input CSV file (repeat to overlay several)",
    )
    parser.add_argument(
        "--out", required=True, metavar="IMAGE", help="output .svg or .png"
    )
    return parser


def main(argv=None):
    """Entry point; returns the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
        output = Path(args.out)
        if output.suffix not in SUFFIXES:
            raise _UsageError(
                f"--out must end in {' or '.join(SUFFIXES)}, got {output.name}"
            )
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(Path(p) for p in args.inputs),
            output=output,
        )
        plot(spec)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except _DataError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(f"wrote {spec.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
