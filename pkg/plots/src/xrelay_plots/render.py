"""Turn simulator sum-rate CSVs into figures with slope reference lines.

Input is the simulator's CSV schema
(``scheme,M,N,snr_db,mean_sum_rate,std_err,trials``); one curve is drawn per
(scheme, M, N) group.  The legend carries each curve's fitted slope per
3 dB, recomputed here from the CSV so it cross-checks the simulator, and
dashed reference lines show analytic slopes anchored at the top-right data
point.  Rendering is headless and deterministic: the same CSV produces the
same image bytes.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_HEADER = ["scheme", "M", "N", "snr_db", "mean_sum_rate", "std_err", "trials"]


class SchemaError(Exception):
    """The CSV does not follow the simulator's schema."""


class EmptyInput(Exception):
    """Not enough data to draw a curve (fewer than two SNR points)."""


@dataclass(frozen=True)
class CurvePoint:
    snr_db: float
    mean_sum_rate: float
    std_err: float
    trials: int


@dataclass(frozen=True)
class PlotSpec:
    csv_paths: tuple[Path, ...]
    out_path: Path
    ref_slopes: tuple[tuple[str, float], ...] = ()
    title: str = "Ergodic sum rate"
    dpi: int = 150


def load_curves(paths) -> dict[tuple[str, int, int], list[CurvePoint]]:
    """Parse one or more CSVs into per-(scheme, M, N) point lists."""
    curves: dict[tuple[str, int, int], list[CurvePoint]] = {}
    for path in paths:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file") from None
            if header != EXPECTED_HEADER:
                raise SchemaError(f"{path}: header {header} != {EXPECTED_HEADER}")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(EXPECTED_HEADER):
                    raise SchemaError(f"{path}:{lineno}: expected 7 fields, got {len(row)}")
                try:
                    key = (row[0], int(row[1]), int(row[2]))
                    point = CurvePoint(float(row[3]), float(row[4]), float(row[5]), int(row[6]))
                except ValueError as exc:
                    raise SchemaError(f"{path}:{lineno}: {exc}") from None
                curves.setdefault(key, []).append(point)
    if not curves:
        raise EmptyInput("no curves found in input")
    for key in curves:
        curves[key] = sorted(curves[key], key=lambda p: p.snr_db)
    return curves


def fit_slope_per_3db(points) -> float:
    """Least-squares slope per 3 dB over the top half of the grid.

    Mirrors the simulator's definition: start at index ``len // 2`` but
    keep at least two points.
    """
    points = sorted(points, key=lambda p: p.snr_db)
    if len(points) < 2:
        raise EmptyInput("need at least two SNR points to fit a slope")
    top = points[min(len(points) // 2, len(points) - 2):]
    x = np.array([p.snr_db for p in top])
    y = np.array([p.mean_sum_rate for p in top])
    return float(3.0 * np.polyfit(x, y, 1)[0])


def render(spec: PlotSpec) -> dict[tuple[str, int, int], float]:
    """Draw all curves plus reference slopes; returns each curve's fit."""
    curves = load_curves(spec.csv_paths)
    for key, points in curves.items():
        if len(points) < 2:
            raise EmptyInput(f"curve {key} has {len(points)} SNR point(s), need >= 2")

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    slopes: dict[tuple[str, int, int], float] = {}
    for key in sorted(curves):
        scheme, m, n = key
        points = curves[key]
        slope = fit_slope_per_3db(points)
        slopes[key] = slope
        x = [p.snr_db for p in points]
        y = [p.mean_sum_rate for p in points]
        err = [p.std_err for p in points]
        ax.errorbar(x, y, yerr=err, marker="o", capsize=2,
                    label=f"{scheme} M={m} N={n} ({slope:.3f}/3dB)")

    if spec.ref_slopes:
        anchor_x = max(p.snr_db for pts in curves.values() for p in pts)
        anchor_y = max(
            p.mean_sum_rate for pts in curves.values() for p in pts if p.snr_db == anchor_x
        )
        span = np.array([min(p.snr_db for pts in curves.values() for p in pts), anchor_x])
        for label, slope in spec.ref_slopes:
            ax.plot(span, anchor_y + (slope / 3.0) * (span - anchor_x),
                    linestyle="--", linewidth=1.0,
                    label=f"{label}: {slope:g}/3dB (ref)")

    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("ergodic sum rate (bits/s/Hz)")
    ax.set_title(spec.title)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    spec.out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out_path, dpi=spec.dpi, metadata={"Software": "xrelay-plots"})
    plt.close(fig)
    return slopes


def _parse_ref_slope(text: str) -> tuple[str, float]:
    label, sep, value = text.partition("=")
    if not sep or not label:
        raise argparse.ArgumentTypeError(f"expected label=value, got {text!r}")
    try:
        slope = float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if slope < 0:
        raise argparse.ArgumentTypeError("reference slopes must be >= 0")
    return label, slope


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xrelay-plots",
        description="Render sum-rate CSV sweeps with DOF slope references",
    )
    parser.add_argument("csv", nargs="+", type=Path, help="input CSV file(s)")
    parser.add_argument("--out", type=Path, required=True, help="output image path")
    parser.add_argument("--ref-slope", type=_parse_ref_slope, action="append",
                        default=[], metavar="LABEL=BITS_PER_3DB")
    parser.add_argument("--title", default="Ergodic sum rate")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        csv_paths=tuple(args.csv),
        out_path=args.out,
        ref_slopes=tuple(args.ref_slope),
        title=args.title,
    )
    try:
        slopes = render(spec)
    except (SchemaError, EmptyInput, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for (scheme, m, n), slope in sorted(slopes.items()):
        print(f"curve scheme={scheme} M={m} N={n} slope_per_3db={slope:.9f}")
    print(f"wrote {spec.out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
