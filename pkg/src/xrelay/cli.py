"""Command-line front end for reproducible design, verification, and sweeps.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 infeasible
antenna regime, 4 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import dof_report
from .diagnostics import diagnose
from .errors import DesignInvalid, InfeasibleRegime, RankDeficient
from .exchange import MessageSet, run_exchange
from .model import NetworkConfig, draw_channels
from .numerics import TolerancePolicy
from .rates import ergodic_sweep
from .reduced import design_reduced
from .sajic import design_full

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_DEGENERATE = 4

CSV_HEADER = "scheme,M,N,snr_db,mean_sum_rate,std_err,trials"


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Provenance record written next to every output file."""

    subcommand: str
    flags: dict
    master_seed: int
    artifact_version: str
    started_at: str

    def write(self, out_path: Path) -> Path:
        manifest_path = out_path.with_name(out_path.name + ".manifest.json")
        manifest_path.write_text(
            json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return manifest_path


def parse_int_range(text: str) -> list[int]:
    """An int or an inclusive range ``a..b``."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        values = list(range(int(lo), int(hi) + 1))
        if not values:
            raise argparse.ArgumentTypeError(f"empty range: {text!r}")
        return values
    return [int(text)]


def parse_snr_grid(text: str) -> list[float]:
    """SNR grid in dB, ``start:step:stop`` inclusive."""
    try:
        start, step, stop = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected start:step:stop, got {text!r}") from exc
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad SNR grid {text!r}")
    count = int(round((stop - start) / step)) + 1
    return [start + k * step for k in range(count)]


def _resolve_seed(value) -> int:
    if value is not None:
        return value
    env = os.environ.get("XRELAY_SEED")
    return int(env) if env else 0


def _tolerance(args) -> TolerancePolicy:
    return TolerancePolicy(relative_rank_eps=args.tol_rank, residual_eps=args.tol_residual)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xrelay",
        description="MIMO two-way X relay channel: transceiver design and DOF sweeps",
    )
    parser.add_argument("--version", action="version", version=f"xrelay {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, scheme_choices, ranged):
        antenna_type = parse_int_range if ranged else int
        metavar = "M[..M2]" if ranged else "M"
        p.add_argument("--M", type=antenna_type, required=True, metavar=metavar)
        p.add_argument("--N", type=antenna_type, required=True,
                       metavar=metavar.replace("M", "N"))
        if scheme_choices:
            p.add_argument("--scheme", choices=scheme_choices, default=scheme_choices[0])
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (falls back to $XRELAY_SEED, then 0)")
        p.add_argument("--tol-rank", type=float, default=1e-10, dest="tol_rank")
        p.add_argument("--tol-residual", type=float, default=1e-9, dest="tol_residual")

    p = sub.add_parser("analyze", help="closed-form DOF table over antenna ranges")
    common(p, None, ranged=True)

    p = sub.add_parser("design", help="build one transceiver design and print residuals")
    common(p, ("sajic", "reduced"), ranged=False)

    p = sub.add_parser("verify", help="noiseless exchanges must recover all bits")
    common(p, ("sajic", "reduced"), ranged=False)
    p.add_argument("--trials", type=int, default=100)

    p = sub.add_parser("simulate", help="ergodic sum-rate sweep to CSV")
    common(p, ("sajic", "reduced", "timeshare", "all"), ranged=True)
    p.add_argument("--snr", type=parse_snr_grid, default=parse_snr_grid("0:5:60"),
                   metavar="START:STEP:STOP")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--out", type=Path, required=True)
    return parser


def cmd_analyze(args) -> int:
    header = f"{'M':>3} {'N':>3} {'upper':>6} {'sajic':>6} {'reduced':>8} {'timeshare':>10}"
    print(header)
    for m in args.M:
        for n in args.N:
            r = dof_report(m, n)
            reduced = "yes" if r.reduced_full else "no"
            print(f"{r.M:>3} {r.N:>3} {r.upper_bound:>6} {r.sajic_dof:>6} "
                  f"{reduced:>8} {r.time_share_dof:>10}")
    return EXIT_OK


def _build_design(m, n, scheme, seed, tol):
    cfg = NetworkConfig(M=m, N=n)
    ch = draw_channels(cfg, seed, tol)
    if scheme == "reduced":
        return design_reduced(ch, cfg, tol), cfg
    return design_full(ch, cfg, tol), cfg


def cmd_design(args) -> int:
    m, n = args.M, args.N
    seed = _resolve_seed(args.seed)
    tol = _tolerance(args)
    design, _ = _build_design(m, n, args.scheme, seed, tol)
    report = diagnose(design, tol)
    print(f"scheme={report.scheme} M={m} N={n} seed={seed} streams={report.total_streams}")
    print(f"uplink alignment residual   {report.mac_alignment_residual:.3e}")
    if report.bc_alignment_residual is not None:
        print(f"downlink alignment residual {report.bc_alignment_residual:.3e}")
    if report.relay_null_residual is not None:
        print(f"relay nulling residual      {report.relay_null_residual:.3e}")
    print(f"max interference leakage    {report.max_leakage:.3e}")
    print(f"decoding basis rank         {report.mac_basis_rank}/{report.total_streams}")
    if report.effective_rows_rank is not None:
        print(f"effective rows rank         {report.effective_rows_rank}/{report.total_streams}")
    print(f"relay beamformer rank       {report.relay_rank}/{report.total_streams}")
    for node in (1, 2, 3, 4):
        print(f"node {node}: desired link rank {report.desired_link_ranks[node]}"
              f"/{report.desired_link_expected[node]}, "
              f"tx power {report.node_power[node]:.6f}/{report.power_budget:.6f}")
    print(f"relay tx power              {report.relay_power:.6f}/{report.power_budget:.6f}")
    failures = report.failures(tol)
    print("PASS" if not failures else "FAIL: " + "; ".join(failures))
    return EXIT_OK if not failures else EXIT_DEGENERATE


def cmd_verify(args) -> int:
    m, n = args.M, args.N
    seed = _resolve_seed(args.seed)
    tol = _tolerance(args)
    total_errors = 0
    for trial in range(args.trials):
        design, _ = _build_design(m, n, args.scheme, seed + trial, tol)
        msgs = MessageSet.random(design.allocation, seed + trial)
        result = run_exchange(design, msgs, noise_var=0.0, tol=tol)
        total_errors += result.total_bit_errors + result.relay_xor_errors
    status = "PASS" if total_errors == 0 else "FAIL"
    print(f"{status}: {args.trials} noiseless exchanges, {total_errors} bit errors "
          f"(scheme={args.scheme}, M={m}, N={n})")
    return EXIT_OK if total_errors == 0 else EXIT_FAIL


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args.seed)
    tol = _tolerance(args)
    schemes = ["sajic", "reduced", "timeshare"] if args.scheme == "all" else [args.scheme]
    rows = []
    curves = []
    for m in args.M:
        for n in args.N:
            cfg = NetworkConfig(M=m, N=n)
            for scheme in schemes:
                try:
                    curve = ergodic_sweep(cfg, scheme, args.snr, args.trials, seed, tol)
                except InfeasibleRegime as exc:
                    if args.scheme == "all":
                        print(f"skipping {scheme} at M={m}, N={n}: {exc}", file=sys.stderr)
                        continue
                    raise
                curves.append(curve)
                for pt in curve.points:
                    rows.append(
                        f"{scheme},{m},{n},{pt.snr_db:.6f},"
                        f"{pt.mean_sum_rate:.6f},{pt.std_err:.6f},{pt.trials}"
                    )
    if not curves:
        raise InfeasibleRegime("no requested scheme is feasible for the given ranges")

    out: Path = args.out
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.write("\n".join(rows) + "\n")
    manifest = RunManifest(
        subcommand="simulate",
        flags={
            "M": args.M,
            "N": args.N,
            "scheme": args.scheme,
            "snr": args.snr,
            "trials": args.trials,
            "out": str(out),
            "tol_rank": args.tol_rank,
            "tol_residual": args.tol_residual,
        },
        master_seed=seed,
        artifact_version=__version__,
        started_at=datetime.now(timezone.utc).isoformat(),
    )
    manifest.write(out)
    for curve in curves:
        print(f"{curve.scheme} M={curve.M} N={curve.N}: "
              f"fitted slope {curve.fitted_slope_per_3db:.3f} bits per 3 dB "
              f"({curve.redraws} redraws)")
    print(f"wrote {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "analyze": cmd_analyze,
        "design": cmd_design,
        "verify": cmd_verify,
        "simulate": cmd_simulate,
    }[args.subcommand]
    try:
        return handler(args)
    except InfeasibleRegime as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (RankDeficient, DesignInvalid) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
