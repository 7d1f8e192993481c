"""Batch front end: validate configs, simulate, optimize, certify, compare.

Every number a command prints is produced by a library call; this layer only
parses flags, sequences pipelines and renders tables. Machine-readable
output is CSV with fixed column orders (see --help of each subcommand);
human-readable summaries go to standard output.

Exit codes: 0 success, 1 validation failure, 2 non-convergence, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from agenet import __version__, analytics, optimizer, oracle, sim
from agenet.network import ConfigError, Network, parse_network, validate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NO_CONVERGENCE = 2
EXIT_IO = 3

REPORT_COLUMNS = (
    "link", "gamma", "weight", "degree", "p", "f",
    "age_closed", "age_emp_avg", "age_emp_peak", "lambda",
)


class CommandError(Exception):
    """Abort the current command with a message and exit code."""

    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class LinkRow:
    link: int
    gamma: float
    weight: float
    degree: int
    p: float
    f: float
    age_closed: float
    age_emp_avg: float | None = None
    age_emp_peak: float | None = None
    lam: float | None = None


@dataclass
class RunReport:
    """Rendering-ready summary; all values come from library results."""

    command: str
    network_summary: str
    rows: list[LinkRow]
    network_age_closed: float
    network_age_emp_avg: float | None = None
    network_age_emp_peak: float | None = None
    dual_value: float | None = None
    residual: float | None = None
    duality_gap: float | None = None
    converged: bool | None = None
    frames: int | None = None
    messages: int | None = None
    notes: list[str] = field(default_factory=list)

    def render(self) -> str:
        out = [f"command: {self.command}", f"network: {self.network_summary}"]
        simulated = any(r.age_emp_avg is not None for r in self.rows)
        dual = any(r.lam is not None for r in self.rows)
        header = ["link", "gamma", "weight", "|N|", "p", "f", "age"]
        if simulated:
            header += ["emp avg", "rel err", "emp peak", "rel err"]
        if dual:
            header += ["lambda"]
        table = [header]
        for r in self.rows:
            row = [
                str(r.link), _fmt(r.gamma), _fmt(r.weight), str(r.degree),
                _fmt(r.p), _fmt(r.f), _fmt(r.age_closed),
            ]
            if simulated:
                row += [
                    _fmt(r.age_emp_avg), _fmt(_rel(r.age_emp_avg, r.age_closed)),
                    _fmt(r.age_emp_peak), _fmt(_rel(r.age_emp_peak, r.age_closed)),
                ]
            if dual:
                row += [_fmt(r.lam)]
            table.append(row)
        widths = [max(len(row[c]) for row in table) for c in range(len(header))]
        for row in table:
            out.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
        out.append(f"network age (closed form): {_fmt(self.network_age_closed)}")
        if self.network_age_emp_avg is not None:
            out.append(
                f"network age (empirical):   avg {_fmt(self.network_age_emp_avg)}"
                f"  peak {_fmt(self.network_age_emp_peak)}"
            )
        if self.dual_value is not None:
            out.append(f"dual objective G: {_fmt(self.dual_value)}")
        if self.duality_gap is not None:
            out.append(f"duality gap |G - primal|: {_fmt(self.duality_gap)}")
        if self.residual is not None:
            out.append(f"fixed-point residual (sup): {_fmt(self.residual)}")
        if self.converged is not None:
            out.append(
                f"converged: {'yes' if self.converged else 'NO'}"
                f" (frames={self.frames}, messages={self.messages})"
            )
        out.extend(f"note: {n}" for n in self.notes)
        return "\n".join(out)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(REPORT_COLUMNS)
            for r in self.rows:
                writer.writerow(
                    (
                        r.link, repr(r.gamma), repr(r.weight), r.degree,
                        repr(r.p), repr(r.f), repr(r.age_closed),
                        "" if r.age_emp_avg is None else repr(r.age_emp_avg),
                        "" if r.age_emp_peak is None else repr(r.age_emp_peak),
                        "" if r.lam is None else repr(r.lam),
                    )
                )


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        if np.isnan(x):
            return "undefined"
        return f"{x:.6g}"
    return str(x)


def _rel(value, reference):
    if value is None or reference in (None, 0.0) or np.isnan(value) or np.isinf(reference):
        return None
    return abs(value - reference) / abs(reference)


def _network_summary(net: Network) -> str:
    sym = "symmetric" if net.is_symmetric else "ASYMMETRIC"
    return f"{net.num_links} links, {sym} interference"


def _load_network(path: str) -> Network:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    try:
        return parse_network(text)
    except ConfigError as exc:
        raise CommandError(f"invalid config {path}: {exc}", EXIT_INVALID) from exc


def _build_rows(net: Network, policy: sim.Policy, profile, stats=None, lam=None):
    rows = []
    for e in range(net.num_links):
        rows.append(
            LinkRow(
                link=net.ids[e],
                gamma=net.gamma[e],
                weight=net.weight[e],
                degree=net.degree(e),
                p=float(policy.arr[e]),
                f=float(profile.f[e]),
                age_closed=float(profile.link_age[e]),
                age_emp_avg=None if stats is None else float(stats.avg_age[e]),
                age_emp_peak=None if stats is None else float(stats.peak_age[e]),
                lam=None if lam is None else float(lam[e]),
            )
        )
    return rows


def _resolve_policy(net: Network, source: str) -> tuple[sim.Policy, list[str]]:
    notes: list[str] = []
    if source == "optimal":
        result = optimizer.run_frames(net)
        if not result.converged:
            raise CommandError(
                f"optimizer did not converge within {result.config.max_frames} frames "
                f"(final residual {result.residual:.3e})",
                EXIT_NO_CONVERGENCE,
            )
        notes.append(f"policy: optimized (frames={result.frames})")
        return result.policy, notes
    if source == "heuristic":
        try:
            policy = analytics.heuristic_sqrt_policy(net)
        except ValueError as exc:
            raise CommandError(str(exc), EXIT_INVALID) from exc
        notes.append("policy: 1/sqrt(gamma) heuristic")
        return policy, notes
    try:
        with open(source) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CommandError(f"cannot read policy file {source}: {exc}", EXIT_IO) from exc
    except json.JSONDecodeError as exc:
        raise CommandError(f"invalid policy file {source}: {exc}", EXIT_INVALID) from exc
    try:
        p = doc["p"]
        if isinstance(p, dict):
            arr = [float(p[str(i)]) for i in net.ids]
        else:
            arr = [float(x) for x in p]
        policy = sim.Policy(tuple(arr))
    except (KeyError, TypeError, ValueError) as exc:
        raise CommandError(f"invalid policy file {source}: {exc}", EXIT_INVALID) from exc
    if len(policy) != net.num_links:
        raise CommandError(
            f"policy file has {len(policy)} entries for {net.num_links} links",
            EXIT_INVALID,
        )
    notes.append(f"policy: file {source}")
    return policy, notes


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    net = _load_network(args.config)
    report = validate(net, for_distributed=args.for_distributed)
    print(report.render())
    return EXIT_OK if report.ok else EXIT_INVALID


def _optimizer_config(args) -> optimizer.OptimizerConfig:
    return optimizer.OptimizerConfig(
        epsilon=args.epsilon,
        eta0=args.eta0,
        schedule=args.schedule,
        tolerance=args.tol,
        max_frames=args.max_frames,
        gamma_corrected=args.gamma_corrected,
    )


def cmd_optimize(args) -> int:
    net = _load_network(args.config)
    cfg = _optimizer_config(args)
    try:
        result = optimizer.run_frames(
            net, cfg, record_trajectory=args.trajectory_out is not None
        )
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INVALID) from exc
    profile = analytics.closed_form_age(net, result.policy)
    gap = abs(result.objective - profile.network_age)
    report = RunReport(
        command="optimize",
        network_summary=_network_summary(net),
        rows=_build_rows(net, result.policy, profile, lam=result.lam),
        network_age_closed=profile.network_age,
        dual_value=result.objective,
        duality_gap=gap,
        residual=result.residual,
        converged=result.converged,
        frames=result.frames,
        messages=result.messages_sent,
    )
    if gap > 1e-5 * (1.0 + abs(result.objective)):
        report.notes.append(
            "duality gap exceeds tolerance; with --gamma-corrected=false this "
            "is expected whenever some gamma < 1"
        )
    if args.trajectory_out:
        optimizer.write_trajectory_csv(result, args.trajectory_out)
        report.notes.append(f"trajectory written to {args.trajectory_out}")
    print(report.render())
    if args.report_out:
        report.write_csv(args.report_out)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_simulate(args) -> int:
    net = _load_network(args.config)
    policy, notes = _resolve_policy(net, args.policy)
    stats = sim.simulate(
        net, policy, args.horizon, args.seed, trace_out=args.trace_out
    )
    profile = analytics.closed_form_age(net, policy)
    report = RunReport(
        command="simulate",
        network_summary=_network_summary(net),
        rows=_build_rows(net, policy, profile, stats=stats),
        network_age_closed=profile.network_age,
        network_age_emp_avg=stats.network_avg_age,
        network_age_emp_peak=stats.network_peak_age,
        notes=notes,
    )
    report.notes.append(f"horizon={args.horizon} seed={args.seed}")
    if any(stats.divergent):
        bad = [net.ids[e] for e, d in enumerate(stats.divergent) if d]
        report.notes.append(f"DIVERGENT links {bad}: age grows without bound")
    if args.trace_out:
        report.notes.append(f"trace written to {args.trace_out}")
    print(report.render())
    if args.report_out:
        report.write_csv(args.report_out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    net = _load_network(args.config)
    try:
        grid = oracle.grid_search(net, args.resolution, force=args.force)
        refined = oracle.refine(net, grid.policy, args.refine_iters)
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INVALID) from exc
    print(f"grid optimum    (resolution {args.resolution}): "
          f"objective {_fmt(grid.objective)} at p = {_fmt_vec(grid.policy.arr)}")
    if grid.ties:
        print(f"grid ties: {len(grid.ties)} further grid points within 1e-9 relative")
    print(f"refined optimum ({refined.refine_iterations} sweeps):  "
          f"objective {_fmt(refined.objective)} at p = {_fmt_vec(refined.policy.arr)}")
    return EXIT_OK


def _fmt_vec(arr) -> str:
    return "(" + ", ".join(f"{x:.6g}" for x in arr) + ")"


def cmd_compare(args) -> int:
    net = _load_network(args.config)
    rows: list[tuple[str, float | None, object, str]] = []

    if analytics.is_single_collision_domain(net):
        heur = analytics.heuristic_sqrt_policy(net)
        heur_age = analytics.closed_form_age(net, heur).network_age
        rows.append(("heuristic", heur_age, heur.arr, ""))
    else:
        rows.append(("heuristic", None, None, "n/a: not a single collision domain"))

    try:
        result = optimizer.run_frames(net)
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INVALID) from exc
    opt_age = analytics.closed_form_age(net, result.policy).network_age
    note = "" if result.converged else "DID NOT CONVERGE"
    rows.append(("optimized", opt_age, result.policy.arr, note))

    if net.num_links <= oracle.MAX_GRID_LINKS:
        grid = oracle.grid_search(net, args.resolution)
        refined = oracle.refine(net, grid.policy, args.refine_iters)
        rows.append(("oracle", refined.objective, refined.policy.arr, ""))
    else:
        rows.append(("oracle", None, None, "skipped: size guard"))

    print(f"network: {_network_summary(net)}")
    header = ["method", "objective"] + [f"p[{i}]" for i in net.ids] + ["note"]
    table = [header]
    for name, obj, arr, note in rows:
        cells = [name, _fmt(obj)]
        cells += ["-" for _ in net.ids] if arr is None else [f"{x:.6g}" for x in arr]
        cells.append(note)
        table.append(cells)
    widths = [max(len(row[c]) for row in table) for c in range(len(header))]
    for row in table:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


# ---------------------------------------------------------------- parser


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _bool_flag(text: str) -> bool:
    t = text.lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError("expected true or false")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agenet",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"agenet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network config")
    p.add_argument("config")
    p.add_argument(
        "--for-distributed",
        action="store_true",
        help="treat asymmetric interference as an error (required by optimize)",
    )
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser(
        "optimize",
        help="compute age-optimal attempt probabilities",
        epilog="trajectory CSV columns: frame,link,lambda,theta,p,G\n"
               f"report CSV columns: {','.join(REPORT_COLUMNS)}",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("config")
    p.add_argument("--epsilon", type=float, default=1e-8, help="projection floor")
    p.add_argument("--eta0", type=float, default=None, help="initial step size")
    p.add_argument("--schedule", choices=("constant", "diminishing"), default="constant")
    p.add_argument("--tol", type=float, default=1e-9, help="sup-norm stop tolerance")
    p.add_argument("--max-frames", type=_positive_int, default=100_000)
    p.add_argument("--gamma-corrected", type=_bool_flag, default=True, metavar="BOOL")
    p.add_argument("--trajectory-out", metavar="PATH")
    p.add_argument("--report-out", metavar="PATH")
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser(
        "simulate",
        help="Monte Carlo simulation under a policy",
        epilog="trace CSV columns: t,link,age,attempted,channel,success\n"
               f"report CSV columns: {','.join(REPORT_COLUMNS)}\n"
               "policy files are JSON: {\"p\": [..]} in declaration order, "
               "or {\"p\": {\"<link id>\": value, ..}}",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("config")
    p.add_argument(
        "--policy",
        required=True,
        help="'optimal' (run the optimizer), 'heuristic' (1/sqrt gamma), or a JSON file path",
    )
    p.add_argument("--horizon", type=_positive_int, default=100_000, help="slots to simulate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace-out", metavar="PATH")
    p.add_argument("--report-out", metavar="PATH")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("oracle", help="brute-force certification for small instances")
    p.add_argument("config")
    p.add_argument("--resolution", type=float, default=0.01)
    p.add_argument("--refine-iters", type=_positive_int, default=60)
    p.add_argument("--force", action="store_true", help="override the size guard")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("compare", help="heuristic vs optimized vs oracle on one instance")
    p.add_argument("config")
    p.add_argument("--resolution", type=float, default=0.01)
    p.add_argument("--refine-iters", type=_positive_int, default=60)
    p.set_defaults(fn=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
