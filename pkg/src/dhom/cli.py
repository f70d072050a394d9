"""Command line interface.

Exit codes: 0 ok, 1 negative membership answer, 2 usage or input error,
3 the second component lies inside the first (A∩B = B), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import statistics
import sys
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .calinalg import DegenerateRandomData
from .diagonal import (
    Containment,
    DiagonalProblem,
    containment_precheck,
    endpoint_match_distance,
    run_cascade,
    run_cascade_extrinsic,
)
from .diagonal.cascade import CLASSIFY_TOL, DIAGONAL_TOL
from .fixtures import EXAMPLES, example_witness_sets
from .membership import InconclusiveMembership, MembershipQuery, membership_distance
from .polysys import PolyParseError, parse_system
from .report import RunReport, build_report, format_report, format_table, write_report
from .tracker import TrackSettings
from .witness import WitnessError, read_witness, witness_hypersurface, witness_linear, write_witness

EXIT_OK = 0
EXIT_NOT_MEMBER = 1
EXIT_USAGE = 2
EXIT_CONTAINED = 3
EXIT_NUMERICAL = 4

log = logging.getLogger("dhom")


class UsageError(Exception):
    pass


def resolve_seed(flag: int | None, env=None) -> int:
    """The ``--seed`` flag wins over ``DHOM_SEED``; 0 when neither is set."""
    if flag is not None:
        return flag
    env = os.environ if env is None else env
    raw = env.get("DHOM_SEED")
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"DHOM_SEED must be an integer, got {raw!r}") from None


def _read_system(path, variables=None):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_system(text, variables)
    except PolyParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_witness(path):
    try:
        return read_witness(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except (WitnessError, PolyParseError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _parse_point(text: str) -> np.ndarray:
    try:
        return np.array([complex(tok.strip().replace("i", "j")) for tok in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse point {text!r}; expected comma separated numbers") from None


def _settings(args) -> TrackSettings:
    return TrackSettings() if args.newton_tol is None else TrackSettings(newton_tol=args.newton_tol)


# --------------------------------------------------------------------------
# commands


def cmd_witness(args) -> int:
    seed = resolve_seed(args.seed)
    if args.hypersurface:
        f = _read_system(args.hypersurface)
        restrict = _read_system(args.restrict) if args.restrict else None
        if restrict is not None and restrict.variable_names != f.variable_names:
            raise UsageError("restricting system must use the same variables")
        try:
            ws = witness_hypersurface(f, seed, restrict_to=restrict)
        except WitnessError as exc:
            if "exactly one polynomial" in str(exc) or "constant" in str(exc):
                raise UsageError(str(exc)) from None
            raise
    else:
        if not args.system:
            raise UsageError("--linear needs --system")
        full = _read_system(args.system)
        comp = _read_system(args.linear, full.variable_names)
        try:
            ws = witness_linear(comp, full, seed)
        except WitnessError as exc:
            raise UsageError(str(exc)) from None
    write_witness(ws, args.out)
    print(f"degree {ws.degree} dim {ws.dim} ambient {ws.ambient_dim} -> {args.out}")
    return EXIT_OK


def _problem_inputs(args, seed):
    if args.example:
        if args.wa or args.wb:
            raise UsageError("--example excludes --wa/--wb")
        return f"example {args.example}", *example_witness_sets(args.example, seed)
    if not (args.wa and args.wb):
        raise UsageError("give --wa and --wb, or --example")
    return f"{args.wa} x {args.wb}", _load_witness(args.wa), _load_witness(args.wb)


class Intersection(NamedTuple):
    problem: DiagonalProblem
    contained: str | None  # "A" or "B" when one input lies inside the other
    supersets: list
    report: RunReport | None


def run_intersection(label, wa, wb, mode, seed, hmax=None, h0=None, threads=1, settings=None, tol=CLASSIFY_TOL):
    """Containment precheck, then the requested cascades."""
    swapped = wa.dim < wb.dim
    try:
        problem = DiagonalProblem.ordered(wa, wb, hmax=hmax, h0=h0, seed=seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if containment_precheck(problem) is Containment.B_IN_A:
        return Intersection(problem, "A" if swapped else "B", [], None)
    modes = ["intrinsic", "extrinsic"] if mode == "both" else [mode]
    runners = {"intrinsic": run_cascade, "extrinsic": run_cascade_extrinsic}
    sups = [runners[m](problem, settings, threads=threads, tol=tol) for m in modes]
    dist = endpoint_match_distance(*sups) if len(sups) == 2 else None
    tolerances = {"classify": tol, "diagonal": DIAGONAL_TOL, "newton": (settings or TrackSettings()).newton_tol}
    report = build_report(label, problem, sups, tolerances, Containment.PROCEED.value, dist)
    return Intersection(problem, None, sups, report)


def cmd_intersect(args) -> int:
    seed = resolve_seed(args.seed)
    label, wa, wb = _problem_inputs(args, seed)
    res = run_intersection(label, wa, wb, args.mode, seed, args.hmax, args.h0, args.threads, _settings(args))
    if res.contained:
        print(f"A∩B = {res.contained}")
        return EXIT_CONTAINED
    report, sups, problem = res.report, res.supersets, res.problem
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for sup in sups:
        for j, ws in sup.witness_sets(problem).items():
            write_witness(ws, out / f"{sup.mode}_W{j}.json")
    write_report(report, out / "report.json")
    print(format_report(report))
    if any(s.failed for s in sups):
        print("error: path failures persisted after restart", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_member(args) -> int:
    ws = _load_witness(args.witness)
    point = _parse_point(args.point)
    try:
        query = MembershipQuery(ws, point, args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        dist = membership_distance(query, resolve_seed(args.seed), _settings(args))
    except InconclusiveMembership as exc:
        raise UsageError(f"inconclusive: {exc}") from None
    yes = dist <= query.tol
    print(f"{'member' if yes else 'not a member'} (distance {dist:.3e})")
    return EXIT_OK if yes else EXIT_NOT_MEMBER


BENCH_EXAMPLES = ("1", "2", "synthetic3")


def bench_rows(seed: int, repeats: int, threads: int = 1, examples=BENCH_EXAMPLES):
    """Median timings per example and mode.

    Returns a list of dicts with the variable counts, per-stage median
    seconds and total median seconds per mode, or an ``error`` entry.
    """
    rows = []
    for name in examples:
        row = {"example": name}
        try:
            wa, wb = example_witness_sets(name, seed)
            problem = DiagonalProblem.ordered(wa, wb, seed=seed)
            row.update(k=problem.k, a=problem.a, deg_a=problem.wA.degree, b=problem.b,
                       deg_b=problem.wB.degree, m=problem.m, paths=problem.wA.degree * problem.wB.degree)
            for mode, runner in (("intrinsic", run_cascade), ("extrinsic", run_cascade_extrinsic)):
                stage_times, totals = [], []
                for _ in range(repeats):
                    sup = runner(problem, threads=threads)
                    if sup.failed:
                        raise RuntimeError(f"{mode} run had path failures")
                    stage_times.append([s.wall_time for s in sup.stages])
                    totals.append(sup.total_time)
                row[f"{mode}_vars"] = sup.num_variables
                row[f"{mode}_stages"] = [statistics.median(col) for col in zip(*stage_times)]
                row[f"{mode}_total"] = statistics.median(totals)
                row[f"{mode}_counts"] = sup.counts()
        except Exception as exc:  # one bad row must not sink the table
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


def format_bench(rows) -> str:
    t1 = []
    for r in rows:
        if "error" in r and "m" not in r:
            t1.append([r["example"], "error", "", "", "", "", "", "", r["error"]])
            continue
        t1.append([r["example"], r["k"], r["a"], r["deg_a"], r["b"], r["deg_b"], r["paths"], r["m"],
                   r.get("extrinsic_vars", 3 * r["k"])])
    nstages = max((len(r.get("intrinsic_stages", [])) for r in rows), default=0)
    t2 = []
    for r in rows:
        if "error" in r:
            t2.append([r["example"], "error: " + r["error"]])
            continue
        for mode in ("extrinsic", "intrinsic"):
            st = r[f"{mode}_stages"]
            t2.append([f"{r['example']} {mode}", *st, *[None] * (nstages - len(st)), r[f"{mode}_total"]])
    header2 = ["example", *[f"stage {s + 1}" for s in range(nstages)], "total"]
    t2 = [row + [None] * (len(header2) - len(row)) if len(row) < len(header2) else row for row in t2]
    out = [
        "Dimensions, degrees and variable counts",
        format_table(["example", "k", "dim A", "deg A", "dim B", "deg B", "paths", "m", "extrinsic"], t1),
        "",
        "Median wall-clock seconds per homotopy stage",
        format_table(header2, t2),
    ]
    for r in rows:
        if "intrinsic_total" in r and r["intrinsic_total"] > 0:
            ratio = r["extrinsic_total"] / r["intrinsic_total"]
            out.append(f"example {r['example']}: extrinsic/intrinsic = {ratio:.2f}")
    out.append("reference ratio on the original hardware: 34.70/15.84 = 2.19")
    return "\n".join(out)


def cmd_bench(args) -> int:
    if args.repeats < 1:
        raise UsageError("--repeats must be positive")
    rows = bench_rows(resolve_seed(args.seed), args.repeats, args.threads)
    print(format_bench(rows))
    return EXIT_NUMERICAL if any("error" in r for r in rows) else EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dhom", description="Intersect solution components by diagonal homotopy.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None, help="random seed (default: $DHOM_SEED or 0)")
        sp.add_argument("--newton-tol", type=float, default=None, help="corrector tolerance")

    w = sub.add_parser("witness", help="build a witness set file")
    src = w.add_mutually_exclusive_group(required=True)
    src.add_argument("--hypersurface", metavar="F.sys")
    src.add_argument("--linear", metavar="COMP.sys", help="linear equations of the component")
    w.add_argument("--system", metavar="F.sys", help="full system for --linear")
    w.add_argument("--restrict", metavar="L.sys", help="linear equations restricting the hypersurface")
    w.add_argument("--out", required=True)
    common(w)
    w.set_defaults(func=cmd_witness)

    i = sub.add_parser("intersect", help="witness superset of A∩B")
    i.add_argument("--wa")
    i.add_argument("--wb")
    i.add_argument("--example", choices=EXAMPLES)
    i.add_argument("--mode", choices=("intrinsic", "extrinsic", "both"), default="intrinsic")
    i.add_argument("--hmax", type=int)
    i.add_argument("--h0", type=int)
    i.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    i.add_argument("--out", default="dhom_out")
    common(i)
    i.set_defaults(func=cmd_intersect)

    m = sub.add_parser("member", help="homotopy membership test")
    m.add_argument("--witness", required=True)
    m.add_argument("--point", required=True, help='comma separated, e.g. "1,0,0" or "1+2j,0"')
    m.add_argument("--tol", type=float, default=1e-6)
    common(m)
    m.set_defaults(func=cmd_member)

    b = sub.add_parser("bench", help="timing and variable-count tables")
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WitnessError, DegenerateRandomData, InconclusiveMembership, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
