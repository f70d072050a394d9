"""Run reports: structured JSON with a read path, plus aligned text tables."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .diagonal import DiagonalProblem, WitnessSuperset

__all__ = [
    "StageSummary",
    "ModeSummary",
    "RunReport",
    "build_report",
    "read_report",
    "write_report",
    "format_report",
    "format_table",
]

FORMAT = "dhom-report/1"


@dataclass
class StageSummary:
    name: str
    level_from: int | None
    level_to: int
    paths: int
    statuses: dict[str, int]
    candidates: int
    nonsolutions: int
    seconds: float


@dataclass
class ModeSummary:
    mode: str
    num_variables: int
    counts: dict[int, int]
    junk: dict[int, int]
    stages: list[StageSummary]
    outcomes: list[str]
    restarts: int
    failed: bool
    seconds: float

    @classmethod
    def from_superset(cls, sup: WitnessSuperset) -> "ModeSummary":
        stages = [
            StageSummary(
                s.name, s.level_from, s.level_to, s.num_paths, dict(sorted(s.statuses.items())),
                s.candidates, s.nonsolutions, s.wall_time,
            )
            for s in sup.stages
        ]
        return cls(
            sup.mode,
            sup.num_variables,
            sup.counts(),
            {j: len(v) for j, v in sorted(sup.junk.items())},
            stages,
            list(sup.outcomes),
            sup.restarts,
            sup.failed,
            sup.total_time,
        )


@dataclass
class RunReport:
    """Everything a run produced except the points themselves.

    ``m`` is the intrinsic variable count 2k - a - b; the extrinsic count is
    taken from the extrinsic run when there is one, else 3k.
    """

    label: str
    seed: int
    k: int
    a: int
    b: int
    deg_a: int
    deg_b: int
    hmax: int
    h0: int
    tolerances: dict[str, float]
    containment: str
    runs: list[ModeSummary] = field(default_factory=list)
    match_distance: float | None = None

    @property
    def m(self) -> int:
        return 2 * self.k - self.a - self.b

    @property
    def extrinsic_variables(self) -> int:
        for run in self.runs:
            if run.mode == "extrinsic":
                return run.num_variables
        return 3 * self.k

    def run(self, mode: str) -> ModeSummary:
        for r in self.runs:
            if r.mode == mode:
                return r
        raise KeyError(mode)

    def to_dict(self, times: bool = True) -> dict:
        data = asdict(self)
        data = {"format": FORMAT, **data, "m": self.m, "extrinsic_variables": self.extrinsic_variables}
        if data["match_distance"] is not None and not math.isfinite(data["match_distance"]):
            data["match_distance"] = "inf"
        for run in data["runs"]:
            run["counts"] = {str(j): n for j, n in run["counts"].items()}
            run["junk"] = {str(j): n for j, n in run["junk"].items()}
            if not times:
                run.pop("seconds")
                for st in run["stages"]:
                    st.pop("seconds")
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        if data.get("format") != FORMAT:
            raise ValueError(f"not a {FORMAT} document")
        runs = []
        for run in data["runs"]:
            stages = [StageSummary(**st) for st in run["stages"]]
            runs.append(
                ModeSummary(
                    run["mode"], run["num_variables"],
                    {int(j): n for j, n in run["counts"].items()},
                    {int(j): n for j, n in run["junk"].items()},
                    stages, run["outcomes"], run["restarts"], run["failed"], run["seconds"],
                )
            )
        dist = data["match_distance"]
        return cls(
            data["label"], data["seed"], data["k"], data["a"], data["b"], data["deg_a"],
            data["deg_b"], data["hmax"], data["h0"], dict(data["tolerances"]),
            data["containment"], runs, None if dist is None else float(dist),
        )


def build_report(
    label: str,
    problem: DiagonalProblem,
    supersets: list[WitnessSuperset],
    tolerances: dict[str, float],
    containment: str = "Proceed",
    match_distance: float | None = None,
) -> RunReport:
    return RunReport(
        label, problem.seed, problem.k, problem.a, problem.b, problem.wA.degree, problem.wB.degree,
        problem.hmax, problem.h0, dict(tolerances), containment,
        [ModeSummary.from_superset(s) for s in supersets], match_distance,
    )


def write_report(report: RunReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=1) + "\n", encoding="utf-8")


def read_report(path) -> RunReport:
    return RunReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def format_table(header: list[str], rows: list[list]) -> str:
    """Left-aligned first column, right-aligned rest."""
    cells = [[str(c) for c in header]] + [[_cell(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for n, row in enumerate(cells):
        parts = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(parts).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _cell(c) -> str:
    if isinstance(c, float):
        return f"{c:.3e}" if c and (abs(c) < 1e-3 or abs(c) >= 1e4) else f"{c:.4f}"
    return "" if c is None else str(c)


def format_report(report: RunReport) -> str:
    out = [
        f"{report.label}: k={report.k} dim A={report.a} deg A={report.deg_a} "
        f"dim B={report.b} deg B={report.deg_b} seed={report.seed}",
        f"variables: intrinsic m={report.m}  extrinsic={report.extrinsic_variables}",
        f"containment: {report.containment}",
    ]
    for run in report.runs:
        out.append("")
        out.append(f"[{run.mode}] {run.num_variables} variables, restarts={run.restarts}, failed={run.failed}")
        rows = [
            [
                st.name,
                "" if st.level_from is None else st.level_from,
                st.level_to,
                st.paths,
                ", ".join(f"{k}={v}" for k, v in st.statuses.items()),
                st.candidates,
                st.nonsolutions,
                st.seconds,
            ]
            for st in run.stages
        ]
        out.append(format_table(["stage", "from", "to", "paths", "statuses", "cand", "nonsol", "seconds"], rows))
        counts = "  ".join(f"W{j}={n}" for j, n in sorted(run.counts.items(), reverse=True))
        out.append(f"witness counts: {counts}   total {run.seconds:.4f} s")
    if report.match_distance is not None:
        out.append("")
        out.append(f"endpoint match distance: {report.match_distance:.3e}")
    return "\n".join(out)
