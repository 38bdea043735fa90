"""Report and CSV emission.

Reports pair a human-readable summary with a machine-readable
``[key_values]`` block (sorted ``key = value`` lines, floats via repr), and
contain no timestamps or timings, so identical inputs produce byte-identical
files.  CSV dumps carry one row per grid node; cone margin and residual
columns are empty on boundary nodes, where they are not defined.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .grid import ScalarField
from .problems import ProblemSpec
from .solver import SolveDiagnostics, solution_node_fields

CSV_FORMAT_VERSION = 1
REPORT_FORMAT_VERSION = 1


@dataclass
class Report:
    title: str
    lines: list = field(default_factory=list)
    keys: dict = field(default_factory=dict)

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def record(self, key: str, value) -> None:
        self.keys[key] = value

    def render(self) -> str:
        out = [self.title, "=" * len(self.title), ""]
        out.extend(self.lines)
        out.append("")
        out.append("[key_values]")
        out.append(f"report_format_version = {REPORT_FORMAT_VERSION}")
        for key in sorted(self.keys):
            out.append(f"{key} = {_fmt(self.keys[key])}")
        return "\n".join(out) + "\n"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return "(" + ", ".join(_fmt(v) for v in value) + ")"
    return str(value)


def diagnostics_into(report: Report, diag: SolveDiagnostics, prefix: str = "") -> None:
    p = prefix
    report.record(p + "K", diag.K)
    report.record(p + "F_trace_min", diag.F_trace)
    report.record(p + "sandwich_violation", diag.sandwich_violation)
    report.record(p + "c0_boundary", diag.c0_boundary)
    report.record(p + "c2_ratio", diag.c2_ratio)
    report.record(p + "sup_hessian", diag.sup_hessian)
    report.record(p + "boundary_sup_hessian", diag.boundary_sup_hessian)
    report.record(p + "amgm_min_slack", diag.amgm_min_slack)
    report.record(p + "final_residual", diag.final_residual)
    report.record(p + "anchor_residual", diag.anchor_residual)
    report.record(p + "homotopy_steps", len(diag.states))
    report.record(p + "newton_iters_total", sum(s.newton_iters for s in diag.states))
    report.record(p + "min_margin_final", diag.states[-1].min_margin)
    if diag.barrier_report is not None:
        b = diag.barrier_report
        report.record(p + "barrier_min_v", b.min_v)
        report.record(p + "barrier_epsilon", b.epsilon)
        report.record(p + "barrier_collar_nodes", b.collar_nodes)
        report.record(p + "barrier_smooth_nodes", b.smooth_nodes)
        report.record(p + "barrier_degenerate", b.degenerate_collar)
    report.line(f"t reached 1 in {len(diag.states)} accepted states; "
                f"final residual {diag.final_residual:.3e}")
    report.line(f"sandwich violation {diag.sandwich_violation:.3e}; "
                f"boundary trace {diag.c0_boundary:.6f}; K {diag.K:.6f}")


def write_solution_csv(path, problem: ProblemSpec, u) -> None:
    """Node table: coordinates, u, cone margin, normalized residual."""
    margins, residual = solution_node_fields(problem, u)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        if problem.geometry == "box":
            grid = problem.box.grid
            n = grid.n
            coord_names = []
            for j in range(n):
                coord_names += [f"x{j + 1}", f"y{j + 1}"]
            writer.writerow(
                [f"csv_format_version={CSV_FORMAT_VERSION}"]
                + [""] * (len(coord_names) + 2)
            )
            writer.writerow(coord_names + ["u", "cone_margin", "ftilde_residual"])
            uv = u.values if isinstance(u, ScalarField) else np.asarray(u)
            pts = grid.points()
            res = grid.resolution
            for node in np.ndindex(grid.shape):
                row = [repr(float(c)) for c in pts[node]]
                row.append(repr(float(uv[node])))
                if all(1 <= i <= res - 2 for i in node):
                    idx = tuple(i - 1 for i in node)
                    row.append(repr(float(margins[idx])))
                    row.append(repr(float(residual[idx])))
                else:
                    row += ["", ""]
                writer.writerow(row)
        else:
            rad = problem.radial
            writer.writerow([f"csv_format_version={CSV_FORMAT_VERSION}", "", "", ""])
            writer.writerow(["s", "u", "cone_margin", "ftilde_residual"])
            uv = np.asarray(u)
            s = rad.grid.s
            m = rad.grid.points - 1
            for i in range(rad.grid.points):
                row = [repr(float(s[i])), repr(float(uv[i]))]
                if i < m:
                    row.append(repr(float(margins[i])))
                    row.append(repr(float(residual[i])))
                else:
                    row += ["", ""]
                writer.writerow(row)
