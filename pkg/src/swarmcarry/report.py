"""Table-style synchronicity reports (text and CSV)."""

from __future__ import annotations

import csv
import math
from pathlib import Path

from .analysis import CorrelationReport, summarize

COLUMNS = ("group", "run", "rho_x", "rho_y", "combined")


def _fmt(x):
    return "   n/a" if x is None or math.isnan(x) else f"{x:6.2f}"


def group_reports(reports: list[tuple[str, CorrelationReport]]) -> dict[str, list[CorrelationReport]]:
    groups: dict[str, list[CorrelationReport]] = {}
    for group, rep in reports:
        groups.setdefault(group, []).append(rep)
    return groups


def format_table(reports: list[tuple[str, CorrelationReport]]) -> str:
    """Render ``(group, report)`` pairs with one section per group and its mean/std line."""
    lines = [f"{'group':<16}{'run':<22}{'rho_x':>8}{'rho_y':>8}{'combined':>10}"]
    for group, reps in group_reports(reports).items():
        lines.append("-" * 64)
        for rep in reps:
            lines.append(f"{group:<16}{rep.label:<22}{_fmt(rep.rho_x_mean):>8}{_fmt(rep.rho_y_mean):>8}{_fmt(rep.combined):>10}")
        mu, sd = summarize(reps)
        lines.append(f"{'':<16}{'mean / std (n-1)':<22}{'':>16}{_fmt(mu):>10}  sigma={_fmt(sd).strip()}")
    return "\n".join(lines)


def write_table_csv(reports: list[tuple[str, CorrelationReport]], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for group, rep in reports:
            w.writerow((group, rep.label, repr(rep.rho_x_mean), repr(rep.rho_y_mean), repr(rep.combined)))
    return path


def group_summary(reports: list[tuple[str, CorrelationReport]]) -> dict[str, dict]:
    out = {}
    for group, reps in group_reports(reports).items():
        mu, sd = summarize(reps)
        out[group] = {"mean": mu, "std": sd, "runs": len(reps), "std_convention": "sample (n-1)"}
    return out
