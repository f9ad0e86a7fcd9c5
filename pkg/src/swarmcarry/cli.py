"""Command-line entry point: ``swarmcarry {scenario,tune,run,analyze,compare}``.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analysis import synchronicity
from .catenary import horizontal_tension, payload_stiffness, vertical_tension
from .control import (
    CRAZYFLIE_MASS_KG,
    SpringDamperConfig,
    axis_gains,
    bearings_to_neighbors,
    damping_ratios,
    formation_spacing_compensation,
    tune_gains,
)
from .errors import SwarmCarryError
from .experiments import (
    LENNARD_JONES,
    NO_PAYLOAD,
    SPACING_M,
    SPRING_DAMPER,
    WINDOW_S,
    default_scenario,
    default_suite,
)
from .io import load_scenario, read_log, save_scenario, scenario_to_flat, write_log
from .report import format_table, group_summary, write_table_csv
from .sim import PayloadSpec, regular_polygon, run

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
INDEX_FILE = "index.json"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="swarmcarry", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("scenario", help="write a default scenario file")
    s.add_argument("--kind", choices=(SPRING_DAMPER, LENNARD_JONES, NO_PAYLOAD), default=SPRING_DAMPER)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", type=Path, help="file to write (default: stdout)")

    t = sub.add_parser("tune", help="tune spring-damper gains for a payload and formation")
    t.add_argument("--mass", type=float, default=0.03, help="payload mass (kg)")
    t.add_argument("--cable-length", type=float, default=0.6, help="half-curve length L (m)")
    t.add_argument("--gravity", type=float, default=9.81)
    t.add_argument("--agents", type=int, default=3, help="carriers in a regular polygon")
    t.add_argument("--spacing", type=float, default=SPACING_M, help="polygon side (m)")
    t.add_argument("--robot-mass", type=float, default=CRAZYFLIE_MASS_KG)
    t.add_argument("--add-payload-share", action="store_true", help="tune against robot mass + m/n")
    t.add_argument("--zeta", type=float, default=1.0, help="target damping ratio")
    t.add_argument("--k", type=float, default=None, help="fix the spring constant, tune only B")
    t.add_argument("--bearings", type=float, nargs="+", help="neighbor bearings in degrees (overrides polygon)")
    t.add_argument("--no-payload", action="store_true", help="k_p = 0")

    r = sub.add_parser("run", help="run a scenario, a manifest, or the default suite")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="scenario JSON file")
    src.add_argument("--manifest", type=Path, help="run manifest JSON file")
    src.add_argument("--suite", action="store_true", help="the default 11-run comparison suite")
    r.add_argument("--out", type=Path, required=False)
    r.add_argument("--seed", type=int, default=None, help="base seed override")
    r.add_argument("--repetitions", type=int, default=1)
    r.add_argument("--jobs", type=int, default=1, help="parallel worlds")

    a = sub.add_parser("analyze", help="synchronicity report for trajectory logs")
    a.add_argument("logs", type=Path, nargs="+")
    a.add_argument("--window", type=float, nargs=2, default=WINDOW_S, metavar=("START", "END"))
    a.add_argument("--out", type=Path, help="directory for report.txt / report.csv")

    c = sub.add_parser("compare", help="compare two groups of logs (mean and std of combined rho)")
    c.add_argument("--suite-dir", type=Path, help="directory written by 'run --suite'")
    c.add_argument("--group-a", type=Path, nargs="+")
    c.add_argument("--group-b", type=Path, nargs="+")
    c.add_argument("--baseline", type=Path, nargs="*", default=())
    c.add_argument("--labels", nargs=2, default=(SPRING_DAMPER, LENNARD_JONES))
    c.add_argument("--window", type=float, nargs=2, default=WINDOW_S, metavar=("START", "END"))
    c.add_argument("--out", type=Path)
    return p


def _cmd_scenario(args):
    sc = default_scenario(args.kind, args.seed)
    if args.out:
        save_scenario(sc, args.out)
    else:
        print(json.dumps(scenario_to_flat(sc), indent=2))


def _cmd_tune(args):
    spec = PayloadSpec(args.mass, args.cable_length, args.gravity)
    model = spec.model(args.agents)
    m_robot = args.robot_mass + (model.mass_kg / model.agent_count if args.add_payload_share else 0.0)
    if args.bearings:
        bearings = [math.radians(b) for b in args.bearings]
        x0 = None
    else:
        if args.agents < 2:
            raise UsageError("--agents must be at least 2")
        pts = regular_polygon(args.agents, args.spacing)
        x0 = math.dist(pts[0], pts.mean(axis=0))
        bearings = bearings_to_neighbors(pts, 0)
    if args.no_payload:
        k_p = 0.0
    else:
        if x0 is None:
            raise UsageError("--bearings needs --no-payload (no polygon to place the payload)")
        k_p = payload_stiffness(model, x0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        k, B = tune_gains(m_robot, k_p, bearings, args.zeta, k=args.k)
    gains = axis_gains(k, B, k_p, bearings)
    zx, zy = damping_ratios(m_robot, gains)
    out = {
        "k_p": k_p, "k": k, "B": B,
        "k_x": gains.k_x, "k_y": gains.k_y, "B_x": gains.B_x, "B_y": gains.B_y,
        "zeta_x": None if math.isnan(zx) else zx,
        "zeta_y": None if math.isnan(zy) else zy,
        "m_robot": m_robot,
        "bearings_deg": [math.degrees(b) for b in bearings],
        "warnings": [str(w.message) for w in caught],
    }
    if x0 is not None and not args.no_payload:
        t_x = horizontal_tension(model, x0)
        out.update(x0=x0, T_x=t_x, T_z=vertical_tension(model))
        pre = formation_spacing_compensation(SpringDamperConfig(k=k, l0=args.spacing, B=B), t_x, bearings, args.spacing)
        out["force_mode_rest_length"] = pre.l0
    print(json.dumps(out, indent=2))


def _run_one(item):
    name, sc, out_dir = item
    log = run(sc)
    path = write_log(log, Path(out_dir) / f"{name}.csv", scenario=sc)
    return str(path)


def _execute(jobs, n_jobs):
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


def _cmd_run(args):
    if args.repetitions < 1:
        raise UsageError("--repetitions must be at least 1")
    out = args.out
    groups = {}
    jobs = []
    if args.suite:
        for group, sc in default_suite(0 if args.seed is None else args.seed):
            jobs.append((sc.name, sc, out))
            groups.setdefault(group, []).append(f"{sc.name}.csv")
    else:
        if args.manifest:
            manifest = json.loads(args.manifest.read_text())
            scenario_path = Path(manifest["scenario"])
            if not scenario_path.is_absolute():
                scenario_path = args.manifest.parent / scenario_path
            seeds = manifest.get("seeds")
            reps = int(manifest.get("repetitions", len(seeds) if seeds else 1))
            if reps < 1:
                raise UsageError("manifest repetitions must be at least 1")
            if out is None and "output" in manifest:
                out = Path(manifest["output"])
                if not out.is_absolute():
                    out = args.manifest.parent / out
        else:
            scenario_path, seeds, reps = args.config, None, args.repetitions
        base = load_scenario(scenario_path)
        if seeds is None:
            start = base.seed if args.seed is None else args.seed
            seeds = [start + r for r in range(reps)]
        for seed in seeds[:reps]:
            sc = replace(base, seed=int(seed), name=f"{base.name}-seed{seed}")
            jobs.append((sc.name, sc, out))
            groups.setdefault(base.name, []).append(f"{sc.name}.csv")
    if out is None:
        raise UsageError("run needs --out (or an 'output' entry in the manifest)")
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(name, sc, out) for name, sc, _ in jobs]
    paths = _execute(jobs, args.jobs)
    (out / INDEX_FILE).write_text(json.dumps({"groups": groups}, indent=2) + "\n")
    for p in paths:
        print(p)


def _load_reports(paths, window, group):
    reports = []
    failures = []
    for p in paths:
        try:
            log = read_log(p)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                rep = synchronicity(log, window, label=Path(p).stem)
            for w in caught:
                print(f"warning: {p}: {w.message}", file=sys.stderr)
            reports.append((group, rep))
        except SwarmCarryError as exc:
            failures.append(f"{p}: {exc}")
    return reports, failures


def _emit(reports, out_dir, extra=None):
    text = format_table(reports)
    print(text)
    summary = group_summary(reports)
    if extra:
        summary.update(extra)
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "report.txt").write_text(text + "\n")
        write_table_csv(reports, out_dir / "report.csv")
        (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def _cmd_analyze(args):
    reports, failures = _load_reports(args.logs, tuple(args.window), "logs")
    for f in failures:
        print(f"error: {f}", file=sys.stderr)
    if reports:
        _emit(reports, args.out)
    if failures:
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_compare(args):
    window = tuple(args.window)
    label_a, label_b = args.labels
    if args.suite_dir:
        index = json.loads((args.suite_dir / INDEX_FILE).read_text())["groups"]
        group_paths = [(g, [args.suite_dir / f for f in files]) for g, files in index.items()]
    else:
        if not (args.group_a and args.group_b):
            raise UsageError("compare needs --suite-dir or both --group-a and --group-b")
        group_paths = [(NO_PAYLOAD, list(args.baseline)), (label_a, args.group_a), (label_b, args.group_b)]
    reports, failures = [], []
    for group, paths in group_paths:
        reps, fails = _load_reports(paths, window, group)
        reports += reps
        failures += fails
    for f in failures:
        print(f"error: {f}", file=sys.stderr)
    if reports:
        summary = _emit(reports, args.out)
        print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_RUNTIME if failures else EXIT_OK


_COMMANDS = {
    "scenario": _cmd_scenario,
    "tune": _cmd_tune,
    "run": _cmd_run,
    "analyze": _cmd_analyze,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        code = _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"swarmcarry: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SwarmCarryError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"swarmcarry: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
