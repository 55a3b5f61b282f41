"""Batch command line: ``verify``, ``sweep``, ``identities`` and ``flow-check``.

Exit codes: 0 when every status is ``pass`` or ``equality``; 2 on any
``fail``; 3 when the only non-passing status is ``hypothesis_failed``; 1 on
I/O or schema errors.
"""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .errors import SchemaError, WulffError
from .flow import gauss_coverage_check, inclusion_spotcheck, neighborhood_volume_check
from .identities import NORM_CHOICES, run_identities
from .verifier import Scenario, _jsonable, build_scenario, verify

THREADS_ENV = "WULFF_WILLMORE_THREADS"
FLOW_CHECKS = ("volume", "coverage", "inclusion")
SWEEP_PARAMETERS = ("order", "samples", "R")
EXIT_OK, EXIT_IO, EXIT_FAIL, EXIT_HYPOTHESIS = 0, 1, 2, 3


class UsageError(Exception):
    """Bad input detected by the CLI itself (reported with exit code 1)."""


# ---------------------------------------------------------------------------
# config handling


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
    if isinstance(data, list):
        data = {"scenarios": data}
    if not isinstance(data, dict):
        raise SchemaError("config: expected an object or a list of scenarios")
    if "scenarios" not in data and "theorem" in data:
        data = {"scenarios": [data]}
    data.setdefault("scenarios", [])
    data.setdefault("flow_checks", [])
    data["_base_dir"] = str(path.resolve().parent)
    return data


def parse_scenarios(config, names=None, seed=None, order=None):
    out = []
    for k, raw in enumerate(config["scenarios"]):
        if not isinstance(raw, dict):
            raise SchemaError(f"scenarios[{k}]: expected an object")
        raw = dict(raw)
        raw.setdefault("name", f"scenario_{k}")
        if any(sc.name == raw["name"] for sc in out):
            raise SchemaError(f"scenarios[{k}]: duplicate name {raw['name']!r}")
        if seed is not None:
            raw["seed"] = seed
        elif "seed" in config and "seed" not in raw:
            raw["seed"] = config["seed"]
        if order is not None:
            raw["order"] = order
        try:
            sc = Scenario.from_dict(raw, config["_base_dir"])
        except SchemaError as exc:
            raise SchemaError(f"scenarios[{k}] ({raw['name']}): {exc}") from None
        out.append(sc)
    if names:
        known = {sc.name for sc in out}
        missing = [n for n in names if n not in known]
        if missing:
            raise UsageError(f"unknown scenario(s): {', '.join(missing)}")
        out = [sc for sc in out if sc.name in names]
    return out


def _threads(args):
    if args.threads is not None:
        n = args.threads
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("thread count must be at least 1")
    return n


def _pmap(func, items, threads):
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(func, items))


def _dumps(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit_json(obj, target):
    text = _dumps(obj)
    if target == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(target).write_text(text)
        except OSError as exc:
            raise UsageError(f"cannot write {target}: {exc.strerror}") from None


def _out_dir(args):
    if args.out_dir is None:
        return None
    path = Path(args.out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {path}: {exc.strerror}") from None
    return path


def exit_code(statuses):
    statuses = list(statuses)
    if any(s == "fail" for s in statuses):
        return EXIT_FAIL
    if any(s == "hypothesis_failed" for s in statuses):
        return EXIT_HYPOTHESIS
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def run_verify(scenarios, threads=1):
    """Reports in scenario order; independent of the thread count."""
    reports = _pmap(verify, scenarios, threads)
    return [(sc.name, rep.to_dict()) for sc, rep in zip(scenarios, reports)]


def cmd_verify(args):
    config = load_config(_need_config(args))
    scenarios = parse_scenarios(config, args.scenario, args.seed, args.order)
    if not scenarios:
        raise UsageError("no scenarios to verify")
    results = run_verify(scenarios, _threads(args))
    out_dir = _out_dir(args)
    if out_dir is not None:
        for name, rep in results:
            (out_dir / f"{name}.json").write_text(_dumps(rep))
    if args.json is not None:
        payload = results[0][1] if len(results) == 1 else \
            {"reports": {name: rep for name, rep in results}}
        _emit_json(payload, args.json)
    if args.json != "-":
        for name, rep in results:
            rel = rep["relative_margin"]
            rel = "nan" if rel is None else f"{rel:+.3e}"
            print(f"{name:40s} {rep['status']:18s} lhs={_fmt(rep['lhs'])} "
                  f"rhs={_fmt(rep['rhs'])} rel_margin={rel}")
    return exit_code(rep["status"] for _, rep in results)


def _fmt(x):
    return "nan" if x is None else f"{x:.10g}"


def _need_config(args):
    if args.config is None:
        raise UsageError("--config is required")
    return args.config


# ---------------------------------------------------------------------------
# flow checks


def _flow_entries(config, args):
    entries = []
    for k, raw in enumerate(config["flow_checks"]):
        if not isinstance(raw, dict) or "scenario" not in raw:
            raise SchemaError(f"flow_checks[{k}]: expected an object with a 'scenario' field")
        check = raw.get("check", "volume")
        if check not in FLOW_CHECKS:
            raise SchemaError(f"flow_checks[{k}]: unknown check {check!r}")
        entry = dict(raw, check=check)
        entry.setdefault("name", f"{raw['scenario']}:{check}")
        entries.append(entry)
    if args.scenario:
        entries = [e for e in entries if e["scenario"] in args.scenario or e["name"] in args.scenario]
    if args.check:
        entries = [e for e in entries if e["check"] == args.check]
    if args.scenario and not entries:
        # ad-hoc check on a named scenario
        for name in args.scenario:
            entries.append({"name": f"{name}:{args.check or 'volume'}", "scenario": name,
                            "check": args.check or "volume"})
    return entries


def run_flow_check(entry, scenario, samples=None, seed=None, threads=1, R=None):
    """One flow check; returns a JSON-ready record with a ``status``.

    ``entry["norm"]`` replaces the scenario's norm (the surface is unchanged
    unless it is a Wulff shape of that norm).
    """
    if "norm" in entry:
        data = scenario.to_dict()
        data["norm"] = entry["norm"]
        scenario = Scenario.from_dict(data, scenario.base_dir)
    F, K, patch = build_scenario(scenario)
    seed = entry.get("seed", scenario.seed) if seed is None else seed
    check = entry["check"]
    rec = {"name": entry["name"], "scenario": scenario.name, "check": check, "seed": seed,
           "norm": F.params()}
    if check == "volume":
        radii = [R] if R is not None else entry.get("R", [4.0])
        radii = radii if isinstance(radii, list) else [radii]
        n = int(samples if samples is not None else entry.get("samples", 1_000_000))
        runs = [asdict(neighborhood_volume_check(F, K, patch, float(r), n, seed,
                                                 scenario.order, threads=threads))
                for r in radii]
        rec["runs"] = runs
        rec["status"] = "pass" if all(r["verdict"] for r in runs) else "fail"
    elif check == "coverage":
        mode = entry.get("mode", "free_boundary")
        omega0 = entry.get("omega0", scenario.omega0)
        res = gauss_coverage_check(F, patch, mode, int(entry.get("targets", 200)), seed,
                                   omega0, jacobian_samples=int(entry.get("jacobian_samples", 100)))
        rec.update(asdict(res))
        rec["missed"] = len(res.missed)
        ok = res.hit_fraction == 1.0 and res.max_residual <= 1e-8 and res.jacobian_error <= 1e-6
        rec["status"] = "pass" if ok else "fail"
    else:
        r = float(R if R is not None else entry.get("R", 2.0))
        n = int(samples if samples is not None else entry.get("samples", 2000))
        res = inclusion_spotcheck(F, K, patch, r, n, seed)
        res.pop("samples", None)
        rec.update(res, R=r)
        ok = res["checked"] > 0 and res["fraction"] == 1.0
        rec["status"] = "pass" if ok else "fail"
    return rec


def cmd_flow_check(args):
    config = load_config(_need_config(args))
    scenarios = {sc.name: sc for sc in parse_scenarios(config, seed=args.seed, order=args.order)}
    entries = _flow_entries(config, args)
    if not entries:
        raise UsageError("no flow checks selected")
    for e in entries:
        if e["scenario"] not in scenarios:
            raise UsageError(f"flow check {e['name']}: unknown scenario {e['scenario']!r}")
    threads = _threads(args)
    R = args.R[0] if args.R and len(args.R) == 1 else None
    records = []
    for e in entries:
        if args.R and len(args.R) > 1:
            e = dict(e, R=list(args.R))
        records.append(run_flow_check(e, scenarios[e["scenario"]], args.samples, args.seed,
                                      threads, R))
    out_dir = _out_dir(args)
    if out_dir is not None:
        for rec in records:
            (out_dir / f"flow_{rec['name'].replace(':', '_')}.json").write_text(_dumps(rec))
    if args.json is not None:
        _emit_json(records[0] if len(records) == 1 else {"checks": records}, args.json)
    if args.json != "-":
        for rec in records:
            print(f"{rec['name']:40s} {rec['status']:6s} {_flow_summary(rec)}")
    return exit_code(r["status"] for r in records)


def _flow_summary(rec):
    if rec["check"] == "volume":
        return "; ".join(
            f"R={r['R']:g} mc={r['mc_volume']:.6g}±{r['sigma']:.2g} bound={r['bound']:.6g} "
            f"ratio={r['ratio']:.5g} target={r['avr_target']:.5g}" for r in rec["runs"])
    if rec["check"] == "coverage":
        return (f"hits={rec['hits']}/{rec['targets']} residual={rec['max_residual']:.2e} "
                f"jacobian={rec['jacobian_error']:.2e}")
    return f"checked={rec['checked']} fraction={rec['fraction']}"


# ---------------------------------------------------------------------------
# sweep


def _grid(args):
    if not args.grid:
        defaults = {"order": [8, 16, 32, 64], "samples": [10_000, 40_000, 160_000],
                    "R": [2.0, 4.0, 8.0, 16.0]}
        return defaults[args.parameter]
    try:
        vals = [float(v) for v in args.grid.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad --grid {args.grid!r}") from None
    if args.parameter in ("order", "samples"):
        vals = [int(v) for v in vals]
    return vals


def sweep_rows(scenario, parameter, grid, samples=None, R=4.0, threads=1):
    rows = []
    for v in grid:
        if parameter == "order":
            data = scenario.to_dict()
            data["order"] = int(v)
            rep = verify(Scenario.from_dict(data, scenario.base_dir))
            rows.append({"parameter": v, "lhs": rep.lhs, "rhs": rep.rhs, "margin": rep.margin,
                         "error_estimate": rep.lhs_error})
            continue
        F, K, patch = build_scenario(scenario)
        n = int(v) if parameter == "samples" else int(samples or 200_000)
        radius = float(v) if parameter == "R" else float(R)
        res = neighborhood_volume_check(F, K, patch, radius, n, scenario.seed, scenario.order,
                                        threads=threads)
        rows.append({"parameter": v, "lhs": res.mc_volume, "rhs": res.bound,
                     "margin": res.mc_volume - res.bound, "error_estimate": res.half_width_99,
                     "ratio": res.ratio, "target": res.avr_target})
    return rows


def cmd_sweep(args):
    config = load_config(_need_config(args))
    names = args.scenario or []
    if len(names) != 1:
        raise UsageError("sweep needs exactly one --scenario")
    (scenario,) = parse_scenarios(config, names, args.seed, args.order)
    grid = _grid(args)
    rows = sweep_rows(scenario, args.parameter, grid, args.samples,
                      args.R[0] if args.R else 4.0, _threads(args))
    buf = io.StringIO()
    fields = list(rows[0].keys())
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: repr(float(v)) if isinstance(v, float) else v for k, v in r.items()})
    out_dir = _out_dir(args)
    if out_dir is not None:
        (out_dir / f"sweep_{scenario.name}_{args.parameter}.csv").write_text(buf.getvalue())
    if args.json is not None:
        _emit_json({"scenario": scenario.name, "parameter": args.parameter, "rows": rows},
                   args.json)
    if out_dir is None and args.json != "-":
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------
# identities


def cmd_identities(args):
    if args.theta0 is not None and not 0.0 < args.theta0 < np.pi:
        raise UsageError("theta0 out of open interval (0, π)")
    summary = run_identities(args.norm, args.theta0, args.trials,
                             0 if args.seed is None else args.seed)
    out_dir = _out_dir(args)
    if out_dir is not None:
        (out_dir / "identities.json").write_text(_dumps(summary))
    if args.json is not None:
        _emit_json(summary, args.json)
    if args.json != "-":
        for g in summary["groups"]:
            print(f"{g['group']:18s} {'pass' if g['passed'] else 'FAIL':5s} "
                  f"worst={g['worst_residual']:.2e} ({g['tolerance']})")
        print(f"{len(summary['groups'])} identity groups, "
              f"{'all passed' if summary['passed'] else 'some failed'}")
    return EXIT_OK if summary["passed"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# entry point


def _common(p):
    p.add_argument("--config", help="scenario file (JSON)")
    p.add_argument("--scenario", action="append",
                   help="restrict to a named scenario (repeatable)")
    p.add_argument("--order", type=int, help="override the quadrature order")
    p.add_argument("--samples", type=int, help="Monte-Carlo sample count")
    p.add_argument("--seed", type=int, help="override the random seed")
    p.add_argument("--threads", type=int,
                   help=f"worker threads (default: ${THREADS_ENV} or 1)")
    p.add_argument("--json", metavar="PATH", help="write JSON output to PATH ('-' for stdout)")
    p.add_argument("--out-dir", help="directory for per-item output files")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wulff-willmore",
        description="Numerical checks of anisotropic Willmore-type inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify inequality scenarios")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="convergence table (CSV) for one scenario")
    _common(p)
    p.add_argument("--parameter", choices=SWEEP_PARAMETERS, default="order")
    p.add_argument("--grid", help="comma-separated grid values")
    p.add_argument("--R", type=float, nargs="+", help="radius for samples sweeps")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("identities", help="run the norm identity suites")
    _common(p)
    p.add_argument("--norm", choices=NORM_CHOICES, help="restrict to one norm family")
    p.add_argument("--theta0", type=float, help="angle of the capillary norm")
    p.add_argument("--trials", type=int, default=1000, help="random samples per check")
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("flow-check", help="parallel-flow volume, inclusion and coverage checks")
    _common(p)
    p.add_argument("--check", choices=FLOW_CHECKS, help="restrict to one kind of check")
    p.add_argument("--R", type=float, nargs="+", help="override the radii")
    p.set_defaults(func=cmd_flow_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except WulffError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
