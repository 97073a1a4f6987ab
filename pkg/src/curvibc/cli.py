"""Command-line front end: ``curvibc {verify, analyze, simulate, report}``.

Exit codes: 0 success, 1 failed check or domain error, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .bc_modified import check_locus, compute_m
from .dispersion import LambdaPair, roots_k
from .eigenvectors import left_eigenvector, right_eigenvector
from .errors import ConfigError, CurvibcError
from .metrics import MeanFlow, Metric, analytic_mapping, is_orthogonal, metrics_from_coords, read_grid
from .wellposedness import detect_illposed_inflow, outflow_wellposed_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _cx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _floats(text: str, n: int | None = None, what: str = "value") -> list:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{what} needs {n} numbers, got {len(vals)}")
    return vals


def _node(text: str | None) -> tuple:
    if text is None:
        return (0, 0, 0)
    return tuple(int(v) for v in _floats(text, 3, "--node"))


def resolve_metric(args) -> Metric | None:
    """Metric from --metric, --mapping or --grid; None means random samples."""
    if getattr(args, "grid", None):
        field = metrics_from_coords(read_grid(args.grid))
        return field.at(*_node(args.node))
    if getattr(args, "mapping", None):
        params = json.loads(args.params) if args.params else {}
        node = _node(args.node)
        shape = tuple(max(n + 1, 5) for n in node)
        return analytic_mapping(args.mapping, params, shape).at(*node)
    spec = getattr(args, "metric", None)
    if spec in (None, "random"):
        return None
    if spec == "cartesian":
        return Metric.cartesian()
    return Metric(*_floats(spec, 9, "--metric"))


def _tol_overrides(items) -> dict:
    out = {}
    for item in items or []:
        key, _, val = item.partition("=")
        if key not in verify_mod.TOLERANCES or not val:
            raise UsageError(f"unknown tolerance {key!r}; known: {sorted(verify_mod.TOLERANCES)}")
        out[key] = float(val)
    return out


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _checks_csv(checks) -> str:
    buf = io.StringIO()
    fields = ["suite", "name", "sample", "mode", "value", "tol", "bound", "passed", "detail"]
    w = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore")
    w.writeheader()
    for c in checks:
        w.writerow(c.as_dict())
    return buf.getvalue()


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in verify_mod.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {('all',) + verify_mod.SUITES}")
    metric = resolve_metric(args)
    if metric is None and args.seed is None:
        raise UsageError("--seed is required for randomized suites")
    seed = 0 if args.seed is None else args.seed
    checks = verify_mod.run_suite(args.suite, args.samples, seed, metric, _tol_overrides(args.tol),
                                  args.orthogonal_samples)
    summary = verify_mod.summarize(checks)
    if args.format == "csv":
        _emit(_checks_csv(checks), args.output)
    else:
        report = {"suite": args.suite, "samples": args.samples, "seed": seed,
                  "generator": "numpy.random.Generator(PCG64)", "summary": summary,
                  "checks": [c.as_dict() for c in checks]}
        _emit(json.dumps(report, indent=2) + "\n", args.output)
    print(f"{args.suite}: {summary['n_checks']} checks, {summary['n_failed']} failed", file=sys.stderr)
    return EXIT_OK if summary["passed"] else EXIT_FAIL


def _flow(args) -> MeanFlow:
    u, v, w = _floats(args.flow, 3, "--flow")
    if args.rho is not None or args.c is not None:
        return MeanFlow(u, v, w, args.rho or 1.0, args.c or 1.0, dimensional=True)
    return MeanFlow(u, v, w)


def cmd_analyze(args) -> int:
    m = resolve_metric(args) or Metric.cartesian()
    flow = _flow(args)
    nd = flow.nondimensionalized() if flow.dimensional else flow
    if args.lam is not None:
        l1, l2 = _floats(args.lam, 2, "--lambda")
        omega = args.omega
        l, mw = l1 * omega, l2 * omega
    else:
        l, mw, omega = args.l, args.m, args.omega
    roots = roots_k(m, flow, l, mw, omega)
    out = {"metric": m.as_matrix().tolist(), "flow": [flow.u_bar, flow.v_bar, flow.w_bar],
           "l": l, "m": mw, "omega": omega, **roots.as_dict()}
    if omega != 0:
        lp = LambdaPair(l / omega, mw / omega)
        out["eigenvectors"] = [
            {"n": n, "right": [_cx(z) for z in right_eigenvector(n, m, nd, lp, omega)],
             "left": [_cx(z) for z in left_eigenvector(n, m, nd, lp, omega)]}
            for n in range(1, 6)
        ]
    if is_orthogonal(m) and (l or mw):
        out["inflow_critical"] = detect_illposed_inflow(m, nd, l, mw).as_dict()
        out["outflow_critical"] = outflow_wellposed_check(m, nd, n=args.sweep)
    if args.modified:
        c = compute_m(m, nd, args.form)
        mod = c.as_dict()
        mod["abs_A2"] = abs(c.A2)
        if is_orthogonal(m) and (l or mw):
            mod["locus"] = check_locus(m, nd, l, mw, args.form).as_dict()
        out["modified"] = mod
    print(json.dumps(out, indent=2))
    return EXIT_OK


SHIPPED = ("normal_incidence", "oblique_30", "hard_wall")


def _config_path(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    if name in SHIPPED:
        return Path(str(resources.files("curvibc") / "configs" / f"{name}.toml"))
    raise ConfigError(f"config {name!r} not found (shipped: {', '.join(SHIPPED)})")


def _overrides(items) -> dict:
    """--set section.key=value pairs; values parse as Python literals when possible."""
    out = {}
    for item in items or []:
        key, eq, raw = item.partition("=")
        section, dot, field = key.partition(".")
        if not eq or not dot:
            raise UsageError(f"--set expects section.key=value, got {item!r}")
        try:
            val = ast.literal_eval(raw)
        except (ValueError, SyntaxError):
            val = raw
        out.setdefault(section, {})[field] = val
    return out


def cmd_simulate(args) -> int:
    from .lee_sim import config as sim_config
    from .lee_sim import kernels, output
    from .lee_sim.reflection import measure_reflection, run_reference
    from .lee_sim.solver import Simulation

    cfg = sim_config.load(_config_path(args.config))
    sets = _overrides(args.set)
    if sets:
        cfg = cfg.replace(**sets)
    if args.threads:
        kernels.set_threads(args.threads)
    outdir = Path(args.out or Path("runs") / cfg.run.name)

    def progress(state, n=cfg.time.n_steps):
        if state.step % 50 == 0:
            print(f"step {state.step}/{n} t = {state.t:g}", file=sys.stderr)
    result = Simulation(cfg).run(progress=progress if args.verbose else None)
    refl = None
    if cfg.run.measure_reflection:
        ref, _ = run_reference(cfg)
        refl = measure_reflection(result, ref)
    output.write_run(result, outdir, refl)
    msg = f"wrote {outdir}"
    if refl is not None:
        msg += f"; reflection ratio {refl.ratio:.4g}"
    print(msg, file=sys.stderr)
    return EXIT_OK


REPORT_FIELDS = ("name", "inflow", "outflow", "mapping", "angle_deg", "ratio", "incident", "reflected",
                 "config_hash")


def cmd_report(args) -> int:
    from .lee_sim.output import read_summary

    rows = []
    for d in args.runs:
        s = read_summary(d)
        cfg = s["config"]
        refl = s.get("reflection") or {}
        rows.append({
            "name": s["name"], "inflow": cfg["boundary"]["inflow"], "outflow": cfg["boundary"]["outflow"],
            "mapping": cfg["grid"]["mapping"], "angle_deg": cfg["pulse"]["angle_deg"],
            "ratio": refl.get("ratio"), "incident": refl.get("incident"), "reflected": refl.get("reflected"),
            "config_hash": s["config_hash"],
        })
    if args.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", args.output)
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=REPORT_FIELDS)
        w.writeheader()
        w.writerows(rows)
        _emit(buf.getvalue(), args.output)
    return EXIT_OK


def _metric_args(p) -> None:
    p.add_argument("--metric", help="'random', 'cartesian' or nine comma-separated components")
    p.add_argument("--mapping", help="analytic mapping id")
    p.add_argument("--params", help="mapping parameters as JSON")
    p.add_argument("--grid", help="structured grid file")
    p.add_argument("--node", help="grid node i,j,k for --mapping/--grid (default 0,0,0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curvibc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("--suite", required=True)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--orthogonal-samples", type=int, default=20)
    v.add_argument("--seed", type=int)
    v.add_argument("--tol", action="append", metavar="NAME=VALUE")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--output")
    _metric_args(v)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("analyze", help="roots, eigenvectors and critical matrices at one point")
    _metric_args(a)
    a.add_argument("--flow", default="0.5,0,0", help="mean velocity u,v,w")
    a.add_argument("--rho", type=float)
    a.add_argument("--c", type=float)
    a.add_argument("--l", type=float, default=0.0)
    a.add_argument("--m", type=float, default=0.0)
    a.add_argument("--omega", type=float, default=1.0)
    a.add_argument("--lambda", dest="lam", help="lambda1,lambda2 (uses --omega)")
    a.add_argument("--modified", action="store_true")
    a.add_argument("--form", choices=("norms", "exact"), default="norms")
    a.add_argument("--sweep", type=int, default=50)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="run a simulation config")
    s.add_argument("config", help="TOML file or shipped name: " + ", ".join(SHIPPED))
    s.add_argument("--out")
    s.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE")
    s.add_argument("--threads", type=int)
    s.add_argument("--verbose", action="store_true")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("report", help="compare simulation runs")
    r.add_argument("runs", nargs="+")
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--output")
    r.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CurvibcError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
