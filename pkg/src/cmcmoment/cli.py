"""Command line runner: ``cmcmoment run <config>`` and ``cmcmoment list-fixtures``.

A config is a JSON or YAML mapping::

    K: 0.0
    family: {kind: cylinder, params: {r: 1.0}}
    cycles:                      # optional; defaults to the family's cycles
      - {kind: coordinate_u, anchor: 0.0}
      - {kind: coordinate_u, anchor: 0.7, period: 6.283185307179586}
      - {kind: square, center: [0.3, 0.2], side: 0.3}
    quadrature: {order: 16, panels: 16}
    suites: [closedness, homology, representatives]
    tolerances: {closedness: 1.0e-6}
    seed: 0
    output: {dir: out}

Exit codes: 0 if every check passes, 1 if a check fails, 2 for config errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .calculus import ConvergenceError, QuadratureSpec, coordinate_u, coordinate_v, family_cycles, square
from .spaceform import KILLING_LABELS, make_spaceform
from .surfaces import FAMILIES, catalog, make_family
from .suites import DEFAULT_TOLERANCES, PROPERTIES, RUNNERS, SUITES, Context, NotApplicable

OUT_DIR_ENV = "CMCMOMENT_OUT_DIR"
DEFAULT_OUT_DIR = "cmcmoment-out"
PERIOD_FORMS = ("moment_S", "moment_classical", "chart_formula", "kks")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    K: float
    family: str
    params: dict
    cycles: list
    quad: QuadratureSpec
    suites: list
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    out_dir: str | None = None


def load_config(path) -> dict:
    text = Path(path).read_text()
    try:
        if str(path).endswith(".json"):
            data = json.loads(text)
        else:
            data = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return data


def _quad(d, default=None):
    d = d or {}
    base = default or QuadratureSpec()
    try:
        return QuadratureSpec(int(d.get("order", base.order)), int(d.get("panels", base.panels)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad quadrature spec {d}: {exc}") from None


def parse_config(data: dict) -> RunConfig:
    known = {"K", "family", "cycles", "quadrature", "suites", "tolerances", "seed", "output"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    fam = data.get("family")
    if isinstance(fam, str):
        fam = {"kind": fam}
    if not isinstance(fam, dict) or "kind" not in fam:
        raise ConfigError("family must be given as {kind: ..., params: {...}}")
    if fam["kind"] not in FAMILIES:
        raise ConfigError(f"unknown family {fam['kind']!r}; known: {sorted(FAMILIES)}")
    suites = data.get("suites", [])
    if isinstance(suites, str):
        suites = [suites]
    bad = [s for s in suites if s not in SUITES]
    if bad:
        raise ConfigError(f"unknown suites {bad}; known: {list(SUITES)}")
    tol = data.get("tolerances", {}) or {}
    bad = [k for k in tol if k not in DEFAULT_TOLERANCES]
    if bad:
        raise ConfigError(f"unknown tolerance keys {bad}")
    if "K" not in data:
        raise ConfigError("config needs the curvature K")
    try:
        K = float(data["K"])
        seed = int(data.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(K=K, family=fam["kind"], params=dict(fam.get("params", {}) or {}),
                     cycles=list(data.get("cycles", []) or []), quad=_quad(data.get("quadrature")),
                     suites=list(suites), tolerances={k: float(v) for k, v in tol.items()}, seed=seed,
                     out_dir=(data.get("output") or {}).get("dir"))


def build_cycles(cfg: RunConfig, fam):
    if not cfg.cycles:
        return family_cycles(fam), [cfg.quad] * len(fam.default_cycles)
    cycles, quads = [], []
    for c in cfg.cycles:
        kind = c.get("kind")
        try:
            if kind == "coordinate_u":
                cyc = coordinate_u(float(c["anchor"]), float(c.get("period", fam.u_period or 2 * np.pi)))
            elif kind == "coordinate_v":
                cyc = coordinate_v(float(c["anchor"]), float(c.get("period", fam.v_period or 2 * np.pi)))
            elif kind == "square":
                cyc = square(c["center"], float(c["side"]))
            else:
                raise ConfigError(f"unknown cycle kind {kind!r}")
        except KeyError as exc:
            raise ConfigError(f"cycle {c} is missing {exc}") from None
        cycles.append(cyc)
        quads.append(_quad(c.get("quadrature"), cfg.quad))
    return cycles, quads


def prepare(cfg: RunConfig, tol_scale=1.0) -> Context:
    try:
        fam = make_family(cfg.family, **cfg.params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot build family {cfg.family}: {exc}") from None
    if abs(fam.K - cfg.K) > 1e-12:
        raise ConfigError(f"family {cfg.family} lives in curvature {fam.K}, config says K = {cfg.K}")
    cycles, quads = build_cycles(cfg, fam)
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(cfg.tolerances)
    # one quadrature rule per run: the finest requested
    quad = max(quads, key=lambda q: q.order * q.panels) if quads else cfg.quad
    return Context(make_spaceform(cfg.K), fam, cycles, quad, tolerances, tol_scale, cfg.seed)


def run_suites(ctx: Context, suites):
    results = []
    for name in suites:
        entry = {"suite": name, "property": PROPERTIES[name]}
        try:
            checks = RUNNERS[name](ctx)
        except NotApplicable as exc:
            entry.update(status="skipped", reason=str(exc), checks=[])
        except ConvergenceError as exc:
            entry.update(status="fail", reason=str(exc), checks=[])
        else:
            entry["checks"] = [c.as_dict() for c in checks]
            ok = all(c["passed"] for c in entry["checks"] if not c["informational"])
            entry["status"] = "pass" if ok else "fail"
        results.append(entry)
    return results


def _fmt(x):
    return format(float(x), ".17g")


def write_periods(path, ctx: Context):
    labels = [c.label for c in ctx.cycles]
    forms = [f for f in PERIOD_FORMS if any(f in ctx.periods.get(l, {}) for l in labels)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cycle"] + [f"{f}:{k}" for f in forms for k in KILLING_LABELS])
        for l in labels:
            row = [l]
            for f in forms:
                vals = ctx.periods.get(l, {}).get(f)
                row += [_fmt(v) for v in vals] if vals is not None else [""] * 6
            w.writerow(row)


def summary_text(report):
    lines = [f"family {report['family']} {report['params']}  K = {report['K']}  seed = {report['seed']}"]
    for s in report["suites"]:
        if not s["checks"]:
            lines.append(f"[{s['status']}] {s['suite']}: {s['reason']}")
            continue
        lines.append(f"[{s['status']}] {s['suite']}: {s['property']}")
        for c in s["checks"]:
            tag = "info" if c["informational"] else ("ok" if c["passed"] else "FAIL")
            lines.append(f"    {tag:4s} {c['name']}: {c['residual']:.3e} (tol {c['tolerance']:.1e})")
    lines.append("ALL CHECKS PASSED" if report["passed"] else "SOME CHECKS FAILED")
    return "\n".join(lines) + "\n"


def _compute_periods(ctx: Context):
    # periods.csv is written even if representatives is not selected
    from .suites import classical_periods, moment_periods
    for cyc in ctx.cycles:
        p = ctx.periods.setdefault(cyc.label, {})
        if "moment_S" not in p:
            p["moment_S"] = moment_periods(ctx, cyc, "moment_S")
            p["moment_classical"] = moment_periods(ctx, cyc, "moment_classical")
            p["chart_formula"] = classical_periods(ctx, cyc)


def run(cfg: RunConfig, out_dir, tol_scale=1.0, stream=None) -> int:
    stream = stream or sys.stdout
    if not cfg.suites:
        raise ConfigError("select at least one suite")
    ctx = prepare(cfg, tol_scale)
    results = run_suites(ctx, cfg.suites)
    _compute_periods(ctx)
    passed = all(s["status"] != "fail" for s in results)
    report = {"family": cfg.family, "params": cfg.params, "K": cfg.K, "seed": cfg.seed,
              "tolerance_scale": tol_scale,
              "quadrature": {"order": ctx.quad.order, "panels": ctx.quad.panels},
              "cycles": [c.label for c in ctx.cycles], "killing_basis": list(KILLING_LABELS),
              "suites": results, "passed": passed}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report, indent=2, default=float) + "\n")
    write_periods(out / "periods.csv", ctx)
    text = summary_text(report)
    (out / "summary.txt").write_text(text)
    stream.write(text)
    return 0 if passed else 1


def list_fixtures(stream=None):
    stream = stream or sys.stdout
    for row in catalog():
        stream.write(f"{row['kind']}  K = {row['K']:g}  cmc = {row['cmc']}\n")
        stream.write(f"    {row['description']}\n")
        stream.write(f"    parameters: {row['defaults']}  ranges: {row['ranges']}\n")
        stream.write(f"    default cycles: {row['default_cycles']}\n")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="cmcmoment", description="Moment class verification runner")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the suites of a config file")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--out-dir")
    r.add_argument("--suite", action="append", choices=SUITES, help="repeatable; overrides the config")
    r.add_argument("--tolerance-scale", type=float, default=1.0)
    sub.add_parser("list-fixtures", help="describe the surface families")
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    if args.command == "list-fixtures":
        list_fixtures()
        return 0
    try:
        cfg = parse_config(load_config(args.config))
        if args.seed is not None:
            cfg.seed = args.seed
        if args.suite:
            cfg.suites = list(args.suite)
        if not args.tolerance_scale > 0:
            raise ConfigError("--tolerance-scale must be positive")
        out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV) or cfg.out_dir or DEFAULT_OUT_DIR
        return run(cfg, out_dir, args.tolerance_scale)
    except (ConfigError, OSError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except ValueError as exc:
        # e.g. a cycle leaving the family's parameter domain
        sys.stderr.write(f"invalid setup: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
