"""Command line: ``grwcurv {identities,report,lrh-verify,maxprin,audit}``.

Exit status is 0 when every check passes, 1 when a check fails or a sample is
geometrically invalid, and 2 for usage and configuration errors.  Reports are
JSON on stdout unless ``--out`` is given; without ``--out`` and with
``GRWCURV_OUTPUT_DIR`` set, files go to that directory under the command name.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

from . import families, runner
from .errors import ConfigurationError, GeometryError, PreconditionError

OUTPUT_ENV = "GRWCURV_OUTPUT_DIR"


def _target(args, stem: str) -> Path | None:
    if getattr(args, "out", None):
        return Path(args.out)
    env = os.environ.get(OUTPUT_ENV)
    if env:
        return Path(env) / stem
    return None


def _write(path: Path | None, payload, suffix=".json", text=None) -> None:
    text = runner.dumps(payload) if text is None else text
    if path is None:
        sys.stdout.write(text)
        return
    if path.suffix in (".json", ".csv"):
        path = path.with_suffix("")
    path = path.with_name(path.name + suffix)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}", file=sys.stderr)


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: not valid JSON ({exc})") from None


def cmd_identities(args) -> int:
    cfg = runner.IdentityConfig()
    if args.config:
        d = _read_json(args.config)
        known = {f.name for f in fields(cfg)}
        bad = set(d) - known
        if bad:
            raise ConfigurationError(f"unknown config keys: {', '.join(sorted(bad))}")
        for k, v in d.items():
            setattr(cfg, k, tuple(v) if k == "dims" else v)
    for name in ("seed", "matrices", "spectra", "grid", "rtol"):
        v = getattr(args, name)
        if v is not None:
            setattr(cfg, name, v)
    if args.fault:
        cfg.fault = True
    status, payload = runner.run_identities(cfg)
    for name, suite in payload["suites"].items():
        print(f"{name:18s} {'pass' if suite['passed'] else 'FAIL'}", file=sys.stderr)
    _write(_target(args, "identities"), payload)
    return status


def cmd_report(args) -> int:
    spec = families.load_graph(args.graph)
    if args.orientation:
        spec.orientation = args.orientation
    status, payload = runner.graph_report(spec, nodes=args.nodes)
    _write(_target(args, "report"), payload)
    return status


def cmd_lrh(args) -> int:
    spec = families.load_graph(args.graph)
    if args.orientation:
        spec.orientation = args.orientation
    status, payload = runner.lrh_verify(spec, args.r, refine=args.refine, tol=args.tol)
    for lv in payload["levels"]:
        print(f"grid {lv['shape']}: max residual {lv['max_residual']:.3e}", file=sys.stderr)
    if payload["refinement_ratios"]:
        print("refinement ratios: " + ", ".join(f"{q:.2f}" for q in payload["refinement_ratios"]),
              file=sys.stderr)
    _write(_target(args, "lrh-verify"), payload)
    return status


def cmd_maxprin(args) -> int:
    d = _read_json(args.scenario)
    if args.k_max is not None:
        d["k_max"] = args.k_max
    status, payload = runner.run_scenario(d)
    c = payload["limits"]
    print(f"limits ({c['side']}): subsequence density {c['density']:.2f}, "
          f"gradient identity {'ok' if payload['gradient_identity_ok'] else 'FAIL'}", file=sys.stderr)
    _write(_target(args, "maxprin"), payload)
    return status


def cmd_audit(args) -> int:
    cfg = runner.AuditConfig(
        family=args.family, count=args.count, r=args.r, n=args.dim, nodes=args.nodes,
        t0=args.t0, beta=args.beta, c1=args.c1, c2=args.c2,
        orientation=args.orientation, seed=args.seed,
    )
    status, payload = runner.run_audit(cfg)
    s = payload["summary"]
    print(f"{s['samples']} samples, {s['rejected']} rejected, {s['audited_nodes']} audited nodes, "
          f"{s['violating_nodes']} violations; completeness not auditable", file=sys.stderr)
    target = _target(args, "audit")
    _write(target, payload)
    if target is not None:
        _write(target, None, ".csv", runner.verdicts_csv(payload["verdicts"]))
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grwcurv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("identities", help="randomised algebraic identity suites")
    q.add_argument("--config", help="JSON file with suite parameters")
    q.add_argument("--seed", type=int)
    q.add_argument("--matrices", type=int)
    q.add_argument("--spectra", type=int)
    q.add_argument("--grid", type=int)
    q.add_argument("--rtol", type=float)
    q.add_argument("--fault", action="store_true", help="flip a sign in one closed form (harness self-test)")
    q.add_argument("--out")
    q.set_defaults(func=cmd_identities)

    q = sub.add_parser("report", help="curvature report for a graph file")
    q.add_argument("graph")
    q.add_argument("--orientation", choices=["same", "opposite"])
    q.add_argument("--nodes", type=int, default=0, help="include this many node rows")
    q.add_argument("--out")
    q.set_defaults(func=cmd_report)

    q = sub.add_parser("lrh-verify", help="height-function formula against finite differences")
    q.add_argument("graph")
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--orientation", choices=["same", "opposite"])
    q.add_argument("--refine", type=int, default=2, help="grid halvings for family heights")
    q.add_argument("--tol", type=float, default=1e-3)
    q.add_argument("--out")
    q.set_defaults(func=cmd_lrh)

    q = sub.add_parser("maxprin", help="maximising sequence on a model space")
    q.add_argument("scenario")
    q.add_argument("--k-max", type=int)
    q.add_argument("--out")
    q.set_defaults(func=cmd_maxprin)

    q = sub.add_parser("audit", help="node-checkable hypotheses of the nonexistence results")
    q.add_argument("family", choices=("sweep",) + families.FAMILIES)
    q.add_argument("--r", type=int, default=2)
    q.add_argument("--t0", type=float)
    q.add_argument("--beta", type=float, default=2.0)
    q.add_argument("--c1", type=float)
    q.add_argument("--c2", type=float)
    q.add_argument("--orientation", choices=["both", "same", "opposite"], default="both")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--count", type=int)
    q.add_argument("--dim", type=int, default=2)
    q.add_argument("--nodes", type=int, default=20)
    q.add_argument("--out", help="output path stem; writes .json and .csv")
    q.set_defaults(func=cmd_audit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return runner.USAGE
    except GeometryError as exc:
        where = f" at node {exc.node}" if exc.node is not None else ""
        print(f"geometry error{where}: {exc}", file=sys.stderr)
        return runner.FAILED


if __name__ == "__main__":
    sys.exit(main())
