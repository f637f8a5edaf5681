"""Command-line front door.

    workbench run <config.json> [--out DIR] [--order N] [--precision-bits P]
    workbench report <manifest|dir>
    workbench hae-check <grid.json> --genus G [--tolerance T]
    workbench ehae-check <grid.json> --genus G --holes H [--tolerance T]
    workbench genus2 <grid.json> --propagator <file> [--tolerance T] [--out DIR]
    workbench hodge-report <config.json> [--samples N] [--radius-fraction F] ...

Exit codes: 0 success, 1 configuration error, 2 violated mathematical
precondition, 3 numeric tolerance failure.  WORKBENCH_OUT overrides the
output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from mpmath import mp

from .anomaly import (AnomalyGrid, PropagatorSpec, ehae_residual,
                      genus2_integrate, hae_residual)
from .errors import ConfigError, WorkbenchError
from .frames import solve_symplectic_frame
from .genus0 import yukawa_theta
from .hodge import HodgeEvaluator, hodge_report_json, sample_points
from .picard_fuchs import frobenius_solve
from .pipeline import (WorkbenchConfig, config_hash, default_hodge_order,
                       load_manifest, report, run_pipeline)


def _load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def _resolve_out(args) -> str:
    out = getattr(args, "out", None) or os.environ.get("WORKBENCH_OUT")
    return out or "workbench-out"


def _load_config(args) -> WorkbenchConfig:
    cfg = WorkbenchConfig.from_json(_load_json(args.config))
    if getattr(args, "order", None):
        cfg.truncation_order = args.order
    if getattr(args, "precision_bits", None):
        cfg.precision_bits = args.precision_bits
    if getattr(args, "samples", None):
        cfg.sample_count = args.samples
    if getattr(args, "radius_fraction", None):
        cfg.radius_fraction = args.radius_fraction
    cfg.__post_init__()  # revalidate overrides
    return cfg


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    out = args.out or os.environ.get("WORKBENCH_OUT") or cfg.output_dir \
        or "workbench-out"
    entry = run_pipeline(cfg, out)
    print(f"run complete: {out} (config {entry['config_hash'][:16]})")
    for a in entry["artifacts"]:
        print(f"  {a['path']}  sha256={a['sha256'][:16]}")
    return 0


def _cmd_report(args) -> int:
    entry = load_manifest(args.manifest)
    sys.stdout.write(report(entry))
    return 0


def _cmd_hae_check(args) -> int:
    grid = AnomalyGrid.from_json(_load_json(args.grid))
    rep = hae_residual(grid, args.genus)
    print(f"hae residual (g={args.genus}): max {mp.nstr(rep.max_abs, 8)} "
          f"mean {mp.nstr(rep.mean_abs, 8)}")
    if args.tolerance is not None and rep.max_abs > args.tolerance:
        print(f"FAIL: above tolerance {args.tolerance}")
        return 3
    return 0


def _cmd_ehae_check(args) -> int:
    grid = AnomalyGrid.from_json(_load_json(args.grid))
    rep = ehae_residual(grid, args.genus, args.holes)
    print(f"ehae residual (g={args.genus}, h={args.holes}): "
          f"max {mp.nstr(rep.max_abs, 8)} mean {mp.nstr(rep.mean_abs, 8)}")
    if args.tolerance is not None and rep.max_abs > args.tolerance:
        print(f"FAIL: above tolerance {args.tolerance}")
        return 3
    return 0


def _cmd_genus2(args) -> int:
    grid = AnomalyGrid.from_json(_load_json(args.grid))
    prop = PropagatorSpec.from_json(_load_json(args.propagator))
    f2, rep = genus2_integrate(grid, prop, tolerance=args.tolerance or 1e-8)
    print(f"genus-2 integration: residual max {mp.nstr(rep.max_abs, 8)} "
          f"mean {mp.nstr(rep.mean_abs, 8)}")
    out = getattr(args, "out", None) or os.environ.get("WORKBENCH_OUT")
    if out:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        doc = grid.with_field("F2", f2).to_json()
        (outdir / "genus2.json").write_text(
            json.dumps(doc, indent=1, sort_keys=True) + "\n")
        print(f"wrote {outdir / 'genus2.json'}")
    return 0


def _cmd_hodge_report(args) -> int:
    cfg = _load_config(args)
    order = cfg.hodge_order or default_hodge_order(cfg.radius_fraction)
    basis = frobenius_solve(cfg.family.pf, max(order, cfg.truncation_order))
    coupling = yukawa_theta(cfg.family)
    frame = solve_symplectic_frame(basis, coupling.series(basis.order),
                                   cfg.family.triple_intersection)
    evaluator = HodgeEvaluator(basis, frame, prec_bits=cfg.precision_bits)
    points = sample_points(cfg.family.pf.singular_radius,
                           cfg.radius_fraction, cfg.sample_count)
    reports = [evaluator.point(z0) for z0 in points]
    doc = hodge_report_json(reports, config_hash(cfg))
    out = _resolve_out(args)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "hodge.json").write_text(
        json.dumps(doc, indent=1, sort_keys=True) + "\n")
    ok = all(p["chern_form_positive"] for p in doc["points"])
    print(f"hodge report: {len(points)} points, signs_ok={ok} "
          f"-> {outdir / 'hodge.json'}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="workbench",
        description="Exact B-model workbench for one-parameter families")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the full pipeline on a family config")
    p.add_argument("config")
    p.add_argument("--out")
    p.add_argument("--order", type=int)
    p.add_argument("--precision-bits", type=int, dest="precision_bits")
    p.add_argument("--samples", type=int)
    p.add_argument("--radius-fraction", type=float, dest="radius_fraction")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", help="format tables from a run manifest")
    p.add_argument("manifest")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("hae-check", help="closed-string residual on a grid")
    p.add_argument("grid")
    p.add_argument("--genus", type=int, default=2)
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=_cmd_hae_check)

    p = sub.add_parser("ehae-check", help="open-string residual on a grid")
    p.add_argument("grid")
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--holes", type=int, default=2)
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=_cmd_ehae_check)

    p = sub.add_parser("genus2", help="integrate genus 2 with a propagator")
    p.add_argument("grid")
    p.add_argument("--propagator", required=True)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_genus2)

    p = sub.add_parser("hodge-report", help="point reports on a sample disk")
    p.add_argument("config")
    p.add_argument("--out")
    p.add_argument("--samples", type=int)
    p.add_argument("--radius-fraction", type=float, dest="radius_fraction")
    p.add_argument("--precision-bits", type=int, dest="precision_bits")
    p.add_argument("--order", type=int)
    p.set_defaults(func=_cmd_hodge_report)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WorkbenchError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
