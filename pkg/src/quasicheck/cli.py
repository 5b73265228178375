"""Command-line surface: reproducible runs with JSON reports.

Exit codes: 0 = completed, no violations; 1 = violations found (still a
successful run); 2 = usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys

import numpy as np

from . import __version__
from . import conditions as cond
from . import search as srch
from .conditions import CheckConfig
from .expr import ParseError
from .families import family_by_name, shipped_families
from .field import (DomainBox, catalog, catalog_field, make_field_from_expr,
                    validate_grad)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def parse_box(spec: str, n: int) -> DomainBox:
    """`lo:hi[,lo:hi...]`; a single interval broadcasts over all coordinates."""
    parts = spec.split(",")
    if len(parts) == 1:
        parts = parts * n
    if len(parts) != n:
        raise UsageError(f"box has {len(parts)} intervals, expected 1 or {n}")
    lo, hi = [], []
    for part in parts:
        try:
            a, b = part.split(":")
            lo.append(float(a))
            hi.append(float(b))
        except ValueError:
            raise UsageError(f"bad box interval {part!r}, expected lo:hi")
    try:
        return DomainBox(np.array(lo), np.array(hi))
    except ValueError as e:
        raise UsageError(str(e))


def resolve_field(args):
    if args.fn and args.expr:
        raise UsageError("give exactly one of --fn and --expr")
    if args.fn:
        try:
            f = catalog_field(args.fn, args.dim)
        except KeyError as e:
            raise UsageError(str(e))
        if args.box:
            box = parse_box(args.box, f.dim)
            from dataclasses import replace
            f = replace(f, domain=box)
        return f
    if args.expr:
        if not args.box:
            raise UsageError("--expr requires --box")
        box = parse_box(args.box, args.dim)
        try:
            return make_field_from_expr(args.expr, args.dim, box,
                                        name=f"expr:{args.expr}")
        except ParseError as e:
            raise UsageError(f"cannot parse expression: {e}")
    raise UsageError("a field is required: --fn <catalog name> or --expr <text>")


def make_config(args) -> CheckConfig:
    grid = cond.default_lambda_grid(args.lambda_points + 1)
    norm = args.norm if args.norm == "inf" else int(args.norm)
    try:
        return CheckConfig(sigma=args.sigma, tol=args.tol,
                           min_sep=args.min_sep, lambda_grid=grid,
                           penalty_norm=norm)
    except ValueError as e:
        raise UsageError(str(e))


def make_sampler(args, domain: DomainBox) -> srch.Sampler:
    try:
        return srch.Sampler(strategy=args.strategy, seed=args.seed,
                            count=args.pairs, domain=domain,
                            min_sep=args.min_sep)
    except ValueError as e:
        raise UsageError(str(e))


def echo_config(args, f=None, cfg=None, sampler=None) -> dict:
    out = {
        "command": args.command,
        "seed": args.seed,
        "sigma": getattr(args, "sigma", None),
    }
    if f is not None:
        out["field"] = {"name": f.name, "dim": f.dim,
                        "domain": f.domain.to_json()}
    if cfg is not None:
        out["check"] = cfg.to_json()
    if sampler is not None:
        out["sampler"] = sampler.to_json()
    return out


def build_report(args, payload: dict, config: dict, skipped: int = 0) -> dict:
    return {
        "schema": 1,
        "tool": "quasicheck",
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config": config,
        "payload": payload,
        "skipped_samples": skipped,
    }


def write_outputs(report: dict, args, csv_rows=None):
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if getattr(args, "csv", None) and csv_rows is not None:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["pair_index", "condition", "margin", "status"])
            w.writerows(csv_rows)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_check(args) -> int:
    f = resolve_field(args)
    cfg = make_config(args)
    sampler = make_sampler(args, f.domain)
    report = srch.implication_harness(f, cfg, sampler, chunks=args.threads)
    skipped = sum(c["skipped"] for c in report.counts.values())
    out = build_report(args, report.to_json(),
                       echo_config(args, f, cfg, sampler), skipped)
    csv_rows = None
    if args.csv:
        csv_rows = _per_pair_rows(f, cfg, sampler)
    write_outputs(out, args, csv_rows)
    return EXIT_VIOLATIONS if report.total_violations > 0 else EXIT_OK


def _per_pair_rows(f, cfg, sampler):
    pairs = srch.sample_pairs(sampler)
    X, Y = pairs[:, 0], pairs[:, 1]
    rows = []
    m, _, ok_a = cond.batch_margin_a_worst(f, X, Y, cfg)
    r = cond.batch_margins_bc(f, X, Y, cfg)
    for i in range(pairs.shape[0]):
        if not ok_a[i]:
            rows.append([i, "a", "", "skipped"])
        else:
            st = "violated" if m[i] < -cfg.tol else "holds"
            rows.append([i, "a", repr(float(m[i])), st])
        for name, premise in (("b", r["premise_b"]), ("c", r["premise_c"])):
            if not r["ok"][i]:
                rows.append([i, name, "", "skipped"])
            elif not premise[i]:
                rows.append([i, name, "", "vacuous"])
            else:
                mg = float(r["margin"][i])
                st = "violated" if mg < -cfg.tol else "holds"
                rows.append([i, name, repr(mg), st])
    return rows


def cmd_sigma(args) -> int:
    f = resolve_field(args)
    cfg = make_config(args)
    sampler = make_sampler(args, f.domain)
    raw = cond.sigma_star_estimate(f, sampler, cfg)
    payload = {"sigma_star_raw": raw, "sigma_star": max(0.0, raw)}
    out = build_report(args, payload, echo_config(args, f, cfg, sampler))
    write_outputs(out, args)
    return EXIT_VIOLATIONS if raw < -cfg.tol else EXIT_OK


def cmd_falsify(args) -> int:
    cfg = make_config(args)
    budget = srch.SearchBudget(max_evals=args.budget, restarts=args.restarts)
    if args.family:
        try:
            fam = family_by_name(args.family)
        except KeyError as e:
            raise UsageError(str(e))
        cands = srch.open_question_search(fam, cfg, budget, seed=args.seed,
                                          param_samples=args.param_samples)
        payload = {
            "mode": "open_question",
            "family": fam.to_json(),
            "candidates": [c.to_json() for c in cands],
            "note": "candidates are sampling-based evidence, not proofs",
        }
        config = echo_config(args)
        config["budget"] = budget.to_json()
        out = build_report(args, payload, config)
        write_outputs(out, args)
        return EXIT_VIOLATIONS if cands else EXIT_OK
    f = resolve_field(args)
    res = srch.falsify(f, args.target, cfg, budget, seed=args.seed)
    config = echo_config(args, f, cfg)
    config["budget"] = budget.to_json()
    out = build_report(args, res.to_json(), config)
    write_outputs(out, args)
    return EXIT_VIOLATIONS if res.violation_found else EXIT_OK


def cmd_gradcheck(args) -> int:
    f = resolve_field(args)
    rep = validate_grad(f, seed=args.seed, count=args.points, tol=args.tol)
    payload = rep.to_json()
    payload["passed"] = rep.passed(args.tol)
    out = build_report(args, payload, echo_config(args, f), rep.skipped)
    write_outputs(out, args)
    return EXIT_OK if rep.passed(args.tol) else EXIT_VIOLATIONS


def cmd_lemma(args) -> int:
    f = resolve_field(args)
    if f.dim != 1:
        raise UsageError("lemma requires a 1-D field")
    verdict = cond.check_lemma_refined(f, initial_points=args.grid_points,
                                       tol=args.tol)
    payload = verdict.to_json()
    if verdict.status == cond.VIOLATED:
        payload["note"] = "candidate contradiction - refine grid"
    out = build_report(args, payload, echo_config(args, f))
    write_outputs(out, args)
    return EXIT_VIOLATIONS if verdict.status == cond.VIOLATED else EXIT_OK


def cmd_catalog(args) -> int:
    entries = []
    for f in catalog(args.dim):
        entries.append({
            "name": f.name,
            "dim": f.dim,
            "domain": f.domain.to_json(),
            "known_status": f.known_status,
            "known_sigma": f.known_sigma,
        })
    fams = [fam.to_json() for fam in shipped_families()]
    out = build_report(args, {"fields": entries, "families": fams},
                       echo_config(args))
    write_outputs(out, args)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_field_args(p):
    p.add_argument("--fn", help="catalog field name")
    p.add_argument("--expr", help="expression in x1..xn, e.g. 'x1^2 + x2^2'")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--box", help="domain box lo:hi[,lo:hi...] (broadcasts)")


def _add_check_args(p):
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--min-sep", dest="min_sep", type=float, default=1e-6)
    p.add_argument("--lambda-points", dest="lambda_points", type=int,
                   default=63, help="interior lambda grid size")
    p.add_argument("--norm", choices=["1", "2", "inf"], default="2",
                   type=str)


def _add_sampler_args(p):
    p.add_argument("--pairs", type=int, default=10_000)
    p.add_argument("--strategy", default="uniform_box",
                   choices=["uniform_box", "gaussian_interior", "segment_grid"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="quasicheck",
        description="Numerically certify or falsify (strong) quasiconvexity "
                    "of differentiable functions on box domains.")
    sub = ap.add_subparsers(dest="command", required=True)

    common = dict(seed=7, out=None)

    p = sub.add_parser("check", help="run the (a)/(b)/(c) implication harness")
    _add_field_args(p)
    _add_check_args(p)
    _add_sampler_args(p)
    p.add_argument("--threads", type=int, default=1,
                   help="evaluation partitions (results are identical)")
    p.add_argument("--csv", help="write per-sample margin rows")
    p.set_defaults(func=cmd_check, **common)

    p = sub.add_parser("sigma", help="estimate sigma* on sampled segments")
    _add_field_args(p)
    _add_check_args(p)
    _add_sampler_args(p)
    p.set_defaults(func=cmd_sigma, **common)

    p = sub.add_parser("falsify", help="adversarial search for violations")
    _add_field_args(p)
    _add_check_args(p)
    p.add_argument("--target", choices=["a", "b", "c"], default="a")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--family", help="open-question mode on a shipped family")
    p.add_argument("--param-samples", dest="param_samples", type=int,
                   default=32)
    p.set_defaults(func=cmd_falsify, **common)

    p = sub.add_parser("gradcheck", help="validate gradients against "
                                         "central differences")
    _add_field_args(p)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_gradcheck, **common)

    p = sub.add_parser("lemma", help="scalar monotone-bound lemma check")
    _add_field_args(p)
    p.add_argument("--grid-points", dest="grid_points", type=int, default=63)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_lemma, **common)

    p = sub.add_parser("catalog", help="list built-in fields and families")
    p.add_argument("--dim", type=int, default=2)
    p.set_defaults(func=cmd_catalog, **common)

    for sp in sub.choices.values():
        sp.add_argument("--seed", type=int, default=7)
        sp.add_argument("--out", help="write the JSON report to this path")
        sp.add_argument("--config",
                        help="JSON file with default flag values "
                             "(explicit flags override)")
    return ap


def apply_config_file(args, argv):
    """--config gives defaults; explicit flags override."""
    if not args.config:
        return args
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config file: {e}")
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    for key, value in data.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError(f"unknown config key {key!r}")
        flag = "--" + key.replace("_", "-")
        if flag not in argv:  # flags override file values
            setattr(args, attr, value)
    return args


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        args = apply_config_file(args, argv if argv is not None
                                 else sys.argv[1:])
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
