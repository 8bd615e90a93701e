"""Command line front end.

    m2m-recourse match        --config fixture:two_moon_linf
    m2m-recourse allocate     --config fixture:two_moon_linf --total 8
    m2m-recourse redistribute --config fixture:two_moon_linf
    m2m-recourse sweep        --config fixture:two_moon_linf --max-total 32
    m2m-recourse costs        --seekers s.csv --providers p.csv --norm linf

Each command writes ``<command>.json`` (plus ``sweep.csv`` / ``costs.csv``)
into ``--out-dir``, or ``$M2M_RECOURSE_OUT_DIR``, or the working directory.
Exit codes: 0 success, 1 invalid input, 2 size guard exceeded.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .capacity import optimal_capacity, welfare_curve
from .core import CapacityVector, PenaltyConfig, RecourseError, SizeError, ValidationError
from .files import (
    RunConfig,
    dumps,
    expand_betas,
    file_sha256,
    format_real,
    read_config,
    read_weights,
    resolve,
    welfare_report_dict,
    write_csv,
    write_grid,
)
from .matching import solve_matching
from .penalized import local_search_penalized, solve_penalized
from .recourse import ActionConstraints, LinearProvider, build_cost_matrix, normalize_norm
from .weights import to_weights

OUT_DIR_ENV = "M2M_RECOURSE_OUT_DIR"

log = logging.getLogger("m2m_recourse")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"usage: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace("(", "").replace(")", "").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="m2m-recourse", description="Many-to-many recourse matching and capacity planning.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def matrix_args(p):
        p.add_argument("--config", help="key = value config file, or fixture:<name>")
        p.add_argument("--matrix", help="matrix CSV (overrides the config's matrix)")
        p.add_argument("--kind", choices=["cost", "weight"], help="whether the matrix holds costs or weights")
        p.add_argument("--gamma", type=float, help="exponential transform scale for cost matrices")
        p.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or .)")

    p = sub.add_parser("match", help="optimal matching under fixed capacities")
    matrix_args(p)
    p.add_argument("--capacities", type=_int_list, help="per-provider capacities, e.g. 2,4,1,1")

    p = sub.add_parser("allocate", help="top-K capacity distribution and its matching")
    matrix_args(p)
    p.add_argument("--total", type=int, help="total capacity K (default: config K_total, else n)")

    p = sub.add_parser("redistribute", help="capacity redistribution with deviation penalty")
    matrix_args(p)
    p.add_argument("--betas", type=_float_list, help="one beta for all providers, or one per provider")
    p.add_argument("--initial-capacities", type=_int_list)
    p.add_argument("--total", type=int, help="total capacity (default: sum of initial capacities)")
    p.add_argument("--local-search", action="store_true", help="hill-climb instead of exact enumeration")
    p.add_argument("--start", type=_int_list, help="local search start (default: initial capacities)")

    p = sub.add_parser("sweep", help="welfare curve over total capacity")
    matrix_args(p)
    p.add_argument("--max-total", type=int, help="largest K in the sweep (default n*m)")

    p = sub.add_parser("costs", help="recourse cost matrix for linear providers")
    p.add_argument("--config")
    p.add_argument("--seekers", required=True, help="CSV: id column then feature columns")
    p.add_argument("--providers", required=True, help="CSV: id, bias, then one weight per feature")
    p.add_argument("--constraints", help="CSV with columns feature,lower,upper,mutable")
    p.add_argument("--norm", help="l1 or linf (default: config norm, else linf)")
    p.add_argument("--gamma", type=float, help="also report weights at this gamma")
    p.add_argument("--out-dir")
    return parser


def _out_dir(args) -> Path:
    out = Path(args.out_dir or os.environ.get(OUT_DIR_ENV) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args):
    cfg = read_config(args.config) if args.config else RunConfig()
    matrix = args.matrix or cfg.matrix
    if not matrix:
        raise ValidationError("no matrix given (use --matrix or a config with 'matrix = ...')")
    path = resolve(matrix, ".csv")
    kind = args.kind or cfg.kind or "cost"
    gamma = args.gamma if args.gamma is not None else cfg.gamma
    W = read_weights(path, kind, gamma)
    provenance = {
        "command": args.command,
        "matrix": path.name,
        "matrix_sha256": file_sha256(path),
        "kind": kind,
        "gamma": gamma,
        "transform": W.transform,
        "norm": cfg.norm,
        "config": Path(cfg.source).name if cfg.source else None,
        "version": __version__,
    }
    return W, cfg, provenance


def _capacity(values, m: int, what: str) -> CapacityVector:
    if values is None:
        raise ValidationError(f"{what} required (flag or config)")
    if len(values) != m:
        raise ValidationError(f"{what} has {len(values)} entries for {m} providers")
    return CapacityVector(tuple(values))


def _write_json(out: Path, name: str, payload: dict) -> Path:
    path = out / f"{name}.json"
    path.write_text(dumps(payload), encoding="utf-8")
    return path


def _summary(d: dict) -> str:
    return (
        f"capacity {tuple(d['capacities_out'])}  SW {format_real(d['social_welfare'])}  "
        f"IW {format_real(d['individual_welfare'])}  {d['pct_of_individual']:.2f}% of IW"
    )


def cmd_match(args) -> dict:
    W, cfg, prov = _load(args)
    K = _capacity(args.capacities or cfg.initial_capacities, W.n_providers, "capacities")
    prov["capacities"] = list(K)
    M, report = solve_matching(W, K)
    return welfare_report_dict(W, M, report, prov, capacities_in=K)


def cmd_allocate(args) -> dict:
    W, cfg, prov = _load(args)
    total = args.total if args.total is not None else cfg.K_total if cfg.K_total is not None else W.n_seekers
    prov["K_total"] = total
    K = optimal_capacity(W, total)
    M, report = solve_matching(W, K)
    return welfare_report_dict(W, M, report, prov)


def cmd_redistribute(args) -> dict:
    W, cfg, prov = _load(args)
    initial = _capacity(args.initial_capacities or cfg.initial_capacities, W.n_providers, "initial capacities")
    betas = args.betas or cfg.betas
    if betas is None:
        raise ValidationError("betas required (flag or config)")
    P = PenaltyConfig(expand_betas(betas, W.n_providers), initial)
    total = args.total if args.total is not None else initial.total()
    prov.update(betas=list(P.betas), initial_capacities=list(initial), K_total=total,
                method="local_search" if args.local_search else "enumeration")
    if args.local_search:
        start = _capacity(args.start, W.n_providers, "start") if args.start else initial
        if start.total() != total:
            start = optimal_capacity(W, total)
        prov["start"] = list(start)
        _, M, report = local_search_penalized(W, P, total, start)
    else:
        _, M, report = solve_penalized(W, P, total)
    return welfare_report_dict(W, M, report, prov, capacities_in=initial)


def cmd_sweep(args, out: Path) -> dict:
    W, cfg, prov = _load(args)
    max_total = args.max_total if args.max_total is not None else W.n_seekers * W.n_providers
    prov["max_total"] = max_total
    curve = welfare_curve(W, max_total)
    write_csv(
        out / "sweep.csv",
        ["K", "welfare", "individual_welfare", "gap"],
        [[p.total_capacity, p.welfare, p.individual_welfare, p.gap] for p in curve],
    )
    return {
        "config": prov,
        "providers": list(W.provider_ids),
        "individual_welfare": curve[0].individual_welfare,
        "curve": [
            {"K": p.total_capacity, "capacity": list(p.capacity), "welfare": p.welfare, "gap": p.gap}
            for p in curve
        ],
    }


def _read_table(path: str) -> tuple[list[str], list[list[str]]]:
    with resolve(path).open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise ValidationError(f"{path}: need a header row and at least one data row")
    return rows[0], rows[1:]


def _floats(row, path) -> list[float]:
    try:
        return [float(v) for v in row]
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def cmd_costs(args, out: Path) -> dict:
    cfg = read_config(args.config) if args.config else RunConfig()
    norm = normalize_norm(args.norm or cfg.norm or "linf")
    gamma = args.gamma if args.gamma is not None else cfg.gamma

    _, rows = _read_table(args.seekers)
    seeker_ids = [r[0].strip() for r in rows]
    X = np.array([_floats(r[1:], args.seekers) for r in rows])
    _, rows = _read_table(args.providers)
    providers = []
    for r in rows:
        vals = _floats(r[1:], args.providers)
        providers.append(LinearProvider(vals[1:], vals[0], r[0].strip()))

    A = None
    if args.constraints:
        header, rows = _read_table(args.constraints)
        cols = {name.strip(): k for k, name in enumerate(header)}
        try:
            lower = [float(r[cols["lower"]]) for r in rows]
            upper = [float(r[cols["upper"]]) for r in rows]
            mutable = [r[cols["mutable"]].strip().lower() in ("1", "true", "yes") for r in rows]
        except (KeyError, ValueError, IndexError) as exc:
            raise ValidationError(f"{args.constraints}: bad constraints table ({exc})") from None
        A = ActionConstraints(lower, upper, mutable)

    C = build_cost_matrix(X, providers, A, norm, seeker_ids)
    write_grid(out / "costs.csv", C.costs, C.seeker_ids, C.provider_ids)
    payload = {
        "config": {
            "command": "costs",
            "norm": norm,
            "gamma": gamma,
            "seekers_sha256": file_sha256(resolve(args.seekers)),
            "providers_sha256": file_sha256(resolve(args.providers)),
            "constraints_sha256": file_sha256(resolve(args.constraints)) if args.constraints else None,
            "version": __version__,
        },
        "seekers": list(C.seeker_ids),
        "providers": list(C.provider_ids),
        "costs": C.costs.tolist(),
    }
    if gamma is not None:
        payload["weights"] = to_weights(C, gamma).weights.tolist()
    return payload


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out = _out_dir(args)
    if args.command == "sweep":
        payload = cmd_sweep(args, out)
        print(f"wrote {out / 'sweep.csv'}  (K = 0..{payload['config']['max_total']})")
    elif args.command == "costs":
        payload = cmd_costs(args, out)
        print(f"wrote {out / 'costs.csv'}  ({len(payload['seekers'])} x {len(payload['providers'])})")
    else:
        handler = {"match": cmd_match, "allocate": cmd_allocate, "redistribute": cmd_redistribute}
        payload = handler[args.command](args)
        print(_summary(payload))
    path = _write_json(out, args.command, payload)
    print(f"wrote {path}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(argv)
    except SizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RecourseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
