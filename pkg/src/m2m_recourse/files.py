"""Readers and writers for matrix CSVs, flat config files and JSON reports."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .core import (
    CapacityVector,
    CostMatrix,
    Matching,
    ValidationError,
    WeightMatrix,
    WelfareReport,
)
from .weights import to_weights

FIXTURE_PREFIX = "fixture:"
SIG_DIGITS = 9

PathLike = Union[str, Path]


def fixture_path(name: str) -> Path:
    """Location of a bundled fixture file, e.g. ``two_moon_linf.cfg``."""
    path = Path(str(resources.files("m2m_recourse") / "fixtures" / name))
    if not path.exists():
        available = sorted(p.name for p in path.parent.iterdir() if not p.name.startswith("_"))
        raise ValidationError(f"no bundled fixture {name!r}; available: {available}")
    return path


def resolve(spec: PathLike, suffix: str = "") -> Path:
    """Accept ``fixture:<name>`` as well as ordinary paths."""
    spec = str(spec)
    if spec.startswith(FIXTURE_PREFIX):
        name = spec[len(FIXTURE_PREFIX):]
        if suffix and not name.endswith(suffix):
            name += suffix
        return fixture_path(name)
    return Path(spec)


def file_sha256(path: PathLike) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# -- matrices ---------------------------------------------------------------

def read_grid(path: PathLike) -> tuple[np.ndarray, list[str], list[str]]:
    """Parse a CSV with a header of provider ids and a leading seeker-id column."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise ValidationError(f"{path}: need a header row and at least one data row")
    header = [c.strip() for c in rows[0]]
    provider_ids = header[1:]
    seeker_ids, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValidationError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        seeker_ids.append(row[0].strip())
        try:
            values.append([float(c) for c in row[1:]])
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return np.array(values, dtype=np.float64), seeker_ids, provider_ids


def read_costs(path: PathLike) -> CostMatrix:
    grid, sids, pids = read_grid(path)
    return CostMatrix(grid, tuple(sids), tuple(pids))


def read_weights(path: PathLike, kind: str = "weight", gamma: Optional[float] = None) -> WeightMatrix:
    """Load a matrix as weights, applying the exponential transform when ``kind == "cost"``."""
    if kind == "cost":
        if gamma is None:
            raise ValidationError("a cost matrix needs gamma for the exponential transform")
        return to_weights(read_costs(path), gamma)
    if kind != "weight":
        raise ValidationError(f"matrix kind must be 'cost' or 'weight', got {kind!r}")
    grid, sids, pids = read_grid(path)
    return WeightMatrix(grid, tuple(sids), tuple(pids), gamma=gamma)


def format_real(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def write_grid(path: PathLike, grid: np.ndarray, seeker_ids, provider_ids) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["seeker", *provider_ids])
    for sid, row in zip(seeker_ids, grid):
        writer.writerow([sid, *(format_real(v) for v in row)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def write_csv(path: PathLike, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_real(v) if isinstance(v, float) else v for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


# -- config -----------------------------------------------------------------

@dataclass
class RunConfig:
    """Flat ``key = value`` settings; list values are comma separated."""

    gamma: Optional[float] = None
    betas: Optional[list[float]] = None
    initial_capacities: Optional[list[int]] = None
    K_total: Optional[int] = None
    norm: Optional[str] = None
    matrix: Optional[str] = None
    kind: Optional[str] = None
    source: Optional[str] = None
    extra: dict = field(default_factory=dict)


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.replace("(", "").replace(")", "").split(",") if v.strip()]


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace("(", "").replace(")", "").split(",") if v.strip()]


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    cfg = RunConfig(source=source)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key == "gamma":
                cfg.gamma = float(value)
            elif key == "betas":
                cfg.betas = _floats(value)
            elif key == "initial_capacities":
                cfg.initial_capacities = _ints(value)
            elif key in ("K_total", "k_total"):
                cfg.K_total = int(value)
            elif key in ("norm", "matrix", "kind"):
                setattr(cfg, key, value)
            else:
                cfg.extra[key] = value
        except ValueError as exc:
            raise ValidationError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    return cfg


def read_config(path: PathLike) -> RunConfig:
    path = resolve(path, ".cfg")
    cfg = parse_config(path.read_text(encoding="utf-8"), str(path))
    if cfg.matrix and not cfg.matrix.startswith(FIXTURE_PREFIX) and not Path(cfg.matrix).is_absolute():
        cfg.matrix = str(path.parent / cfg.matrix)
    return cfg


def expand_betas(betas: list[float], m: int) -> tuple[float, ...]:
    """A single beta applies to every provider."""
    if len(betas) == 1:
        return (betas[0],) * m
    if len(betas) != m:
        raise ValidationError(f"got {len(betas)} betas for {m} providers")
    return tuple(betas)


# -- reports ----------------------------------------------------------------

def _round_reals(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValidationError(f"cannot serialize non-finite value {obj}")
        return float(format_real(obj)) + 0.0
    if isinstance(obj, dict):
        return {str(k): _round_reals(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_reals(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round_reals(obj.item())
    if isinstance(obj, CapacityVector):
        return list(obj.capacities)
    return obj


def dumps(obj) -> str:
    """Byte-stable JSON: sorted keys, reals at nine significant digits."""
    return json.dumps(_round_reals(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def assignments(W: WeightMatrix, M: Matching) -> list[dict]:
    out = []
    for i, j in enumerate(M.assignment):
        out.append({
            "seeker": W.seeker_ids[i],
            "provider": None if j is None else W.provider_ids[j],
            "weight": None if j is None else float(W.weights[i, j]),
        })
    return out


def welfare_report_dict(
    W: WeightMatrix,
    M: Matching,
    report: WelfareReport,
    config: dict,
    capacities_in: Optional[CapacityVector] = None,
) -> dict:
    return {
        "config": config,
        "providers": list(W.provider_ids),
        "capacities_in": None if capacities_in is None else list(capacities_in),
        "capacities_out": list(report.capacity_used),
        "capacity_delta": list(report.capacity_delta),
        "assignments": assignments(W, M),
        "matched_count": report.matched_count,
        "individual_welfare": report.individual_welfare,
        "social_welfare": report.social_welfare,
        "welfare_gap": report.welfare_gap,
        "penalty": report.penalty,
        "objective": report.objective,
        "pct_of_individual": report.pct_of_individual,
    }
