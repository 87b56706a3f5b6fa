"""CSV trajectory and JSON outcome export, plus CSV re-import."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from pathlib import Path

from .sim import Outcome, TrajectoryLog

DIGITS = 9


def fmt(x: float) -> str:
    """Locale-independent number with nine significant digits."""
    return format(x, f".{DIGITS}g")


def csv_columns(n: int) -> list[str]:
    cols = ["t", "stage", "xA.x", "xA.y", "uA.x", "uA.y"]
    for i in range(n):
        cols += [f"D{i}.x", f"D{i}.y", f"D{i}.ux", f"D{i}.uy"]
    for i in range(n):
        cols += [f"B{i}.x", f"B{i}.y"]
    cols += ["vFc.x", "vFc.y"]
    cols += [f"J{i}" for i in range(n)]
    for i in range(n):
        cols += [f"eh{i}", f"ev{i}"]
    cols += ["rho"]
    return cols


def _row(rec, n: int) -> list[str]:
    row = [fmt(rec.t), rec.stage, fmt(rec.attacker.x), fmt(rec.attacker.y), fmt(rec.u_attacker.x), fmt(rec.u_attacker.y)]
    for p, u in zip(rec.defenders, rec.u_defenders):
        row += [fmt(p.x), fmt(p.y), fmt(u.x), fmt(u.y)]
    if rec.beacons:
        for b in rec.beacons:
            row += [fmt(b.x), fmt(b.y)]
    else:
        row += [""] * (2 * n)
    row += [fmt(rec.v_fc.x), fmt(rec.v_fc.y)]
    row += [fmt(j) for j in rec.J] if rec.J is not None else [""] * n
    if rec.telemetry is not None:
        for tl in rec.telemetry:
            row += [fmt(tl.e_tilde_h), fmt(tl.e_tilde_v)]
        row.append(fmt(rec.telemetry[0].rho))
    else:
        row += [""] * (2 * n + 1)
    return row


def write_csv(log: TrajectoryLog, path: str | Path) -> Path:
    path = Path(path)
    n = len(log.records[0].defenders) if log.records else 0
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_columns(n))
        for rec in log.records:
            w.writerow(_row(rec, n))
    return path


def read_csv(path: str | Path) -> list[dict[str, float | str | None]]:
    """Rows as dicts; numeric fields become floats and blanks ``None``."""
    out = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append({k: (v if k == "stage" else (float(v) if v != "" else None)) for k, v in row.items()})
    return out


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def outcome_dict(outcome: Outcome, violations: list | None = None) -> dict:
    d = {k: _clean(v) for k, v in asdict(outcome).items()}
    d["violations"] = [asdict(v) if hasattr(v, "__dataclass_fields__") else v for v in (violations or [])]
    return d


def write_outcome(outcome: Outcome, path: str | Path, violations: list | None = None) -> Path:
    path = Path(path)
    path.write_text(json.dumps(outcome_dict(outcome, violations), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
