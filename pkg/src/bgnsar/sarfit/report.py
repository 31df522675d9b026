"""JSON and aligned plain-text rendering of results."""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from ..bgn import BgnParams
from .compare import CRITERIA, ComparisonReport
from .mc import McTable
from .stats import Descriptive, RngCheck

__all__ = ["fmt", "fmt_crit", "to_jsonable", "to_json", "to_text"]


def fmt(v) -> str:
    """Six significant digits."""
    if v is None:
        return "-"
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return f"{v:.6g}"


def fmt_crit(v) -> str:
    if v is None:
        return "-"
    v = float(v)
    return "nan" if math.isnan(v) else f"{v:.2f}"


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        # JSON has no inf/nan
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def to_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False)


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)


def _describe_text(d: Descriptive) -> str:
    return _table(["n", "mean", "median", "sd", "cv%"],
                  [[fmt(d.n), fmt(d.mean), fmt(d.median), fmt(d.sd), fmt(d.cv)]])


def _params_text(params: dict) -> str:
    return " ".join(f"{k}={fmt(v)}" for k, v in params.items())


def _compare_text(r: ComparisonReport) -> str:
    rows = []
    for m in r.models:
        mark = {c: "*" if r.winner_by.get(c) == m.name else "" for c in CRITERIA}
        rows.append([m.name, fmt(m.loglik)] + [fmt_crit(getattr(m.criteria, c)) + mark[c] for c in CRITERIA]
                    + ["yes" if m.converged else "no", _params_text(m.params) or m.error])
    parts = []
    if r.source:
        parts.append(f"source: {r.source}" + (f"  channel: {r.channel}" if r.channel else ""))
    parts.append(_describe_text(r.descriptive))
    parts.append("")
    parts.append(_table(["model", "loglik", "AIC", "AICc", "BIC", "conv", "params"], rows))
    parts.append("")
    parts.append("best: " + ", ".join(f"{c.upper()}={r.winner_by.get(c, '-')}" for c in CRITERIA))
    return "\n".join(parts)


def _mc_text(t: McTable) -> str:
    rows = [[fmt(r.value), fmt(r.size), fmt(r.mse), fmt(r.used), fmt(r.excluded)] for r in t.rows]
    return f"scenario: {t.scenario}  replications: {t.replications}\n" + _table(
        ["value", "N", "mse", "used", "excluded"], rows)


def _rng_text(c: RngCheck) -> str:
    rows = [[fmt(x), fmt(h), fmt(f)] for x, h, f in zip(c.centers, c.histogram, c.density_curve)]
    return f"n: {c.n}  ks_stat: {fmt(c.ks_stat)}\n" + _table(["center", "histogram", "density"], rows)


def to_text(obj) -> str:
    if isinstance(obj, ComparisonReport):
        return _compare_text(obj)
    if isinstance(obj, McTable):
        return _mc_text(obj)
    if isinstance(obj, RngCheck):
        return _rng_text(obj)
    if isinstance(obj, Descriptive):
        return _describe_text(obj)
    if isinstance(obj, BgnParams):
        return _params_text(dataclasses.asdict(obj))
    if dataclasses.is_dataclass(obj):
        items = []
        for f in dataclasses.fields(obj):
            v = getattr(obj, f.name)
            if isinstance(v, BgnParams):
                v = _params_text(dataclasses.asdict(v))
            elif isinstance(v, (tuple, list, np.ndarray)):
                continue
            elif isinstance(v, (float, int)) and not isinstance(v, bool):
                v = fmt(v)
            items.append(f"{f.name}: {v}")
        return "\n".join(items)
    return str(obj)
