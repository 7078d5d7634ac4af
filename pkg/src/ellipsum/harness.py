"""Batch runs over sampled instances and residual reports."""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .errors import EllipsumError, NotApplicable
from .sampling import IDENTITIES, SamplerConfig, ShapeBounds, check_shape, sample_instance

REPORT_FIELDS = ("identity", "trial", "shape", "p", "params", "residual", "scale", "tolerance", "passed", "reason")


@dataclass
class TrialReport:
    identity: str
    trial: int
    shape: dict
    p: complex | None
    params: dict
    residual: float | None
    scale: float | None
    tolerance: float
    passed: bool
    reason: str = ""
    wall_time: float = field(default=0.0, compare=False)

    def record(self, timing: bool = False) -> dict:
        rec = {name: getattr(self, name) for name in REPORT_FIELDS}
        if timing:
            rec["wall_time"] = self.wall_time
        return rec


def run_trial(cfg: SamplerConfig, identity: str, trial: int, tolerance: float) -> TrialReport:
    start = time.perf_counter()
    try:
        inst = sample_instance(cfg, identity, trial)
    except NotApplicable as exc:
        return TrialReport(identity, trial, {}, cfg.p_values[trial % len(cfg.p_values)], {}, None, None,
                           tolerance, True, f"skipped: {exc}", time.perf_counter() - start)
    except EllipsumError as exc:
        return TrialReport(identity, trial, getattr(exc, "shape", {}), cfg.p_values[trial % len(cfg.p_values)], {}, None, None,
                           tolerance, False, f"{type(exc).__name__}: {exc}", time.perf_counter() - start)
    rel = inst.residual.relative
    passed = rel <= tolerance  # False for nan
    return TrialReport(identity, trial, inst.shape, inst.p, inst.params, rel, inst.residual.scale,
                       tolerance, passed, "" if passed else "residual above tolerance",
                       time.perf_counter() - start)


def validate_shapes(cfg: SamplerConfig, identities: Iterable[str]) -> None:
    """Reject unknown identities and inadmissible configured shapes up front."""
    for name in identities:
        if name not in IDENTITIES:
            raise EllipsumError(f"unknown identity {name!r}")
        for shape in cfg.shapes.get(name, ()):
            check_shape(name, shape)


def run_suite(cfg: SamplerConfig, identities: Sequence[str], tolerance: float,
              workers: int = 1) -> list[TrialReport]:
    """All (identity, trial) pairs; output ordered by (identity, trial)."""
    identities = list(identities)
    validate_shapes(cfg, identities)
    jobs = [(name, t) for name in identities for t in range(cfg.trials)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(lambda job: run_trial(cfg, job[0], job[1], tolerance), jobs))
    else:
        reports = [run_trial(cfg, name, t, tolerance) for name, t in jobs]
    order = {name: i for i, name in enumerate(identities)}
    return sorted(reports, key=lambda r: (order[r.identity], r.trial))


@dataclass(frozen=True)
class Summary:
    identity: str
    shape: str
    max_residual: float | None
    passed: int
    total: int


def _shape_key(shape: dict) -> str:
    return ",".join(f"{k}={shape[k]}" for k in sorted(shape)).replace(" ", "") or "-"


def summarize(reports: Iterable[TrialReport]) -> list[Summary]:
    """One row per identity; the shape column names the shape when it is
    shared by every trial and counts the distinct shapes otherwise."""
    groups: dict[str, list[TrialReport]] = {}
    for r in reports:
        groups.setdefault(r.identity, []).append(r)
    out = []
    for name, rs in groups.items():
        vals = [r.residual for r in rs if r.residual is not None]
        worst = max(vals, key=lambda v: (math.isnan(v), v)) if vals else None
        shapes = {_shape_key(r.shape) for r in rs if r.shape}
        label = shapes.pop() if len(shapes) == 1 else (f"{len(shapes)} shapes" if shapes else "-")
        out.append(Summary(name, label, worst, sum(r.passed for r in rs), len(rs)))
    return out


def exit_code(reports: Iterable[TrialReport]) -> int:
    return 0 if all(r.passed for r in reports) else 1


# ------------------------------------------------------------- serialization

def _plain(value: Any) -> Any:
    """JSON-ready copy: complex as [re, im], floats as 17-digit literals."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, complex):
        return [_Float(value.real), _Float(value.imag)]
    if isinstance(value, float):
        return _Float(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return _plain(value.item())
    raise TypeError(f"cannot serialize {type(value).__name__}")


class _Float(float):
    pass


def _dump(value: Any) -> str:
    if isinstance(value, _Float):
        if math.isnan(value) or math.isinf(value):
            return json.dumps(str(float(value)))
        return format(float(value), ".17g")
    if isinstance(value, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{_dump(value[k])}" for k in sorted(value)) + "}"
    if isinstance(value, list):
        return "[" + ",".join(_dump(v) for v in value) + "]"
    return json.dumps(value)


def to_jsonl(record: dict) -> str:
    return _dump(_plain(record))


def emit_report(reports: Sequence[TrialReport], fmt: str = "human", timing: bool = False) -> str:
    if fmt == "structured":
        return "".join(to_jsonl(r.record(timing)) + "\n" for r in reports)
    if fmt != "human":
        raise ValueError("format must be 'human' or 'structured'")
    header = ("identity", "shape", "max residual", "passed")
    rows = [header]
    for s in summarize(reports):
        res = "-" if s.max_residual is None else f"{s.max_residual:.3e}"
        rows.append((s.identity, s.shape, res, f"{s.passed}/{s.total}"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _unplain(value: Any) -> Any:
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, float) for v in value):
        return complex(*value)
    if isinstance(value, list):
        return [_unplain(v) for v in value]
    if isinstance(value, dict):
        return {k: _unplain(v) for k, v in value.items()}
    return value


def read_structured(text: str) -> list[TrialReport]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        p = _complex(rec["p"]) if rec.get("p") is not None else None
        out.append(TrialReport(rec["identity"], rec["trial"], rec["shape"], p, _unplain(rec["params"]),
                               rec["residual"], rec["scale"], rec["tolerance"], rec["passed"],
                               rec.get("reason", ""), rec.get("wall_time", 0.0)))
    return out


# ------------------------------------------------------------------- config

def load_config(data: dict) -> tuple[SamplerConfig, dict]:
    """SamplerConfig from parsed JSON, plus the remaining run options."""
    data = dict(data)
    extras = {k: data.pop(k) for k in ("tolerance", "identities", "workers") if k in data}
    if "p_values" in data:
        data["p_values"] = [_complex(p) for p in data["p_values"]]
    if "bounds" in data:
        data["bounds"] = ShapeBounds(**data["bounds"])
    unknown = set(data) - set(SamplerConfig.__dataclass_fields__)
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)}")
    return SamplerConfig(**data), extras
