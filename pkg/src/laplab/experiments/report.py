"""Experiment reports: per-point records plus verdicts, serialised to JSON and CSV."""
from __future__ import annotations

import csv
import json
import math
import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def _clean(x):
    """Make numpy / complex values JSON-friendly and deterministic."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return repr(x)
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


@dataclass
class Verdict:
    """One PASS/FAIL decision and the invariant it instantiates."""

    name: str
    invariant: str
    passed: bool
    value: float | None = None
    threshold: float | None = None
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        val = "" if self.value is None else f" value={self.value:.4g}"
        thr = "" if self.threshold is None else f" threshold={self.threshold:.4g}"
        return f"[{tag}] {self.name}:{val}{thr} ({self.invariant})"


@dataclass
class ExperimentReport:
    experiment: str
    records: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.verdicts) and all(v.passed for v in self.verdicts)

    def add(self, **record) -> None:
        self.records.append(record)

    def verdict(self, name: str, invariant: str, passed: bool, value=None, threshold=None,
                detail: str = "") -> Verdict:
        v = Verdict(name, invariant, bool(passed),
                    None if value is None else float(value),
                    None if threshold is None else float(threshold), detail)
        self.verdicts.append(v)
        return v

    def summary(self) -> str:
        head = f"{self.experiment}: {'PASS' if self.passed else 'FAIL'}"
        return "\n".join([head] + ["  " + v.line() for v in self.verdicts])

    def to_dict(self) -> dict:
        meta = dict(self.meta)
        meta.setdefault("versions", {"python": platform.python_version(), "numpy": np.__version__})
        return _clean({"experiment": self.experiment, "passed": self.passed,
                       "verdicts": [v.__dict__ for v in self.verdicts],
                       "records": self.records, "meta": meta})

    def to_json(self, path=None, **kw) -> str:
        kw.setdefault("indent", 2)
        kw.setdefault("sort_keys", True)
        text = json.dumps(self.to_dict(), **kw)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    def to_csv(self, path) -> None:
        """Flat table of the records (union of keys, sorted)."""
        rows = [_clean(r) for r in self.records]
        keys = sorted({k for r in rows for k in r})
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(keys)
            for r in rows:
                w.writerow([_fmt(r.get(k, "")) for k in keys])

    def schema(self) -> dict:
        """Column name to type (``number``, ``integer``, ``boolean``, ``string`` or ``json``)."""
        cols = {}
        for r in self.records:
            for k, v in _clean(r).items():
                t = ("boolean" if isinstance(v, bool) else "integer" if isinstance(v, int)
                     else "number" if isinstance(v, float) else "string" if isinstance(v, str) else "json")
                prev = cols.get(k, t)
                cols[k] = t if prev == t else ("number" if {prev, t} == {"integer", "number"} else "json")
        return {"experiment": self.experiment, "columns": dict(sorted(cols.items()))}

    def write(self, out_dir, stem: str | None = None) -> dict:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = stem or self.experiment
        paths = {"json": out / f"{stem}.json", "csv": out / f"{stem}.csv",
                 "schema": out / f"{stem}.schema.json", "summary": out / f"{stem}.txt"}
        self.to_json(paths["json"])
        self.to_csv(paths["csv"])
        paths["schema"].write_text(json.dumps(self.schema(), indent=2, sort_keys=True) + "\n")
        paths["summary"].write_text(self.summary() + "\n")
        return paths


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return v


def merge(name: str, reports) -> ExperimentReport:
    """Concatenate reports (order of inputs is kept)."""
    out = ExperimentReport(name)
    for r in reports:
        out.records.extend(dict(rec, experiment=r.experiment) for rec in r.records)
        out.verdicts.extend(r.verdicts)
        out.meta[r.experiment] = r.meta
    return out
