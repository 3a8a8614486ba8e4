"""Machine-readable check reports.

Canonical rendering is deterministic: keys sorted, floats fixed to 12
significant digits, and wall-clock timings zeroed (they are measurement
metadata, excluded from the reproducibility contract; render with
canonical=False to keep them).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

__all__ = ["CheckRecord", "Report", "render", "parse_json"]


@dataclass
class CheckRecord:
    name: str
    residual: float
    tolerance: float
    passed: bool
    wall_time_ms: float = 0.0
    error: str | None = None

    def consistent(self) -> bool:
        """The pass flag must equal residual < tolerance (NaN fails)."""
        ok = math.isfinite(self.residual) and self.residual < self.tolerance
        return self.passed == ok


@dataclass
class Report:
    config: dict
    records: list[CheckRecord] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def summary(self) -> dict:
        passed = sum(1 for r in self.records if r.passed)
        return {
            "total": len(self.records),
            "passed": passed,
            "failed": len(self.records) - passed,
        }

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    def validate(self) -> None:
        for r in self.records:
            if not r.consistent():
                raise ValueError(f"record {r.name!r}: pass flag inconsistent with residual")

    def to_obj(self, canonical: bool = True) -> dict:
        return {
            "config": self.config,
            "records": [
                {
                    "name": r.name,
                    "residual": r.residual,
                    "tolerance": r.tolerance,
                    "pass": r.passed,
                    "wall_time_ms": 0.0 if canonical else r.wall_time_ms,
                    "error": r.error,
                }
                for r in self.records
            ],
            "data": self.data,
            "summary": self.summary,
        }


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return "%.12e" % x


def _canonical_json(obj) -> str:
    """Tiny JSON serializer with sorted keys and fixed float formatting."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: kv[0])
        inner = ",".join(f"{json.dumps(str(k), ensure_ascii=True)}:{_canonical_json(v)}" for k, v in items)
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canonical_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def render(report: Report, fmt: str = "json", canonical: bool = True) -> bytes:
    """Serialize a report. json is canonical (sorted keys, %.12e floats);
    csv has the header name,residual,tolerance,pass,wall_time_ms."""
    if fmt == "json":
        return (_canonical_json(report.to_obj(canonical=canonical)) + "\n").encode()
    if fmt == "csv":
        lines = ["name,residual,tolerance,pass,wall_time_ms"]
        for r in report.records:
            wt = 0.0 if canonical else r.wall_time_ms
            lines.append(
                ",".join(
                    [
                        r.name,
                        _fmt_float(r.residual),
                        _fmt_float(r.tolerance),
                        "true" if r.passed else "false",
                        _fmt_float(wt),
                    ]
                )
            )
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


def parse_json(blob: bytes | str) -> Report:
    """Inverse of render(fmt='json'); render(parse_json(render(r))) is
    byte-identical to render(r)."""
    obj = json.loads(blob)
    records = [
        CheckRecord(
            name=r["name"],
            residual=float("nan") if r["residual"] is None else float(r["residual"]),
            tolerance=float("inf") if r["tolerance"] is None else float(r["tolerance"]),
            passed=bool(r["pass"]),
            wall_time_ms=float(r["wall_time_ms"] or 0.0),
            error=r.get("error"),
        )
        for r in obj.get("records", [])
    ]
    return Report(config=obj.get("config", {}), records=records, data=obj.get("data", {}))
