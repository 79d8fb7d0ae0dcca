"""Report documents for verifiers, suites and variation experiments.

Every document converts to a plain dict and serializes to JSON (sorted
keys, so reruns are byte-identical) or YAML.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml


def _clean(value: Any) -> Any:
    """Make numpy scalars and non-finite floats JSON friendly."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


class Document:
    """Mixin giving to_json/to_yaml on top of to_dict."""

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(_clean(self.to_dict()), indent=indent, sort_keys=True) + "\n"

    def to_yaml(self) -> str:
        return yaml.safe_dump(_clean(self.to_dict()), default_flow_style=False, sort_keys=True)

    def write(self, dest: str | Path) -> Path:
        """Write as YAML for .yaml/.yml, JSON otherwise."""
        dest = Path(dest)
        dest.parent.mkdir(parents=True, exist_ok=True)
        text = self.to_yaml() if dest.suffix in (".yaml", ".yml") else self.to_json()
        dest.write_text(text, encoding="utf-8")
        return dest


@dataclass
class ConditionReport(Document):
    """Outcome of one condition verifier.

    ``passed`` is True iff ``worst_violation <= tol``. ``detail`` maps each
    sub-condition to its own worst violation (and any extra evidence).
    """
    passed: bool
    worst_violation: float
    location: float | None = None
    tol: float = 1e-9
    detail: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @classmethod
    def from_violations(cls, violations: dict[str, tuple[float, float | None]],
                        tol: float, **extra) -> "ConditionReport":
        """Build a report from {name: (worst, time_of_worst)}."""
        worst, location = 0.0, None
        for v, t in violations.values():
            if v > worst:
                worst, location = v, t
        detail = {name: {"worst_violation": v, "location": t}
                  for name, (v, t) in violations.items()}
        detail.update(extra.pop("detail", {}))
        return cls(passed=worst <= tol, worst_violation=worst, location=location,
                   tol=tol, detail=detail, **extra)

    def to_dict(self) -> dict[str, Any]:
        result = {
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "location": self.location,
            "tol": self.tol,
            "detail": self.detail,
        }
        if self.notes:
            result["notes"] = list(self.notes)
        return result


@dataclass
class SuiteResult(Document):
    """Aggregate of one verification suite over a seed range."""
    suite: str
    seeds: list[int]
    tol: float
    failures: list[int] = field(default_factory=list)
    worst_violation: float = 0.0
    worst_seed: int | None = None
    location: float | None = None
    worst_detail: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def add(self, seed: int, report: ConditionReport) -> None:
        if not report.passed:
            self.failures.append(seed)
        if self.worst_seed is None or report.worst_violation > self.worst_violation:
            self.worst_violation = report.worst_violation
            self.worst_seed = seed
            self.location = report.location
            self.worst_detail = report.detail

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "instances": len(self.seeds),
            "seed_first": self.seeds[0] if self.seeds else None,
            "seed_last": self.seeds[-1] if self.seeds else None,
            "tol": self.tol,
            "passed": self.passed,
            "failed_seeds": list(self.failures),
            "worst_violation": self.worst_violation,
            "worst_seed": self.worst_seed,
            "location": self.location,
            "worst_detail": self.worst_detail,
        }


@dataclass
class VariationSeries(Document):
    """Variation estimates for one parameter value across resolutions."""
    label: str
    parameter: float
    resolutions: list[int]
    seeds: list[int]
    estimates: list[list[float]]    # estimates[i][j]: resolution i, seed j
    means: list[float] = field(default_factory=list)
    successive_ratios: list[float] = field(default_factory=list)
    log2_ratios: list[float] = field(default_factory=list)
    finest_ratio: float | None = None
    span_ratio: float | None = None
    verdict: str = "inconclusive"
    skipped_seeds: list[int] = field(default_factory=list)
    monotone_fraction: float | None = None
    notes: list[str] = field(default_factory=list)
    # intervals[i][j]: (start, end, max_height) of the measured excursion
    intervals: list[list[tuple[float, float, float]]] | None = None

    def rows(self) -> list[tuple]:
        """Long-format rows sorted by (seed, resolution)."""
        out = []
        for j, seed in enumerate(self.seeds):
            for i, res in enumerate(self.resolutions):
                extra = self.intervals[i][j] if self.intervals else (None, None, None)
                out.append((self.label, self.parameter, seed, res, self.estimates[i][j], *extra))
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "parameter": self.parameter,
            "resolutions": list(self.resolutions),
            "seeds_used": len(self.seeds),
            "skipped_seeds": list(self.skipped_seeds),
            "means": list(self.means),
            "successive_ratios": list(self.successive_ratios),
            "log2_ratios": list(self.log2_ratios),
            "finest_ratio": self.finest_ratio,
            "span_ratio": self.span_ratio,
            "monotone_fraction": self.monotone_fraction,
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


@dataclass
class VariationReport(Document):
    """A variation-vs-resolution experiment: one series per parameter value."""
    experiment: str
    series: list[VariationSeries] = field(default_factory=list)
    thresholds: dict[str, Any] = field(default_factory=dict)
    settings: dict[str, Any] = field(default_factory=dict)

    @property
    def verdicts(self) -> dict[str, str]:
        return {s.label: s.verdict for s in self.series}

    def to_csv(self) -> str:
        """One row per (series, seed, resolution); excursion columns may be empty."""
        def num(x):
            return "" if x is None else format(x, ".17g")

        lines = ["series,parameter,seed,resolution,variation,start,end,max_height"]
        for s in self.series:
            for label, param, seed, res, value, start, end, height in s.rows():
                lines.append(f"{label},{param!r},{seed},{res},{num(value)},"
                             f"{num(start)},{num(end)},{num(height)}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict[str, Any]:
        return {
            "experiment": self.experiment,
            "thresholds": dict(self.thresholds),
            "settings": dict(self.settings),
            "verdicts": self.verdicts,
            "series": [s.to_dict() for s in self.series],
        }
