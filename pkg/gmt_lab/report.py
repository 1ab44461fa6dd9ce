"""Run reports: a JSON document per run plus a plain-text narrative.

All numbers are exact: rationals print as "p/q" strings, measurements as {outcomes, payload} with the family's
own payload encoding, functions as {map, cod}.
"""

from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field

from .config import ReportConfig
from .families import FamilyBackend
from .finset import FinFun
from .fragment import Fragment, Measurement
from .structure import CheckReport
from .errors import PayloadError
from .utils import format_rational, truncate_items

Verdict = Union[bool, str, None]


def measurement_json(family: FamilyBackend, alpha: Measurement, effects: bool = False) -> Dict[str, Any]:
    """The {outcomes, payload} form, with outcome labels where the family has them.

    Witnesses also show the outcome-indexed effects of families with an effect view.
    """
    data: Dict[str, Any] = {"outcomes": alpha.arity, "payload": family.dump_payload(alpha.payload)}
    labels = family.outcome_labels(alpha.payload, alpha.arity)
    if labels is not None:
        data["labels"] = labels
    if effects:
        try:
            view = family.effects(alpha.payload, alpha.arity)
        except PayloadError:
            return data
        data["effects"] = [_effect_json(family, e) for e in view]
    return data


def _effect_json(family: FamilyBackend, effect: Any) -> Any:
    if isinstance(effect, frozenset):
        return sorted(effect)
    if isinstance(effect, Fraction):
        return format_rational(effect)
    if isinstance(effect, tuple):
        return [_effect_json(family, e) for e in effect]
    return family.effect_name(effect)


def function_json(f: FinFun) -> Dict[str, Any]:
    return {"map": list(f.table), "cod": f.cod.size}


def to_json(value: Any, family: FamilyBackend) -> Any:
    """JSON-ready form of witnesses and traces."""
    if isinstance(value, Measurement):
        return measurement_json(family, value, effects=True)
    if isinstance(value, FinFun):
        return function_json(value)
    if isinstance(value, CheckReport):
        return check_json(value, family)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str, float)):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): to_json(v, family) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [to_json(v, family) for v in value]
    return repr(value)


def check_json(report: CheckReport, family: FamilyBackend, limit: Optional[int] = None) -> Dict[str, Any]:
    inconclusive = report.inconclusive
    truncated = False
    if limit is not None:
        inconclusive, truncated = truncate_items(inconclusive, limit)
    return {
        "check": report.check,
        "verdict": report.verdict,
        "witness": to_json(report.witness, family),
        "trace": to_json(report.trace, family),
        "inconclusive": inconclusive,
        "inconclusive_truncated": truncated,
        "fragment_relative": report.fragment_relative,
        "provenance": report.provenance,
    }


class AnalysisSection(BaseModel):
    """One analysis of a run."""

    name: str
    verdict: Verdict = None
    summary: str = ""
    data: Dict[str, Any] = Field(default_factory=dict)
    fragment_relative: bool = False
    provenance: Optional[str] = None
    elapsed_seconds: float = 0.0


class FragmentSummary(BaseModel):
    family: str
    params: Dict[str, Any] = Field(default_factory=dict)
    bound: int
    carrier: Dict[str, int]
    measurements: int
    table_entries: int
    complete: bool

    @classmethod
    def of(cls, frag: Fragment) -> "FragmentSummary":
        params = {k: v for k, v in frag.family.params().items() if isinstance(v, int)}
        return cls(
            family=frag.family.kind,
            params=params,
            bound=frag.bound,
            carrier={str(n): len(ms) for n, ms in sorted(frag.carrier.items())},
            measurements=len(frag.measurements()),
            table_entries=frag.size(),
            complete=frag.complete,
        )


class Report(BaseModel):
    document: str
    format_version: str
    fragment: FragmentSummary
    sections: List[AnalysisSection] = Field(default_factory=list)
    law_violation: bool = False

    def section(self, name: str) -> Optional[AnalysisSection]:
        return next((s for s in self.sections if s.name == name), None)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def _verdict_text(verdict: Verdict) -> str:
    if verdict is True:
        return "yes"
    if verdict is False:
        return "no"
    if verdict is None:
        return "n/a"
    return str(verdict)


def _fit(lines: List[str], config: ReportConfig) -> str:
    kept = [
        line if len(line) <= config.max_line_length else line[: config.max_line_length] + "..."
        for line in lines[: config.max_text_lines]
    ]
    if len(lines) > config.max_text_lines or any(len(line) > config.max_line_length for line in lines):
        kept.append(config.truncation_message)
    return "\n".join(kept)


def render_text(report: Report, config: Optional[ReportConfig] = None) -> str:
    """Plain-text narrative of a report, truncated to the configured size."""
    config = config or ReportConfig()
    frag = report.fragment
    lines = [
        f"Document: {report.document}",
        f"Fragment: {frag.family} {frag.params or ''} bound {frag.bound}, "
        f"{frag.measurements} measurements, {frag.table_entries} table entries",
        "Carrier: " + ", ".join(f"|M({n})| = {k}" for n, k in frag.carrier.items()),
        "",
    ]
    for section in report.sections:
        flags = []
        if section.fragment_relative:
            flags.append("fragment-relative")
        if section.provenance:
            flags.append(section.provenance)
        suffix = f" [{', '.join(flags)}]" if flags else ""
        lines.append(f"== {section.name}: {_verdict_text(section.verdict)}{suffix} ({section.elapsed_seconds:.2f}s)")
        if section.summary:
            lines.append(f"   {section.summary}")
    if report.law_violation:
        lines.append("")
        lines.append("Law violations were found; remaining analyses were skipped.")
    return _fit(lines, config)
