"""Analysis runners behind `gmt-lab run`.

Each runner takes the built fragment, the document and the configuration and returns a dict with the keys of
an AnalysisSection (verdict, summary, data, and optionally fragment_relative and provenance).
"""

import logging
import time
from typing import Any, Callable, Dict, List, Optional

from .config import Config
from .document import FragmentDocument, measurement_of
from .errors import LawViolationError, PolytopeTooLargeError, ReconstructionRefusedError
from .families import BooleanBackend, boolean_meet
from .fragment import Fragment, validate
from .gpt import build_state_polytope, check_separation, embed
from .linear import dump_certificate
from .reconstruction import reconstruct
from .report import AnalysisSection, FragmentSummary, Report, check_json, measurement_json, to_json
from .states import (
    check_deterministic,
    check_possibilistic,
    check_probabilistic,
    enumerate_deterministic_states,
    enumerate_possibilistic_states,
    find_probabilistic_state,
    point_mass_lift,
    verify_certificate,
)
from .structure import (
    INCONCLUSIVE,
    CheckReport,
    is_binarizable,
    is_projective,
    is_strongly_classical,
    is_weakly_classical,
    reachable,
    strongly_compatible,
    weakly_compatible,
)
from .utils import format_rationals, truncate_items

logger = logging.getLogger(__name__)

Runner = Callable[[Fragment, FragmentDocument, Config], Dict[str, Any]]


def _check_section(report: CheckReport, frag: Fragment, config: Config, summary: str) -> Dict[str, Any]:
    data = check_json(report, frag.family, config.report.max_witness_items)
    return {
        "verdict": report.verdict,
        "summary": summary,
        "data": data,
        "fragment_relative": report.fragment_relative,
        "provenance": report.provenance,
    }


def run_validate(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    """Singleton, identity, closure and functoriality laws."""
    report = validate(frag)
    violations, truncated = truncate_items([v.to_dict() for v in report.violations], config.report.max_witness_items)
    summary = "all laws hold" if report.ok else f"{len(report.violations)} law violations"
    return {
        "verdict": report.ok,
        "summary": summary,
        "data": {"violations": violations, "violation_count": len(report.violations), "truncated": truncated},
    }


def run_det_states(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    """Deterministic states, each re-checked against the full table and lifted to a probabilistic state."""
    limit = config.solver.det_limit
    states = enumerate_deterministic_states(frag, limit)
    for s in states:
        bad = check_deterministic(frag, s) + check_probabilistic(frag, point_mass_lift(frag, s))
        if bad:
            raise LawViolationError(f"Deterministic state {s!r} fails its re-check", violations=bad)
    shown, truncated = truncate_items([list(s.outcomes) for s in states], config.report.max_witness_items)
    hit_limit = limit is not None and len(states) >= limit
    return {
        "verdict": bool(states),
        "summary": f"{len(states)}{'+' if hit_limit else ''} deterministic states",
        "data": {"count": len(states), "limit_reached": hit_limit, "states": shown, "truncated": truncated},
        "fragment_relative": True,
    }


def run_prob_states(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    """A probabilistic state, or a Farkas certificate replayed against the system."""
    outcome = find_probabilistic_state(frag, config.solver)
    data: Dict[str, Any] = {"stats": outcome.stats}
    if outcome.state is not None:
        bad = check_probabilistic(frag, outcome.state)
        if bad:
            raise LawViolationError("Probabilistic state fails its re-check", violations=bad)
        rows = [
            {"measurement": measurement_json(frag.family, alpha), "distribution": format_rationals(dist)}
            for alpha, dist in outcome.state.assignment.items()
        ]
        data["state"], data["truncated"] = truncate_items(rows, config.report.max_witness_items)
        return {"verdict": True, "summary": "a probabilistic state exists", "data": data, "fragment_relative": True}

    cert = outcome.certificate
    if cert is None:
        raise LawViolationError("Solver reported infeasibility without a certificate")
    verified = verify_certificate(frag, cert)
    data["certificate"] = dump_certificate(cert, outcome.system)
    data["certificate_verified"] = verified
    if outcome.seed is not None:
        data["seed"] = measurement_json(frag.family, outcome.seed)
    return {
        "verdict": False,
        "summary": f"no probabilistic state; certificate {'verified' if verified else 'FAILED replay'}",
        "data": data,
        "fragment_relative": True,
    }


def run_poss_states(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    """Possibilistic states under image-naturality."""
    limit = config.solver.poss_limit
    states = enumerate_possibilistic_states(frag, limit)
    for s in states:
        bad = check_possibilistic(frag, s)
        if bad:
            raise LawViolationError(f"Possibilistic state {s!r} fails its re-check", violations=bad)
    shown, truncated = truncate_items(
        [[list(subset) for subset in s.subsets] for s in states], config.report.max_witness_items
    )
    hit_limit = limit is not None and len(states) >= limit
    return {
        "verdict": bool(states),
        "summary": f"{len(states)}{'+' if hit_limit else ''} possibilistic states",
        "data": {
            "count": len(states),
            "singleton_states": sum(1 for s in states if s.is_singleton()),
            "limit_reached": hit_limit,
            "states": shown,
            "truncated": truncated,
        },
        "fragment_relative": True,
    }


def run_binarizable(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    report = is_binarizable(frag)
    summary = "distinct measurements are told apart by two-outcome coarse-grainings"
    if report.fails:
        summary = f"two measurements over {report.witness[0]} outcomes agree on every binarization"
    return _check_section(report, frag, config, summary)


def _combine(verdicts: List[Any]) -> Any:
    if any(v is False for v in verdicts):
        return False
    if any(v == INCONCLUSIVE for v in verdicts):
        return INCONCLUSIVE
    return True


def run_compatible(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    """The document's explicit compatibility questions."""
    if not doc.compatibility:
        return {"verdict": None, "summary": "no compatibility requests"}
    checks = []
    verdicts = []
    for request in doc.compatibility:
        alphas = [measurement_of(frag, spec) for spec in request.measurements]
        check = strongly_compatible if request.mode == "strong" else weakly_compatible
        report = check(frag, alphas, config.structure)
        entry = check_json(report, frag.family, config.report.max_witness_items)
        entry["mode"] = request.mode
        if request.mode == "strong" and report.holds and isinstance(frag.family, BooleanBackend):
            meet = boolean_meet(frag.family, [a.payload for a in alphas], [a.arity for a in alphas])
            entry["meet_formula_agrees"] = meet == report.witness.payload
        checks.append(entry)
        verdicts.append(report.verdict)
    verdict = _combine(verdicts)
    return {
        "verdict": verdict,
        "summary": f"{len(checks)} compatibility checks",
        "data": {"checks": checks},
        "fragment_relative": True,
    }


def run_weak_classical(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    report = is_weakly_classical(frag, config.structure)
    summary = f"groups of up to {config.structure.weak_arity} measurements: {report.trace.get('checked', 0)} checked"
    return _check_section(report, frag, config, summary)


def run_strong_classical(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    report = is_strongly_classical(frag, config.structure)
    summary = f"pairs checked: {report.trace.get('checked', 0)}"
    return _check_section(report, frag, config, summary)


def run_projective(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    report = is_projective(frag)
    summary = "every coincidence of coarse-grainings has a unique support"
    if report.fails:
        summary = f"{report.trace['supports']} supports on the subset {report.trace['subset']}"
    return _check_section(report, frag, config, summary)


def run_embed_gpt(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    """State polytope, separation and the effect-tuple embedding."""
    try:
        poly = build_state_polytope(frag, config.polytope)
    except PolytopeTooLargeError as e:
        return {"verdict": INCONCLUSIVE, "summary": str(e), "fragment_relative": True}
    limit = config.report.max_witness_items
    vertices, truncated = truncate_items([format_rationals(v) for v in poly.vertices], limit)
    data: Dict[str, Any] = {
        "ambient_dimension": poly.ambient_dimension,
        "solution_space_dimension": poly.chart.dimension if poly.chart is not None else None,
        "vertex_count": len(poly.vertices),
        "vertices": vertices,
        "vertices_truncated": truncated,
    }
    separation = check_separation(frag, poly)
    if not separation.separated:
        data["witnesses"], data["witnesses_truncated"] = truncate_items(
            to_json(separation.witnesses, frag.family), limit
        )
        return {
            "verdict": False,
            "summary": f"not probabilistically separated: {len(separation.witnesses)} witness pairs",
            "data": data,
            "fragment_relative": True,
        }
    embedding = embed(frag, poly)
    tuples = [
        {
            "measurement": measurement_json(frag.family, alpha),
            "values": [format_rationals(row) for row in embedding.values(alpha)],
        }
        for alpha in frag.measurements()
    ]
    data["embedding"], data["embedding_truncated"] = truncate_items(tuples, limit)
    data["checked_points"] = embedding.checked_points
    return {
        "verdict": True,
        "summary": f"embedded into a GPT with {len(poly.vertices)} extreme states",
        "data": data,
        "fragment_relative": True,
    }


def run_reconstruct(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    """Recover W from a strongly classical, projective fragment."""
    try:
        result = reconstruct(frag, config.structure)
    except ReconstructionRefusedError as e:
        report = e.report
        verdict = INCONCLUSIVE if report is None or report.verdict == INCONCLUSIVE else False
        data = {"refused": True, "reason": str(e)}
        if report is not None:
            data["check"] = check_json(report, frag.family, config.report.max_witness_items)
        return {"verdict": verdict, "summary": f"refused: {e}", "data": data}
    ev, truncated = truncate_items(
        [{"measurement": measurement_json(frag.family, a), "ev": list(t)} for a, t in result.ev.items()],
        config.report.max_witness_items,
    )
    return {
        "verdict": result.verdict,
        "summary": f"|W| = {result.size}, bijective: {result.verdict}",
        "data": {
            "states": [list(s.outcomes) for s in result.states],
            "bijective": {str(n): ok for n, ok in result.bijective.items()},
            "naturality_violations": result.naturality_violations,
            "binarizable": result.binarizable,
            "ev": ev,
            "ev_truncated": truncated,
        },
    }


def run_reachable(frag: Fragment, doc: FragmentDocument, config: Config) -> Dict[str, Any]:
    """Deterministic post-processings between the requested pairs."""
    if not doc.reachable:
        return {"verdict": None, "summary": "no reachability requests"}
    rows = []
    for request in doc.reachable:
        alpha = measurement_of(frag, request.source)
        beta = measurement_of(frag, request.target)
        f = reachable(frag, alpha, beta)
        rows.append(
            {
                "source": measurement_json(frag.family, alpha),
                "target": measurement_json(frag.family, beta),
                "map": to_json(f, frag.family),
            }
        )
    found = sum(1 for r in rows if r["map"] is not None)
    return {
        "verdict": found == len(rows),
        "summary": f"{found} of {len(rows)} targets reachable",
        "data": {"pairs": rows},
    }


RUNNERS: Dict[str, Runner] = {
    "validate": run_validate,
    "det-states": run_det_states,
    "prob-states": run_prob_states,
    "poss-states": run_poss_states,
    "binarizable": run_binarizable,
    "compatible": run_compatible,
    "weak-classical": run_weak_classical,
    "strong-classical": run_strong_classical,
    "projective": run_projective,
    "embed-gpt": run_embed_gpt,
    "reconstruct": run_reconstruct,
    "reachable": run_reachable,
}


def run_analyses(
    frag: Fragment, doc: FragmentDocument, config: Config, analyses: Optional[List[str]] = None
) -> Report:
    """Run the analyses in order; a failed validation stops the run."""
    names = analyses if analyses is not None else doc.analyses
    report = Report(
        document=doc.name or "(unnamed)", format_version=doc.format_version, fragment=FragmentSummary.of(frag)
    )
    for name in names:
        logger.info(f"Running {name}")
        start = time.perf_counter()
        result = RUNNERS[name](frag, doc, config)
        elapsed = time.perf_counter() - start
        section = AnalysisSection(name=name, elapsed_seconds=round(elapsed, 3), **result)
        report.sections.append(section)
        logger.info(f"{name}: {section.verdict} in {elapsed:.2f}s")
        if name == "validate" and section.verdict is False:
            report.law_violation = True
            break
    return report
