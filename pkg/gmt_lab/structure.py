"""Structural predicates of a fragment: binarizability, compatibility, classicality, projectivity, reachability.

Every check returns a CheckReport. A negative answer is a verdict of False with a witness; a question the
fragment's bound is too small to settle is reported as inconclusive, never as False.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .config import StructureConfig
from .errors import FragmentError
from .finset import FinFun, function_tables, obj, product_of, tupling
from .fragment import Arrow, Fragment, Measurement, arrow_of

logger = logging.getLogger(__name__)

INCONCLUSIVE = "inconclusive"

Verdict = Union[bool, str]


@dataclass
class CheckReport:
    """Outcome of one structural check."""

    check: str
    verdict: Verdict
    witness: Any = None
    trace: Dict[str, Any] = field(default_factory=dict)
    inconclusive: List[str] = field(default_factory=list)
    fragment_relative: bool = True
    provenance: str = "generated"

    @property
    def holds(self) -> bool:
        return self.verdict is True

    @property
    def fails(self) -> bool:
        return self.verdict is False

    @property
    def decided(self) -> bool:
        return isinstance(self.verdict, bool)


def _provenance(frag: Fragment) -> str:
    return "complete" if frag.complete else "generated"


def is_binarizable(frag: Fragment) -> CheckReport:
    """Distinct measurements over the same outcome set differ after some coarse-graining to two outcomes."""
    if frag.bound < 2:
        return CheckReport(
            "binarizable",
            INCONCLUSIVE,
            trace={"reason": "fragment bound too small for two-outcome coarse-grainings"},
            provenance=_provenance(frag),
        )
    for n in sorted(frag.carrier):
        seen: Dict[Tuple[Measurement, ...], Measurement] = {}
        binarizations = function_tables(n, 2)
        for alpha in frag.over(n):
            key = tuple(frag.table[alpha][(t, 2)] for t in binarizations)
            if key in seen:
                logger.info(f"{frag!r} is not binarizable: two measurements over {n} outcomes")
                return CheckReport(
                    "binarizable",
                    False,
                    witness=(n, seen[key], alpha),
                    trace={"binarizations": len(binarizations)},
                    provenance=_provenance(frag),
                )
            seen[key] = alpha
    return CheckReport("binarizable", True, provenance=_provenance(frag))


def _projection_arrows(sizes: Sequence[int]) -> Tuple[int, List[Arrow]]:
    p, projections = product_of([obj(n) for n in sizes])
    return p.size, [arrow_of(pi) for pi in projections]


def _joints(
    frag: Fragment, alphas: Sequence[Measurement], config: StructureConfig, stop: int
) -> Tuple[Optional[List[Measurement]], str, str]:
    """Up to `stop` measurements over the product with the given marginals.

    Returns (joints, provenance, reason); joints is None when the product cannot be searched.
    """
    if not alphas:
        raise FragmentError("Compatibility needs at least one measurement")
    for alpha in alphas:
        frag.require(alpha)
    sizes = [a.arity for a in alphas]
    size, arrows = _projection_arrows(sizes)
    found: List[Measurement] = []
    if size <= frag.bound:
        for beta in frag.over(size):
            if all(frag.table[beta][arrow] == a for arrow, a in zip(arrows, alphas)):
                found.append(beta)
                if len(found) >= stop:
                    break
        return found, _provenance(frag), ""

    family = frag.family
    if not family.enumerable or size > config.product_search_bound:
        return None, _provenance(frag), f"product of size {size} exceeds the fragment bound {frag.bound}"
    total = family.count(size)
    if total > config.max_enumeration:
        return None, _provenance(frag), f"M({size}) has {total} elements, above the enumeration cap"
    for payload in family.enumerate(size):
        if all(
            family.pushforward(payload, table, cod) == a.payload for (table, cod), a in zip(arrows, alphas)
        ):
            found.append(Measurement(obj(size), payload))
            if len(found) >= stop:
                break
    return found, "enumerated", ""


def weakly_compatible(
    frag: Fragment, alphas: Sequence[Measurement], config: Optional[StructureConfig] = None
) -> CheckReport:
    """Some measurement over the product of the outcome sets has the alphas as marginals."""
    config = config or StructureConfig()
    joints, provenance, reason = _joints(frag, alphas, config, stop=1)
    if joints is None:
        return CheckReport("weakly_compatible", INCONCLUSIVE, trace={"reason": reason}, provenance=provenance)
    if joints:
        return CheckReport("weakly_compatible", True, witness=joints[0], provenance=provenance)
    return CheckReport(
        "weakly_compatible", False, witness=tuple(alphas), trace={"joints": "none"}, provenance=provenance
    )


def strongly_compatible(
    frag: Fragment, alphas: Sequence[Measurement], config: Optional[StructureConfig] = None
) -> CheckReport:
    """Exactly one measurement over the product has the alphas as marginals."""
    config = config or StructureConfig()
    joints, provenance, reason = _joints(frag, alphas, config, stop=2)
    if joints is None:
        return CheckReport("strongly_compatible", INCONCLUSIVE, trace={"reason": reason}, provenance=provenance)
    if len(joints) == 1:
        return CheckReport(
            "strongly_compatible", True, witness=joints[0], trace={"joints": "unique"}, provenance=provenance
        )
    if not joints:
        return CheckReport(
            "strongly_compatible", False, witness=tuple(alphas), trace={"joints": "none"}, provenance=provenance
        )
    return CheckReport(
        "strongly_compatible",
        False,
        witness=tuple(alphas),
        trace={"joints": "multiple", "examples": joints},
        provenance=provenance,
    )


def _sweep(
    name: str,
    frag: Fragment,
    groups: Sequence[Tuple[Measurement, ...]],
    check: Any,
    config: StructureConfig,
) -> CheckReport:
    """False on the first failing group; otherwise inconclusive if any group was, else True."""
    inconclusive: List[str] = []
    provenances = set()
    for group in groups:
        report = check(frag, list(group), config)
        provenances.add(report.provenance)
        if report.verdict is False:
            logger.info(f"{name} fails on {frag!r}")
            return CheckReport(
                name,
                False,
                witness=tuple(group),
                trace={"failure": report.trace, "checked": len(groups)},
                provenance=report.provenance,
            )
        if report.verdict == INCONCLUSIVE:
            inconclusive.append(f"{list(group)!r}: {report.trace.get('reason', '')}")
    provenance = "enumerated" if "enumerated" in provenances else _provenance(frag)
    verdict: Verdict = INCONCLUSIVE if inconclusive else True
    return CheckReport(
        name,
        verdict,
        trace={"checked": len(groups), "undecided": len(inconclusive)},
        inconclusive=inconclusive,
        provenance=provenance,
    )


def _nonempty(frag: Fragment) -> List[Measurement]:
    return [m for m in frag.measurements() if m.arity >= 1]


def is_weakly_classical(frag: Fragment, config: Optional[StructureConfig] = None) -> CheckReport:
    """Every group of at most weak_arity measurements is weakly compatible."""
    config = config or StructureConfig()
    ms = _nonempty(frag)
    groups = [
        group
        for r in range(2, config.weak_arity + 1)
        for group in itertools.combinations_with_replacement(ms, r)
    ]
    return _sweep("weakly_classical", frag, groups, weakly_compatible, config)


def is_strongly_classical(frag: Fragment, config: Optional[StructureConfig] = None) -> CheckReport:
    """Every pair of measurements is strongly compatible; pairs suffice for strong classicality."""
    config = config or StructureConfig()
    groups = list(itertools.combinations_with_replacement(_nonempty(frag), 2))
    return _sweep("strongly_classical", frag, groups, strongly_compatible, config)


def is_projective(frag: Fragment) -> CheckReport:
    """Whenever f_*alpha = g_*alpha, alpha is uniquely supported on the equalizer S of f and g.

    For each alpha only the equalizer subset matters, so parallel pairs are grouped by their equal
    pushforward and deduplicated by S before the support search.
    """
    checked = 0
    for alpha in frag.measurements():
        n = alpha.arity
        row = frag.table[alpha]
        subsets: Dict[Tuple[int, ...], Tuple[Arrow, Arrow]] = {}
        for m in range(frag.bound + 1):
            buckets: Dict[Measurement, List[Arrow]] = {}
            for t in function_tables(n, m):
                buckets.setdefault(row[(t, m)], []).append((t, m))
            for arrows in buckets.values():
                for i in range(len(arrows)):
                    for j in range(i):
                        f, g = arrows[i], arrows[j]
                        members = tuple(x for x in range(n) if f[0][x] == g[0][x])
                        subsets.setdefault(members, (f, g))
        for members, (f, g) in sorted(subsets.items(), key=lambda item: (len(item[0]), item[0])):
            checked += 1
            inclusion = (members, n)
            supports = [sigma for sigma in frag.over(len(members)) if frag.table[sigma][inclusion] == alpha]
            if len(supports) != 1:
                logger.info(f"{frag!r} is not projective: {alpha!r} has {len(supports)} supports on {list(members)}")
                return CheckReport(
                    "projective",
                    False,
                    witness=(alpha, FinFun.of(f[0], f[1]), FinFun.of(g[0], g[1])),
                    trace={"subset": list(members), "supports": len(supports)},
                    provenance=_provenance(frag),
                )
    return CheckReport("projective", True, trace={"subsets_checked": checked}, provenance=_provenance(frag))


def reachable(frag: Fragment, alpha: Measurement, beta: Measurement) -> Optional[FinFun]:
    """The lexicographically least f with f_*alpha = beta, if any."""
    frag.require(alpha)
    frag.require(beta)
    m = beta.arity
    row = frag.table[alpha]
    for t in function_tables(alpha.arity, m):
        if row[(t, m)] == beta:
            return FinFun.of(t, m)
    return None


def replay_product_universality(frag: Fragment, alphas: Sequence[Measurement], beta: Measurement) -> CheckReport:
    """Check that every cone (gamma, g_1..g_n) over the alphas factors through beta by h = (g_1, ..., g_n).

    The factorisation through the product is unique as a function, so the content of the check is that
    h_*gamma = beta for every carried gamma whose pushforwards along the g_i are the alphas.
    """
    frag.require(beta)
    size, _ = _projection_arrows([a.arity for a in alphas])
    if beta.arity != size:
        raise FragmentError(f"{beta!r} is not over the product of the outcome sets")
    instances = 0
    for gamma in frag.measurements():
        z = gamma.arity
        row = frag.table[gamma]
        legs = [[t for t in function_tables(z, a.arity) if row[(t, a.arity)] == a] for a in alphas]
        for choice in itertools.product(*legs):
            instances += 1
            h = tupling([FinFun.of(t, a.arity) for t, a in zip(choice, alphas)])
            if row[arrow_of(h)] != beta:
                return CheckReport(
                    "product_universality",
                    False,
                    witness=(gamma, h),
                    trace={"instances": instances},
                    provenance=_provenance(frag),
                )
    return CheckReport("product_universality", True, trace={"instances": instances}, provenance=_provenance(frag))
