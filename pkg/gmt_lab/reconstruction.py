"""Recover the state set of a strongly classical, projective fragment and check M(X) = X^W."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .config import StructureConfig
from .errors import ReconstructionRefusedError
from .finset import Table
from .fragment import Fragment, Measurement
from .states import DeterministicState, enumerate_deterministic_states
from .structure import CheckReport, is_binarizable, is_projective, is_strongly_classical

logger = logging.getLogger(__name__)


@dataclass
class ReconstructionResult:
    """Deterministic states W and the evaluation maps ev_X(alpha) = (s(alpha))_{s in W}."""

    states: List[DeterministicState]
    ev: Dict[Measurement, Table]
    bijective: Dict[int, bool]
    naturality_violations: List[str] = field(default_factory=list)
    binarizable: Optional[bool] = None
    hypotheses: List[CheckReport] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(self.bijective.values()) and not self.naturality_violations

    @property
    def size(self) -> int:
        return len(self.states)


def _refuse(message: str, report: Optional[CheckReport] = None) -> ReconstructionRefusedError:
    logger.info(f"Reconstruction refused: {message}")
    return ReconstructionRefusedError(message, report=report)


def reconstruct(frag: Fragment, config: Optional[StructureConfig] = None) -> ReconstructionResult:
    """Check the hypotheses, then verify that ev_X is a bijection M(X) -> X^W for every carried X.

    Raises ReconstructionRefusedError when the family cannot be enumerated, the fragment does not carry all of
    M(X), or strong classicality or projectivity is not established.
    """
    if not frag.family.enumerable:
        raise _refuse(f"Family {frag.family.kind} cannot be enumerated")
    if not frag.complete:
        raise _refuse("Fragment does not carry all measurements up to its bound")
    hypotheses = []
    for check in (is_strongly_classical(frag, config), is_projective(frag)):
        hypotheses.append(check)
        if not check.holds:
            raise _refuse(f"{check.check} is {check.verdict}", check)

    states = sorted(enumerate_deterministic_states(frag))
    ev: Dict[Measurement, Table] = {alpha: tuple(s[alpha] for s in states) for alpha in frag.measurements()}

    bijective = {}
    for n in sorted(frag.carrier):
        carried = frag.over(n)
        images = {ev[alpha] for alpha in carried}
        bijective[n] = len(carried) == n ** len(states) and len(images) == len(carried)

    violations = []
    for alpha, (table, _), beta in frag.entries():
        if ev[beta] != tuple(table[v] for v in ev[alpha]):
            violations.append(f"{alpha!r} along {list(table)}")

    result = ReconstructionResult(states, ev, bijective, violations, hypotheses=hypotheses)
    if result.verdict:
        result.binarizable = is_binarizable(frag).holds
    logger.info(f"Reconstructed {len(states)} states from {frag!r}; bijective={result.verdict}")
    return result
