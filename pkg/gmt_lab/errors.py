"""Exception hierarchy for gmt-lab."""

from typing import Any, Optional


class GmtLabError(Exception):
    """Base class for gmt-lab errors."""

    pass


class FinSetError(GmtLabError):
    """Malformed finite set or function, or a domain/codomain mismatch."""

    pass


class FragmentError(GmtLabError):
    """Measurement not carried by a fragment, or an outcome set beyond the bound."""

    pass


class LawViolationError(GmtLabError):
    """A fragment violates the identity, functoriality or singleton law."""

    def __init__(self, message: str, violations: Optional[list] = None):
        super().__init__(message)
        self.violations = violations or []


class PayloadError(GmtLabError):
    """Payload is not in canonical form for its family."""

    pass


class EffectAlgebraError(GmtLabError):
    """Partial-sum table violates an effect algebra axiom."""

    def __init__(self, message: str, instance: Any = None):
        super().__init__(message)
        self.instance = instance


class PresentationError(GmtLabError):
    """Inconsistent generators or relations of a presented family."""

    pass


class CertificateError(GmtLabError):
    """Certificate does not match the constraint system it is replayed against."""

    pass


class PolytopeTooLargeError(GmtLabError):
    """Ambient dimension exceeds the configured cap."""

    pass


class SeparationError(GmtLabError):
    """Fragment is not probabilistically separated."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class ReconstructionRefusedError(GmtLabError):
    """Hypotheses of the Boolean classification do not hold on the fragment."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class DocumentError(GmtLabError):
    """Fragment document failed schema or format-version validation."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(message)
        self.location = location
