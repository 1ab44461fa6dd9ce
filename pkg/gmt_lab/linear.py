"""Exact rational feasibility for {x >= 0 : A x = b} with Farkas certificates.

The solver first runs sparse Gauss-Jordan elimination while tracking, for every reduced row, which original rows
it combines. An inconsistent reduced row is already an infeasibility proof. Otherwise a phase-1 simplex with
Bland's rule runs on the reduced system; at a positive optimum the dual values give the certificate.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import CertificateError, PayloadError
from .utils import format_rational, parse_rational

logger = logging.getLogger(__name__)

CERTIFICATE_HEADER = "# gmt-lab farkas certificate v1"

Sparse = Dict[int, Fraction]


@dataclass(frozen=True)
class Row:
    """One equality sum(coeffs[j] * x_j) = rhs."""

    key: str
    coeffs: Tuple[Tuple[int, Fraction], ...]
    rhs: Fraction


@dataclass
class LinearSystem:
    """Equalities over nonnegative variables, with stable keys for every row and variable."""

    variable_keys: List[str]
    rows: List[Row] = field(default_factory=list)
    _seen: set = field(default_factory=set, repr=False)

    @property
    def n_vars(self) -> int:
        return len(self.variable_keys)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def add_row(self, key: str, coeffs: Dict[int, Fraction], rhs: Fraction) -> bool:
        """Append an equality unless it is trivial or a duplicate; returns whether it was kept."""
        items = tuple(sorted((j, Fraction(a)) for j, a in coeffs.items() if a != 0))
        rhs = Fraction(rhs)
        if not items and rhs == 0:
            return False
        signature = (items, rhs)
        if signature in self._seen:
            return False
        self._seen.add(signature)
        self.rows.append(Row(key, items, rhs))
        return True

    def digest(self) -> str:
        """sha256 of the layout: variable keys, then row keys with their coefficients."""
        h = hashlib.sha256()
        for key in self.variable_keys:
            h.update(f"v {key}\n".encode())
        for row in self.rows:
            terms = " ".join(f"{j}:{format_rational(a)}" for j, a in row.coeffs)
            h.update(f"r {row.key} {terms} = {format_rational(row.rhs)}\n".encode())
        return h.hexdigest()

    def residual(self, point: Sequence[Fraction]) -> List[str]:
        """Keys of rows or variables the point violates."""
        bad = [self.variable_keys[j] for j, v in enumerate(point) if v < 0]
        for row in self.rows:
            if sum(a * point[j] for j, a in row.coeffs) != row.rhs:
                bad.append(row.key)
        return bad


@dataclass
class FarkasCertificate:
    """Multipliers y (signed, per equality row) and z (nonnegative, per variable).

    Combining y_i (a_i x - b_i) = 0 with z_j x_j >= 0 yields c . x + d >= 0; the certificate is valid when every
    coefficient of c vanishes and d < 0.
    """

    digest: str
    n_rows: int
    n_vars: int
    equalities: Dict[int, Fraction]
    nonnegativity: Dict[int, Fraction]


@dataclass
class FeasibilityResult:
    feasible: bool
    point: Optional[List[Fraction]] = None
    certificate: Optional[FarkasCertificate] = None
    pivots: int = 0


def _axpy(target: Sparse, scale: Fraction, source: Sparse) -> None:
    """target += scale * source, dropping zeros."""
    for j, a in source.items():
        v = target.get(j, Fraction(0)) + scale * a
        if v:
            target[j] = v
        else:
            target.pop(j, None)


def combine(
    system: LinearSystem, equalities: Dict[int, Fraction], nonnegativity: Dict[int, Fraction]
) -> Tuple[Sparse, Fraction]:
    """The combined inequality c . x + d >= 0 as (c, d)."""
    coeffs: Sparse = {}
    constant = Fraction(0)
    for i, y in equalities.items():
        row = system.rows[i]
        _axpy(coeffs, y, dict(row.coeffs))
        constant -= y * row.rhs
    _axpy(coeffs, Fraction(1), dict(nonnegativity))
    return coeffs, constant


def verify_farkas(system: LinearSystem, cert: FarkasCertificate) -> bool:
    """Replay the certificate against the system, independently of the solver."""
    if cert.n_rows != system.n_rows or cert.n_vars != system.n_vars:
        raise CertificateError(
            f"Certificate is for {cert.n_rows} rows and {cert.n_vars} variables, "
            f"system has {system.n_rows} and {system.n_vars}"
        )
    if cert.digest != system.digest():
        raise CertificateError("Certificate layout digest does not match the constraint system")
    if any(not 0 <= i < system.n_rows for i in cert.equalities):
        raise CertificateError("Certificate references a row outside the system")
    if any(not 0 <= j < system.n_vars for j in cert.nonnegativity):
        raise CertificateError("Certificate references a variable outside the system")
    if any(z < 0 for z in cert.nonnegativity.values()):
        return False
    coeffs, constant = combine(system, cert.equalities, cert.nonnegativity)
    return not coeffs and constant < 0


def _certificate_from_rows(system: LinearSystem, y: Sparse) -> FarkasCertificate:
    """Normalize y so that y . b = 1 and derive z = -(y^T A)."""
    yb = sum((y_i * system.rows[i].rhs for i, y_i in y.items()), Fraction(0))
    if yb <= 0:
        raise CertificateError("Dual multipliers do not separate the right-hand side")
    y = {i: v / yb for i, v in y.items() if v}
    ya: Sparse = {}
    for i, y_i in y.items():
        _axpy(ya, y_i, dict(system.rows[i].coeffs))
    z = {j: -a for j, a in ya.items()}
    cert = FarkasCertificate(system.digest(), system.n_rows, system.n_vars, y, z)
    if not verify_farkas(system, cert):
        raise CertificateError("Derived multipliers failed replay")
    return cert


def _eliminate(
    system: LinearSystem,
) -> Tuple[List[Tuple[Sparse, Fraction, Sparse]], Optional[Sparse], Dict[int, int]]:
    """Gauss-Jordan with provenance.

    Returns the reduced rows with the pivot column of each, or the combination of an inconsistent row.
    """
    reduced: List[Tuple[Sparse, Fraction, Sparse]] = []
    pivot_of: Dict[int, int] = {}
    for i, row in enumerate(system.rows):
        coeffs: Sparse = dict(row.coeffs)
        rhs = row.rhs
        prov: Sparse = {i: Fraction(1)}
        for p in [c for c in coeffs if c in pivot_of]:
            c = coeffs.get(p)
            if not c:
                continue
            p_coeffs, p_rhs, p_prov = reduced[pivot_of[p]]
            _axpy(coeffs, -c, p_coeffs)
            rhs -= c * p_rhs
            _axpy(prov, -c, p_prov)
        if not coeffs:
            if rhs != 0:
                return reduced, {k: v / rhs for k, v in prov.items()}, pivot_of
            continue
        p = min(coeffs)
        scale = 1 / coeffs[p]
        coeffs = {j: a * scale for j, a in coeffs.items()}
        rhs *= scale
        prov = {k: v * scale for k, v in prov.items()}
        for k, (o_coeffs, o_rhs, o_prov) in enumerate(reduced):
            c = o_coeffs.get(p)
            if c:
                _axpy(o_coeffs, -c, coeffs)
                _axpy(o_prov, -c, prov)
                reduced[k] = (o_coeffs, o_rhs - c * rhs, o_prov)
        pivot_of[p] = len(reduced)
        reduced.append((coeffs, rhs, prov))
    return reduced, None, pivot_of


def find_feasible_point(system: LinearSystem) -> FeasibilityResult:
    """Decide {x >= 0 : A x = b} exactly: a feasible point or a verified Farkas certificate."""
    n = system.n_vars
    reduced, inconsistent, _ = _eliminate(system)
    if inconsistent is not None:
        logger.debug(f"Elimination found an inconsistent combination of {len(inconsistent)} rows")
        return FeasibilityResult(False, certificate=_certificate_from_rows(system, inconsistent))

    m = len(reduced)
    # phase-1 tableau: x columns 0..n-1, one artificial column per reduced row
    sigma = [Fraction(1) if r[1] >= 0 else Fraction(-1) for r in reduced]
    tableau: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for k, (coeffs, b, _) in enumerate(reduced):
        line = [Fraction(0)] * (n + m)
        for j, a in coeffs.items():
            line[j] = sigma[k] * a
        line[n + k] = Fraction(1)
        tableau.append(line)
        rhs.append(sigma[k] * b)
    basis = [n + k for k in range(m)]
    costs = [-sum((tableau[k][j] for k in range(m)), Fraction(0)) for j in range(n)] + [Fraction(0)] * m
    objective = sum(rhs, Fraction(0))

    pivots = 0
    while True:
        entering = next((j for j in range(n) if costs[j] < 0), None)
        if entering is None:
            break
        candidates = [(rhs[k] / tableau[k][entering], basis[k], k) for k in range(m) if tableau[k][entering] > 0]
        _, _, leave = min(candidates)
        piv = tableau[leave][entering]
        tableau[leave] = [a / piv for a in tableau[leave]]
        rhs[leave] /= piv
        for k in range(m):
            f = tableau[k][entering]
            if k != leave and f:
                line = tableau[k]
                lead = tableau[leave]
                tableau[k] = [a - f * b for a, b in zip(line, lead)]
                rhs[k] -= f * rhs[leave]
        f = costs[entering]
        costs = [a - f * b for a, b in zip(costs, tableau[leave])]
        objective -= f * rhs[leave]
        basis[leave] = entering
        pivots += 1

    logger.debug(f"Phase-1 simplex: {m} rows, {n} variables, {pivots} pivots, optimum {objective}")
    if objective == 0:
        point = [Fraction(0)] * n
        for k, j in enumerate(basis):
            if j < n:
                point[j] = rhs[k]
        return FeasibilityResult(True, point=point, pivots=pivots)

    # u_k = 1 - reduced cost of artificial k; y = sigma * u pulled back through the provenance
    y: Sparse = {}
    for k in range(m):
        u = (1 - costs[n + k]) * sigma[k]
        if u:
            _axpy(y, u, reduced[k][2])
    return FeasibilityResult(False, certificate=_certificate_from_rows(system, y), pivots=pivots)


def lift_certificate(sub: LinearSystem, cert: FarkasCertificate, full: LinearSystem) -> FarkasCertificate:
    """Re-index a certificate of a subsystem (matching row and variable keys) into the full system."""
    row_index = {row.key: i for i, row in enumerate(full.rows)}
    var_index = {key: j for j, key in enumerate(full.variable_keys)}
    try:
        y = {row_index[sub.rows[i].key]: v for i, v in cert.equalities.items()}
        z = {var_index[sub.variable_keys[j]]: v for j, v in cert.nonnegativity.items()}
    except KeyError as e:
        raise CertificateError(f"Subsystem key {e.args[0]} is absent from the full system") from e
    lifted = FarkasCertificate(full.digest(), full.n_rows, full.n_vars, y, z)
    if not verify_farkas(full, lifted):
        raise CertificateError("Lifted certificate failed replay on the full system")
    return lifted


def dump_certificate(cert: FarkasCertificate, system: LinearSystem) -> str:
    """Text form: header lines, then one line per nonzero multiplier."""
    lines = [
        CERTIFICATE_HEADER,
        f"layout-sha256 {cert.digest}",
        f"rows {cert.n_rows}",
        f"variables {cert.n_vars}",
    ]
    for i in sorted(cert.equalities):
        lines.append(f"eq {i} {system.rows[i].key} {format_rational(cert.equalities[i])}")
    for j in sorted(cert.nonnegativity):
        lines.append(f"nonneg {j} {system.variable_keys[j]} {format_rational(cert.nonnegativity[j])}")
    return "\n".join(lines) + "\n"


def load_certificate(text: str, system: Optional[LinearSystem] = None) -> FarkasCertificate:
    """Parse the text form; with a system, row and variable keys are checked against its layout."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != CERTIFICATE_HEADER:
        raise CertificateError("Missing certificate header")
    header: Dict[str, str] = {}
    equalities: Dict[int, Fraction] = {}
    nonnegativity: Dict[int, Fraction] = {}
    for line in lines[1:]:
        parts = line.split()
        try:
            if parts[0] in ("layout-sha256", "rows", "variables") and len(parts) == 2:
                header[parts[0]] = parts[1]
            elif parts[0] in ("eq", "nonneg") and len(parts) == 4:
                index, key, value = int(parts[1]), parts[2], parse_rational(parts[3])
                if parts[0] == "eq":
                    if system is not None and (index >= system.n_rows or system.rows[index].key != key):
                        raise CertificateError(f"Row {index} is not {key} in this system")
                    equalities[index] = value
                else:
                    if system is not None and (index >= system.n_vars or system.variable_keys[index] != key):
                        raise CertificateError(f"Variable {index} is not {key} in this system")
                    nonnegativity[index] = value
            else:
                raise CertificateError(f"Unrecognized certificate line: {line}")
        except (ValueError, PayloadError) as e:
            raise CertificateError(f"Malformed certificate line: {line}") from e
    missing = {"layout-sha256", "rows", "variables"} - set(header)
    if missing:
        raise CertificateError(f"Certificate header lacks {sorted(missing)}")
    return FarkasCertificate(
        header["layout-sha256"], int(header["rows"]), int(header["variables"]), equalities, nonnegativity
    )


def reduced_rows(system: LinearSystem) -> Optional[List[Tuple[int, Sparse, Fraction]]]:
    """Reduced row echelon form as (pivot column, coefficients, rhs), or None when the equalities are inconsistent."""
    reduced, inconsistent, pivot_of = _eliminate(system)
    if inconsistent is not None:
        return None
    row_pivot = {r: p for p, r in pivot_of.items()}
    return [(row_pivot[r], coeffs, rhs) for r, (coeffs, rhs, _) in enumerate(reduced)]
