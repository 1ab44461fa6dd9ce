"""Fragment documents: the JSON input format of the command line, validated with pydantic."""

import json
import logging
from importlib import resources
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from packaging.version import InvalidVersion, Version
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .config import FragmentConfig
from .errors import DocumentError, GmtLabError
from .families import (
    FamilyBackend,
    make_boolean,
    make_classical,
    make_delta,
    make_effect_algebra,
    make_prob_meas,
    make_random_functions,
    make_unknown_functions,
    make_weird,
)
from .finset import obj
from .fragment import Fragment, Measurement, close, full_fragment
from .presented import Generator, PresentedBackend, Relation, make_presented

logger = logging.getLogger(__name__)

FORMAT_VERSION = "1.0"
CORPUS_PREFIX = "corpus:"

ANALYSES = (
    "validate",
    "det-states",
    "prob-states",
    "poss-states",
    "binarizable",
    "compatible",
    "weak-classical",
    "strong-classical",
    "projective",
    "embed-gpt",
    "reconstruct",
    "reachable",
)

# Shorthands accepted wherever analyses are named
ANALYSIS_GROUPS = {
    "states": ("det-states", "prob-states", "poss-states"),
    "classical": ("weak-classical", "strong-classical"),
    "all": ANALYSES,
}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ClassicalFamily(_Strict):
    kind: Literal["classical"]
    states: int = Field(ge=0, description="Number of hidden states |S|")


class BooleanFamily(_Strict):
    kind: Literal["boolean"]
    atoms: int = Field(ge=1, description="Number of atoms |W| of the finite Boolean algebra")


class EffectAlgebraFamily(_Strict):
    kind: Literal["effect_algebra"]
    elements: List[str] = Field(min_length=1)
    zero: str
    one: str
    sums: List[Tuple[str, str, str]] = Field(description="Defined sums a (+) b = c; symmetric closure is implied")


class DeltaFamily(_Strict):
    kind: Literal["delta"]


class ProbMeasFamily(_Strict):
    kind: Literal["prob_meas"]
    states: int = Field(ge=1)


class RandomFunctionsFamily(_Strict):
    kind: Literal["random_functions"]
    states: int = Field(ge=1)


class UnknownFunctionsFamily(_Strict):
    kind: Literal["unknown_functions"]
    states: int = Field(ge=1)


class WeirdFamily(_Strict):
    kind: Literal["weird"]


class PresentedGenerator(_Strict):
    id: str
    outcomes: int = Field(ge=1)
    labels: List[str] = Field(default_factory=list)


class MapRef(_Strict):
    generator: str
    map: List[int] = Field(description="Function table from the generator's outcomes")


class PresentedRelation(_Strict):
    left: MapRef
    right: MapRef
    cod: Optional[int] = Field(default=None, ge=0, description="Common codomain size; inferred when omitted")

    def codomain(self) -> int:
        if self.cod is not None:
            return self.cod
        return max(self.left.map + self.right.map, default=-1) + 1


class PresentedFamily(_Strict):
    kind: Literal["presented"]
    generators: List[PresentedGenerator] = Field(min_length=1)
    relations: List[PresentedRelation] = Field(default_factory=list)


FamilySpec = Annotated[
    Union[
        ClassicalFamily,
        BooleanFamily,
        EffectAlgebraFamily,
        DeltaFamily,
        ProbMeasFamily,
        RandomFunctionsFamily,
        UnknownFunctionsFamily,
        WeirdFamily,
        PresentedFamily,
    ],
    Field(discriminator="kind"),
]


class MeasurementSpec(_Strict):
    """A measurement given by its outcome count and a family payload (rationals as "p/q" strings)."""

    outcomes: int = Field(ge=0)
    payload: Any = None


class CompatibilityRequest(_Strict):
    mode: Literal["weak", "strong"] = "strong"
    measurements: List[MeasurementSpec] = Field(min_length=1)


class ReachableRequest(_Strict):
    source: MeasurementSpec
    target: MeasurementSpec


class FragmentDocument(_Strict):
    """A fragment to build and the analyses to run on it."""

    format_version: str = FORMAT_VERSION
    name: str = ""
    description: str = ""
    family: FamilySpec
    bound: Optional[int] = Field(default=None, ge=1, le=6, description="Outcome-set bound; default from configuration")
    generators: Union[Literal["all"], List[MeasurementSpec]] = "all"
    analyses: List[str] = Field(default_factory=lambda: ["validate"])
    compatibility: List[CompatibilityRequest] = Field(default_factory=list)
    reachable: List[ReachableRequest] = Field(default_factory=list)

    @field_validator("format_version")
    @classmethod
    def _check_version(cls, value: str) -> str:
        try:
            version = Version(value)
        except InvalidVersion as e:
            raise ValueError(f"Invalid format_version {value!r}") from e
        if version.major != Version(FORMAT_VERSION).major:
            raise ValueError(f"Unsupported format_version {value}; this build reads {FORMAT_VERSION}")
        return value

    @field_validator("analyses")
    @classmethod
    def _check_analyses(cls, value: List[str]) -> List[str]:
        try:
            return expand_analyses(value)
        except DocumentError as e:
            raise ValueError(str(e)) from e


def expand_analyses(names: List[str], location: str = "analyses") -> List[str]:
    """Resolve group names, drop duplicates and order as in ANALYSES; validate always comes first."""
    chosen = {"validate"}
    for name in names:
        name = name.strip()
        if not name:
            continue
        if name in ANALYSIS_GROUPS:
            chosen.update(ANALYSIS_GROUPS[name])
        elif name in ANALYSES:
            chosen.add(name)
        else:
            raise DocumentError(f"Unknown analysis {name!r}; choose from {', '.join(ANALYSES)}", location=location)
    return [a for a in ANALYSES if a in chosen]


def document_schema() -> Dict[str, Any]:
    return FragmentDocument.model_json_schema()


def _location(error: Dict[str, Any]) -> str:
    return ".".join(str(part) for part in error.get("loc", ())) or "(root)"


def parse_document(text: str) -> FragmentDocument:
    """Parse and validate a document; errors carry the JSON location."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"Invalid JSON: {e.msg}", location=f"line {e.lineno} column {e.colno}") from e
    try:
        return FragmentDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise DocumentError(
            f"{e.error_count()} schema error(s); first: {first['msg']}", location=_location(dict(first))
        ) from e


def corpus_names() -> List[str]:
    root = resources.files("gmt_lab") / "corpus"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def read_document_text(source: str) -> str:
    """Text of a document path or of a shipped document named corpus:<name>."""
    if source.startswith(CORPUS_PREFIX):
        name = source[len(CORPUS_PREFIX) :]
        if name not in corpus_names():
            raise DocumentError(f"No corpus document named {name!r}", location=source)
        return (resources.files("gmt_lab") / "corpus" / f"{name}.json").read_text(encoding="utf-8")
    path = Path(source)
    if not path.exists():
        raise DocumentError(f"Document {source} does not exist", location=source)
    return path.read_text(encoding="utf-8")


def load_document(source: str) -> FragmentDocument:
    return parse_document(read_document_text(source))


def build_family(doc: FragmentDocument, bound: int) -> FamilyBackend:
    spec = doc.family
    if isinstance(spec, ClassicalFamily):
        return make_classical(spec.states)
    if isinstance(spec, BooleanFamily):
        return make_boolean(spec.atoms)
    if isinstance(spec, EffectAlgebraFamily):
        return make_effect_algebra(spec.elements, spec.zero, spec.one, spec.sums)
    if isinstance(spec, DeltaFamily):
        return make_delta()
    if isinstance(spec, ProbMeasFamily):
        return make_prob_meas(spec.states)
    if isinstance(spec, RandomFunctionsFamily):
        return make_random_functions(spec.states)
    if isinstance(spec, UnknownFunctionsFamily):
        return make_unknown_functions(spec.states)
    if isinstance(spec, WeirdFamily):
        return make_weird()
    generators = [Generator(g.id, g.outcomes, tuple(g.labels)) for g in spec.generators]
    relations = [
        Relation(r.left.generator, tuple(r.left.map), r.right.generator, tuple(r.right.map), r.codomain())
        for r in spec.relations
    ]
    return make_presented(generators, relations, bound)


def measurement_of(frag: Fragment, spec: MeasurementSpec) -> Measurement:
    """The carried measurement a spec denotes."""
    if spec.outcomes > frag.bound:
        raise DocumentError(f"Measurement over {spec.outcomes} outcomes exceeds the bound {frag.bound}")
    alpha = Measurement(obj(spec.outcomes), frag.family.parse_payload(spec.payload, spec.outcomes))
    frag.require(alpha)
    return alpha


def resolve_bound(
    doc: FragmentDocument, bound: Optional[int] = None, config: Optional[FragmentConfig] = None
) -> int:
    """An explicit bound, else the document's, else the configured default."""
    if bound is not None:
        return bound
    if doc.bound is not None:
        return doc.bound
    return (config or FragmentConfig()).default_bound


def build_fragment(
    doc: FragmentDocument, bound: Optional[int] = None, config: Optional[FragmentConfig] = None
) -> Fragment:
    """Family backend plus closure of the requested generators ("all" enumerates M(X) up to the bound)."""
    bound = resolve_bound(doc, bound, config)
    logger.debug(f"Building {doc.name or 'unnamed'} fragment at bound {bound}")
    try:
        family = build_family(doc, bound)
        if isinstance(family, PresentedBackend):
            seeds = family.generator_measurements()
            if doc.generators != "all":
                seeds = [
                    Measurement(obj(g.outcomes), family.parse_payload(g.payload, g.outcomes))
                    for g in doc.generators
                ]
            return close(family, seeds, bound)
        if doc.generators == "all":
            return full_fragment(family, bound)
        seeds = [
            Measurement(obj(g.outcomes), family.parse_payload(g.payload, g.outcomes)) for g in doc.generators
        ]
        return close(family, seeds, bound)
    except DocumentError:
        raise
    except GmtLabError as e:
        raise DocumentError(str(e), location="family") from e
