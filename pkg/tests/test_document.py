"""Tests for fragment documents."""

import json

import pytest

from gmt_lab.config import FragmentConfig
from gmt_lab.document import (
    ANALYSES,
    FragmentDocument,
    build_fragment,
    corpus_names,
    document_schema,
    expand_analyses,
    load_document,
    measurement_of,
    parse_document,
    read_document_text,
    resolve_bound,
)
from gmt_lab.errors import DocumentError, FragmentError
from gmt_lab.fragment import validate


def doc_text(**fields):
    base = {"family": {"kind": "classical", "states": 2}, "bound": 2}
    base.update(fields)
    return json.dumps(base)


class TestParseDocument:
    """Test schema validation and error locations."""

    def test_minimal_document(self):
        doc = parse_document(doc_text())
        assert doc.format_version == "1.0"
        assert doc.generators == "all"
        assert doc.analyses == ["validate"]

    def test_invalid_json(self):
        with pytest.raises(DocumentError) as excinfo:
            parse_document("{not json")
        assert excinfo.value.location.startswith("line 1")

    @pytest.mark.parametrize(
        "fields,location",
        [
            ({"bound": 7}, "bound"),
            ({"bound": 0}, "bound"),
            ({"format_version": "2.0"}, "format_version"),
            ({"format_version": "one"}, "format_version"),
            ({"analyses": ["validate", "guess"]}, "analyses"),
            ({"colour": "blue"}, "colour"),
            ({"family": {"kind": "classical", "states": -1}}, "family.classical.states"),
        ],
    )
    def test_schema_errors(self, fields, location):
        with pytest.raises(DocumentError) as excinfo:
            parse_document(doc_text(**fields))
        assert excinfo.value.location == location

    def test_missing_family(self):
        with pytest.raises(DocumentError) as excinfo:
            parse_document(json.dumps({"bound": 2}))
        assert excinfo.value.location == "family"

    def test_minor_version_is_accepted(self):
        assert parse_document(doc_text(format_version="1.3")).format_version == "1.3"

    def test_schema(self):
        schema = document_schema()
        assert "family" in schema["properties"]
        assert set(schema["required"]) == {"family"}
        assert FragmentDocument.model_json_schema() == schema


class TestExpandAnalyses:
    """Test analysis names and groups."""

    def test_groups(self):
        assert expand_analyses(["states"]) == ["validate", "det-states", "prob-states", "poss-states"]
        assert expand_analyses(["all"]) == list(ANALYSES)

    def test_order_and_duplicates(self):
        assert expand_analyses(["reachable", " projective ", "", "reachable"]) == [
            "validate",
            "projective",
            "reachable",
        ]

    def test_unknown(self):
        with pytest.raises(DocumentError) as excinfo:
            expand_analyses(["states", "guess"])
        assert excinfo.value.location == "analyses"
        with pytest.raises(DocumentError) as excinfo:
            expand_analyses(["guess"], location="--analyses")
        assert excinfo.value.location == "--analyses"


class TestCorpus:
    """Test the shipped documents."""

    def test_names(self):
        names = corpus_names()
        assert len(names) == 14
        assert {"weird", "classical_s2", "ks_presented", "delta_uniform"} <= set(names)

    @pytest.mark.parametrize("name", ["boolean_w2", "classical_s2", "delta_uniform", "random_functions_swap"])
    def test_corpus_fragments_are_lawful(self, name):
        doc = load_document(f"corpus:{name}")
        assert doc.name == name
        assert validate(build_fragment(doc)).ok

    def test_missing_corpus_document(self):
        with pytest.raises(DocumentError):
            read_document_text("corpus:nothing")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DocumentError):
            read_document_text(str(tmp_path / "absent.json"))

    def test_load_from_path(self, tmp_path):
        path = tmp_path / "doc.json"
        path.write_text(doc_text(name="local"), encoding="utf-8")
        assert load_document(str(path)).name == "local"


class TestBuildFragment:
    """Test family construction and generator closure."""

    def test_bound_override(self):
        doc = parse_document(doc_text(bound=3))
        assert build_fragment(doc).bound == 3
        assert build_fragment(doc, bound=2).bound == 2

    def test_bound_from_configuration(self):
        """A document without a bound is built at the configured default."""
        doc = parse_document(json.dumps({"family": {"kind": "classical", "states": 1}}))
        assert doc.bound is None
        assert build_fragment(doc).bound == 4
        assert build_fragment(doc, config=FragmentConfig(default_bound=2)).bound == 2
        assert validate(build_fragment(doc, config=FragmentConfig(default_bound=2))).ok

    def test_bound_precedence(self):
        config = FragmentConfig(default_bound=2)
        with_bound = parse_document(doc_text(bound=3))
        without = parse_document(json.dumps({"family": {"kind": "weird"}}))
        assert resolve_bound(with_bound, 1, config) == 1
        assert resolve_bound(with_bound, None, config) == 3
        assert resolve_bound(without, None, config) == 2
        assert resolve_bound(without) == 4

    def test_generators(self):
        doc = parse_document(doc_text(generators=[{"outcomes": 2, "payload": [0, 1]}]))
        frag = build_fragment(doc)
        assert not frag.complete
        assert len(frag.over(2)) == 4

    def test_bad_payload(self):
        doc = parse_document(doc_text(generators=[{"outcomes": 2, "payload": [0, 5]}]))
        with pytest.raises(DocumentError) as excinfo:
            build_fragment(doc)
        assert excinfo.value.location == "family"

    def test_effect_algebra(self):
        doc = load_document("corpus:effect_algebra_two")
        frag = build_fragment(doc, bound=2)
        assert validate(frag).ok

    def test_presented(self):
        text = json.dumps(
            {
                "family": {
                    "kind": "presented",
                    "generators": [{"id": "g", "outcomes": 2}],
                    "relations": [
                        {"left": {"generator": "g", "map": [0, 1]}, "right": {"generator": "g", "map": [1, 0]}}
                    ],
                },
                "bound": 2,
            }
        )
        frag = build_fragment(parse_document(text))
        # g is symmetric, so it sits next to the two point measurements
        assert len(frag.over(2)) == 3

    def test_measurement_of(self):
        doc = parse_document(doc_text(generators=[{"outcomes": 2, "payload": [0, 1]}]))
        frag = build_fragment(doc)
        spec = doc.generators[0]
        assert measurement_of(frag, spec).payload == (0, 1)
        with pytest.raises(DocumentError):
            measurement_of(frag, spec.model_copy(update={"outcomes": 3, "payload": [0, 1]}))

    def test_measurement_of_uncarried(self):
        doc = parse_document(doc_text(generators=[{"outcomes": 2, "payload": [0, 0]}]))
        frag = build_fragment(doc)
        spec = doc.generators[0].model_copy(update={"payload": [0, 1]})
        with pytest.raises(FragmentError):
            measurement_of(frag, spec)
