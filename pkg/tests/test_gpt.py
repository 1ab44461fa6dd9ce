"""Tests for the state polytope and the effect-tuple embedding."""

from fractions import Fraction

import pytest

from gmt_lab.config import DIMENSION_CAP_ENV, PolytopeConfig
from gmt_lab.document import build_fragment, corpus_names, load_document
from gmt_lab.errors import PolytopeTooLargeError, SeparationError
from gmt_lab.families import (
    ClassicalBackend,
    DeltaBackend,
    RandomFunctionsBackend,
    UnknownFunctionsBackend,
    WeirdBackend,
)
from gmt_lab.finset import obj
from gmt_lab.fragment import Measurement, close, full_fragment
from gmt_lab.gpt import Effect, build_state_polytope, check_separation, embed, extract_effects, profile, tr
from gmt_lab.oracles import brute_force_vertices
from gmt_lab.states import enumerate_deterministic_states, find_probabilistic_state, point_mass_lift

HALF = Fraction(1, 2)


def m(n, payload):
    return Measurement(obj(n), payload)


@pytest.fixture(scope="module")
def classical():
    return full_fragment(ClassicalBackend(2), 3)


@pytest.fixture(scope="module")
def classical_polytope(classical):
    return build_state_polytope(classical)


@pytest.fixture
def coin_flip():
    """A fair mixture of the two constant functions on one hidden state."""
    family = RandomFunctionsBackend(1)
    alpha = m(2, family.canonical([[[0], "1/2"], [[1], "1/2"]], 2))
    return close(family, [alpha], 2), alpha


class TestStatePolytope:
    """Test exact vertex enumeration of the probabilistic states."""

    def test_classical_vertices_are_point_masses(self, classical, classical_polytope):
        poly = classical_polytope
        assert poly.chart.dimension == 1
        assert len(poly.vertices) == 2
        lifted = [point_mass_lift(classical, s).assignment for s in enumerate_deterministic_states(classical)]
        found = [poly.state(v).assignment for v in poly.vertices]
        assert all(state in lifted for state in found)

    def test_agrees_with_brute_force(self, classical_polytope):
        assert classical_polytope.vertices == brute_force_vertices(classical_polytope.system)

    def test_unit_effect(self, classical_polytope):
        unit = tr(classical_polytope)
        assert all(unit(v) == 1 for v in classical_polytope.vertices)

    def test_effects_sum_to_unit(self, classical_polytope):
        alpha = m(3, (2, 0))
        effects = extract_effects(classical_polytope, alpha)
        assert len(effects) == 3
        for v in classical_polytope.vertices:
            assert sum(e(v) for e in effects) == 1

    def test_weird_is_empty(self):
        poly = build_state_polytope(full_fragment(WeirdBackend(), 3))
        assert poly.is_empty
        assert poly.chart is None
        assert poly.affine_points() == []

    def test_dimension_cap(self, classical):
        with pytest.raises(PolytopeTooLargeError):
            build_state_polytope(classical, PolytopeConfig(dimension_cap=0))

    def test_dimension_cap_from_environment(self, classical, monkeypatch):
        monkeypatch.setenv(DIMENSION_CAP_ENV, "0")
        with pytest.raises(PolytopeTooLargeError):
            build_state_polytope(classical)

    def test_single_state(self, coin_flip):
        frag, alpha = coin_flip
        poly = build_state_polytope(frag)
        assert len(poly.vertices) == 1
        assert poly.state(poly.vertices[0])[alpha] == (HALF, HALF)


class TestEmbedding:
    """Test separation and the effect-tuple embedding."""

    def test_classical_embeds(self, classical, classical_polytope):
        embedding = embed(classical, classical_polytope)
        # two vertices plus the base point and one direction of the affine hull
        assert embedding.checked_points == 4
        assert sorted(embedding.values(m(2, (0, 1)))) == [(0, 1), (1, 0)]

    def test_weird_is_not_separated(self):
        frag = full_fragment(WeirdBackend(), 3)
        poly = build_state_polytope(frag)
        report = check_separation(frag, poly)
        assert not report.separated
        assert report.witnesses == [(m(3, ()), m(3, (0, 1, 2)))]
        with pytest.raises(SeparationError) as excinfo:
            embed(frag, poly)
        assert excinfo.value.witness == (m(3, ()), m(3, (0, 1, 2)))

    def test_coin_flip_embeds(self, coin_flip):
        frag, alpha = coin_flip
        poly = build_state_polytope(frag)
        assert check_separation(frag, poly).separated
        embedding = embed(frag, poly)
        assert embedding.values(alpha) == ((HALF, HALF),)
        assert embedding.checked_points == 2

    def test_uniform_distribution_embeds(self):
        """Separated even though it is not projective."""
        frag = close(DeltaBackend(), [m(2, (HALF, HALF))], 2)
        poly = build_state_polytope(frag)
        embedding = embed(frag, poly)
        assert embedding.values(m(2, (HALF, HALF))) == ((HALF, HALF),)


class TestEffects:
    """Test evaluation effects of special measurements."""

    def test_tau_is_the_unit(self, classical, classical_polytope):
        assert extract_effects(classical_polytope, classical.tau) == [tr(classical_polytope)]

    def test_point_measurement(self, classical_polytope):
        # the point mass at outcome 1 of a two-outcome set
        assert profile(classical_polytope, m(2, (1, 1))) == ((0, 1), (0, 1))

    def test_unknown_functions_have_no_states(self):
        poly = build_state_polytope(full_fragment(UnknownFunctionsBackend(1), 3))
        assert poly.is_empty

    def test_sum_of_effects(self):
        total = Effect.axis(0) + Effect.axis(2) + Effect.axis(0)
        assert total((Fraction(1, 3), 5, Fraction(1, 4))) == Fraction(11, 12)
        assert Effect.axis(1) + Effect(((1, Fraction(-1)),)) == Effect.zero()
        assert Effect.zero()((1, 2)) == 0


@pytest.mark.parametrize(
    "name",
    [
        pytest.param(n, marks=pytest.mark.slow) if n in {"ks_presented", "unknown_functions_s2"} else n
        for n in corpus_names()
    ],
)
def test_polytope_agrees_with_solver(name):
    """The vertex enumeration is empty exactly when the solver finds no probabilistic state."""
    frag = build_fragment(load_document(f"corpus:{name}"))
    try:
        poly = build_state_polytope(frag)
    except PolytopeTooLargeError:
        pytest.skip("affine hull above the dimension cap")
    outcome = find_probabilistic_state(frag)
    assert poly.is_empty == (not outcome.feasible)
    if outcome.feasible:
        assert all(0 <= v for vertex in poly.vertices for v in vertex)
