"""Tests for deterministic, probabilistic and possibilistic states."""

from fractions import Fraction

import pytest

from gmt_lab.config import SolverConfig
from gmt_lab.families import (
    ClassicalBackend,
    DeltaBackend,
    RandomFunctionsBackend,
    UnknownFunctionsBackend,
    WeirdBackend,
)
from gmt_lab.finset import obj
from gmt_lab.fragment import Measurement, close, full_fragment
from gmt_lab.linear import dump_certificate, find_feasible_point, load_certificate
from gmt_lab.states import (
    DeterministicState,
    PossibilisticState,
    ProbabilisticState,
    build_probabilistic_system,
    check_deterministic,
    check_possibilistic,
    check_probabilistic,
    enumerate_deterministic_states,
    enumerate_possibilistic_states,
    find_probabilistic_state,
    point_mass_lift,
    seed_measurements,
    variable_key,
    verify_certificate,
)


def m(n, payload):
    return Measurement(obj(n), payload)


@pytest.fixture
def classical():
    return full_fragment(ClassicalBackend(2), 3)


@pytest.fixture
def weird():
    return full_fragment(WeirdBackend(), 3)


class TestDeterministicStates:
    """Test natural outcome assignments."""

    def test_classical_has_evaluation_states(self, classical):
        states = enumerate_deterministic_states(classical)
        assert len(states) == 2
        assert {s[m(2, (0, 1))] for s in states} == {0, 1}
        for s in states:
            # each state evaluates at one hidden state
            k = s[m(2, (0, 1))]
            assert all(s[alpha] == alpha.payload[k] for alpha in classical.measurements())
            assert check_deterministic(classical, s) == []

    def test_weird_has_none(self, weird):
        assert enumerate_deterministic_states(weird) == []

    def test_limit(self, classical):
        assert len(enumerate_deterministic_states(classical, limit=1)) == 1

    def test_check_reports_violations(self, classical):
        state = enumerate_deterministic_states(classical)[0]
        outcomes = list(state.outcomes)
        k = state.measurements.index(m(2, (0, 1)))
        outcomes[k] = 1 - outcomes[k]
        broken = DeterministicState(state.measurements, outcomes)
        assert check_deterministic(classical, broken)

    def test_states_are_ordered_and_hashable(self, classical):
        states = enumerate_deterministic_states(classical)
        assert len(set(states)) == 2
        assert sorted(states)[0] < sorted(states)[1]

    def test_point_mass_lift(self, classical):
        for state in enumerate_deterministic_states(classical):
            lifted = point_mass_lift(classical, state)
            assert check_probabilistic(classical, lifted) == []
            assert lifted[m(3, (2, 0))][state[m(3, (2, 0))]] == 1


class TestProbabilisticStates:
    """Test the exact solver for probabilistic states and its certificates."""

    def test_classical_state(self, classical):
        outcome = find_probabilistic_state(classical)
        assert outcome.feasible
        assert outcome.certificate is None
        assert check_probabilistic(classical, outcome.state) == []
        assert outcome.stats["variables"] == 36

    def test_delta_state(self):
        frag = close(DeltaBackend(), [m(2, (Fraction(1, 2), Fraction(1, 2)))], 2)
        outcome = find_probabilistic_state(frag)
        assert outcome.feasible
        assert outcome.state[m(2, (Fraction(1, 2), Fraction(1, 2)))] == (Fraction(1, 2), Fraction(1, 2))

    def test_weird_certificate(self, weird):
        """The empty-outcome measurement cannot carry a distribution."""
        outcome = find_probabilistic_state(weird)
        assert not outcome.feasible
        assert verify_certificate(weird, outcome.certificate)

    def test_weird_system_is_inconsistent(self, weird):
        system = build_probabilistic_system(weird)
        assert not find_feasible_point(system).feasible
        assert any(row.key == f"norm:m{weird.index(m(0, ()))}" and not row.coeffs for row in system.rows)

    def test_unknown_functions_certificate(self):
        frag = full_fragment(UnknownFunctionsBackend(1), 3)
        outcome = find_probabilistic_state(frag)
        assert not outcome.feasible
        assert verify_certificate(frag, outcome.certificate)

    @pytest.mark.slow
    def test_unknown_functions_seed_certificate(self):
        """The set of all maps into three outcomes is fully symmetric; its sub-fragment is already infeasible."""
        frag = full_fragment(UnknownFunctionsBackend(2), 3)
        outcome = find_probabilistic_state(frag)
        assert not outcome.feasible
        assert outcome.seed is not None
        assert outcome.seed.arity == 3
        assert verify_certificate(frag, outcome.certificate)

    def test_without_seeds_the_full_system_decides(self):
        frag = full_fragment(UnknownFunctionsBackend(1), 3)
        outcome = find_probabilistic_state(frag, SolverConfig(seed_limit=0))
        assert not outcome.feasible
        assert outcome.seed is None
        assert verify_certificate(frag, outcome.certificate)

    def test_certificate_survives_text_form(self, weird):
        outcome = find_probabilistic_state(weird)
        text = dump_certificate(outcome.certificate, outcome.system)
        assert verify_certificate(weird, load_certificate(text, build_probabilistic_system(weird)))

    def test_seeds_prefer_symmetric_measurements(self, weird):
        seeds = seed_measurements(weird, 8)
        assert seeds == [m(3, ()), m(3, (0, 1, 2)), m(2, ())]

    def test_variable_keys(self, classical):
        system = build_probabilistic_system(classical)
        assert system.variable_keys[0] == variable_key(classical, classical.measurements()[0], 0)
        assert len(system.variable_keys) == sum(alpha.arity for alpha in classical.measurements())

    def test_check_probabilistic_rejects(self, classical):
        assignment = {
            alpha: (Fraction(1),) + (Fraction(0),) * (alpha.arity - 1) for alpha in classical.measurements()
        }
        assert check_probabilistic(classical, ProbabilisticState(assignment))


class TestPossibilisticStates:
    """Test image-natural subset assignments."""

    def test_unknown_functions(self):
        frag = full_fragment(UnknownFunctionsBackend(1), 3)
        states = enumerate_possibilistic_states(frag)
        assert states
        # the state reading each measurement as its own set of possible outcomes
        own = PossibilisticState(
            frag.measurements(), [tuple(v for (v,) in alpha.payload) for alpha in frag.measurements()]
        )
        assert own in states
        assert not any(s.is_singleton() for s in states)
        assert enumerate_deterministic_states(frag) == []
        for s in states:
            assert check_possibilistic(frag, s) == []

    def test_classical_singletons_are_deterministic(self, classical):
        states = enumerate_possibilistic_states(classical)
        singletons = [s for s in states if s.is_singleton()]
        assert len(singletons) == len(enumerate_deterministic_states(classical)) == 2

    def test_weird_has_none(self, weird):
        assert enumerate_possibilistic_states(weird) == []


class TestRandomFunctions:
    """A fair mixture of the two constant functions on one hidden state."""

    @pytest.fixture
    def coin_flip(self):
        family = RandomFunctionsBackend(1)
        alpha = m(2, family.canonical([[[0], "1/2"], [[1], "1/2"]], 2))
        return close(family, [alpha], 2), alpha

    def test_no_deterministic_state(self, coin_flip):
        frag, _ = coin_flip
        assert enumerate_deterministic_states(frag) == []

    def test_possibilistic_state(self, coin_flip):
        """Swap symmetry leaves both outcomes possible."""
        frag, alpha = coin_flip
        states = enumerate_possibilistic_states(frag)
        assert len(states) == 1
        assert states[0][alpha] == (0, 1)

    def test_probabilistic_state(self, coin_flip):
        frag, alpha = coin_flip
        outcome = find_probabilistic_state(frag)
        assert outcome.state[alpha] == (Fraction(1, 2), Fraction(1, 2))


def test_three_hidden_states():
    assert len(enumerate_deterministic_states(full_fragment(ClassicalBackend(3), 3))) == 3
