"""Tests for the JSON forms of witnesses."""

from fractions import Fraction

from gmt_lab.families import (
    ClassicalBackend,
    DeltaBackend,
    WeirdBackend,
    chain_effect_algebra,
    make_effect_algebra,
)
from gmt_lab.finset import FinFun, obj
from gmt_lab.fragment import Measurement
from gmt_lab.presented import Generator, PresentedBackend
from gmt_lab.report import measurement_json, to_json


class TestWitnessJson:
    """Witness measurements carry their effects where the family has an effect view."""

    def test_classical_effects_are_state_sets(self):
        alpha = Measurement(obj(3), (2, 0))
        assert to_json(alpha, ClassicalBackend(2)) == {"outcomes": 3, "payload": [2, 0], "effects": [[1], [], [0]]}

    def test_effect_algebra_effects_are_named(self):
        family = make_effect_algebra(*chain_effect_algebra(2))
        assert to_json(Measurement(obj(2), (1, 1)), family)["effects"] == ["1/2", "1/2"]

    def test_distribution_effects(self):
        alpha = Measurement(obj(2), (Fraction(1, 3), Fraction(2, 3)))
        assert to_json(alpha, DeltaBackend())["effects"] == ["1/3", "2/3"]

    def test_family_without_effects(self):
        assert to_json(Measurement(obj(3), (0, 1, 2)), WeirdBackend()) == {"outcomes": 3, "payload": [0, 1, 2]}

    def test_plain_measurement_has_no_effects(self):
        assert measurement_json(ClassicalBackend(2), Measurement(obj(2), (0, 1))) == {"outcomes": 2, "payload": [0, 1]}

    def test_labels(self):
        family = PresentedBackend([Generator("spin", 2, ("up", "down"))], [], 2)
        data = measurement_json(family, family.generator_measurement("spin"))
        assert data["labels"] == ["up", "down"]

    def test_nested_values(self):
        value = {"pair": (FinFun.of((1, 0), 2), Fraction(1, 2)), "flag": True}
        assert to_json(value, ClassicalBackend(1)) == {"pair": [{"map": [1, 0], "cod": 2}, "1/2"], "flag": True}
