"""Tests for utility functions."""

from fractions import Fraction

import pytest

from gmt_lab.errors import PayloadError
from gmt_lab.utils import format_rational, format_rationals, format_table, parse_rational, truncate_items


class TestRationals:
    """Test exact rational parsing and formatting."""

    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("1/2", Fraction(1, 2)),
            ("2/4", Fraction(1, 2)),
            (" 3 / 7 ", Fraction(3, 7)),
            ("0", Fraction(0)),
            ("-1/3", Fraction(-1, 3)),
            (1, Fraction(1)),
            (Fraction(2, 3), Fraction(2, 3)),
        ],
    )
    def test_parse(self, raw, expected):
        assert parse_rational(raw) == expected

    @pytest.mark.parametrize("raw", [0.5, True, "1/0", "half", "1/2/3", None, [1, 2]])
    def test_parse_rejects(self, raw):
        """Floats and malformed strings never become payload numbers."""
        with pytest.raises(PayloadError):
            parse_rational(raw)

    def test_format(self):
        assert format_rational(Fraction(2, 4)) == "1/2"
        assert format_rational(Fraction(3)) == "3"
        assert format_rational(Fraction(0)) == "0"
        assert format_rationals([Fraction(1, 3), Fraction(2, 3)]) == ["1/3", "2/3"]

    def test_format_parse_agree(self):
        for value in (Fraction(5, 6), Fraction(-7, 2), Fraction(4)):
            assert parse_rational(format_rational(value)) == value


class TestTables:
    """Test compact function-table keys."""

    def test_format_table(self):
        assert format_table((0, 1, 1)) == "0.1.1"
        assert format_table(()) == "-"


class TestTruncation:
    """Test witness truncation."""

    def test_truncate_items(self):
        assert truncate_items([1, 2, 3], 5) == ([1, 2, 3], False)
        assert truncate_items([1, 2, 3], 2) == ([1, 2], True)
