"""Tests for exact values in report schemas."""

import pytest
from sympy import Rational

from src.schemas.common import format_rational, parse_matrix, parse_rational


class TestParseRational:
    """Tests for reading "p/q" strings."""

    @pytest.mark.parametrize(
        "value,expected",
        [("3", Rational(3)), ("-2/4", Rational(-1, 2)), (" 7/3 ", Rational(7, 3)), (5, Rational(5))],
    )
    def test_accepts(self, value, expected):
        """Test integers and fractions parse to reduced rationals."""
        assert parse_rational(value) == expected

    @pytest.mark.parametrize("value", ["1/0", "1/2/3", "--1", "+", "", "1.5", "x", True, 0.5])
    def test_rejects_with_value_error(self, value):
        """Test every malformed value raises ValueError and nothing else."""
        with pytest.raises(ValueError):
            parse_rational(value)

    def test_format(self):
        """Test rationals print as "p/q" or "p"."""
        assert format_rational(Rational(6, 4)) == "3/2"
        assert format_rational(Rational(-4, 2)) == "-2"

    def test_matrix_with_zero_denominator(self):
        """Test a matrix entry "1/0" is a ValueError."""
        with pytest.raises(ValueError):
            parse_matrix([["1/0", 0], [0, 1]])
