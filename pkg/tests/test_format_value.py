from fractions import Fraction

from util.units import format_value, ureg


def test_float_rounding():

    assert format_value(123.4567, 2) == "123.46"
    assert format_value(123.4567, 0) == "123"
    assert format_value(-987.654, 1) == "-987.7"


def test_int():
    assert format_value(75, 0) == "75"
    assert format_value(75, 2) == "75.00"


def test_fraction():
    assert format_value(Fraction(73, 75), 4) == "0.9733"
    assert format_value(Fraction(24735, 200), 3) == "123.675"


def test_pint_quantity_with_unit():
    val = 9 * ureg.hour
    assert format_value(val, 1) == "9.0 h"
    val = 123675 * ureg.byte
    assert format_value(val, 0) == "123,675 B"


def test_large_number_thousands_separator():
    assert format_value(3600000.5, 1) == "3,600,000.5"


def test_undefined():
    assert format_value(None) == "undefined"
    assert format_value(None, 3) == "undefined"


def test_text_format():
    assert format_value("Bradycardia") == "Bradycardia"
