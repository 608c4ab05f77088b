"""Shared pint registry and value formatting for reports."""
from fractions import Fraction

import pint

ureg = pint.get_application_registry()


def format_value(value, decimals: int = 0) -> str:
    """return value formatted with units

    Args:
        value: pint Quantity, Fraction, number, None or anything printable
        decimals (int): how many decimals to render (0 or more)

    Returns:
        string: formatted value ready to render; None renders as "undefined"
    """
    if value is None:
        return "undefined"
    if hasattr(value, "magnitude"):
        magnitude = value.magnitude
        if isinstance(magnitude, Fraction):
            value = float(magnitude) * value.units
        return f"{value:~P,.{decimals}f}"
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, (int, float)):
        return f"{value:,.{decimals}f}"
    return str(value)
