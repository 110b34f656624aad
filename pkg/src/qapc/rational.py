"""Exact rational parsing shared by every file format."""
from __future__ import annotations

import re
from fractions import Fraction

_RATIONAL = re.compile(r"^[+-]?\d+(/[+-]?\d+)?$")


class FloatRejected(ValueError):
    pass


def parse_rational(value, allow_float: bool = False) -> Fraction:
    """Convert ``value`` to a Fraction without ever passing through a float.

    Accepts ints, Fractions and strings like ``"3"``, ``"-7/2"``. Decimal
    strings and Python floats are rejected unless ``allow_float`` is set, in
    which case the decimal text is read exactly (``"0.1"`` -> 1/10).
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not weights")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not allow_float:
            raise FloatRejected(
                f"float {value!r} is not exact; write it as a rational string such as \"3/4\""
            )
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if _RATIONAL.match(text):
            return Fraction(text)
        if allow_float:
            try:
                return Fraction(text)
            except ValueError:
                pass
        else:
            try:
                Fraction(text)
            except ValueError:
                pass
            else:
                raise FloatRejected(
                    f"{text!r} looks like a decimal; write it as a rational such as \"p/q\""
                    " (or pass --allow-float-as-rational)"
                )
        raise ValueError(f"cannot parse {text!r} as a rational")
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
