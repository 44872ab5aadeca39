"""Scalar helpers shared by every module.

A scalar is either an exact :class:`fractions.Fraction` or a ``float``.
Integers and ``"p/q"`` strings are promoted to fractions; floats are kept as
they are and flag the value as inexact.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Union

Scalar = Union[Fraction, float]

# endpoints closer than this are identified in double mode
FLOAT_MERGE_TOL = 1e-12


def to_scalar(value) -> Scalar:
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite coordinate {value!r}")
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except ValueError:
            return to_scalar(float(text))
    # numpy scalars and friends
    if hasattr(value, "dtype"):
        kind = value.dtype.kind
        if kind in "iu":
            return Fraction(int(value))
        if kind == "f":
            return to_scalar(float(value))
    raise TypeError(f"cannot interpret {value!r} as a scalar")


def is_exact(value) -> bool:
    return isinstance(value, (Fraction, int)) and not isinstance(value, bool)


def fmt_scalar(value: Scalar):
    """JSON form: rationals as ``"p/q"`` strings, floats as numbers."""
    if isinstance(value, float):
        return value
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_scalar(value) -> Scalar:
    return to_scalar(value)


def convergents(x: float) -> Iterator[Fraction]:
    """Continued-fraction convergents of ``x`` (finite for floats)."""
    frac = Fraction(x)
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while True:
        a = math.floor(frac)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)
        rest = frac - a
        if rest == 0:
            return
        frac = 1 / rest


def simplest_within(x: float, tol: float, max_den: int) -> Fraction:
    """First convergent of ``x`` within ``tol``, capped at denominator ``max_den``.

    Falls back to the best approximation with the capped denominator.
    """
    best = None
    for c in convergents(x):
        if c.denominator > max_den:
            break
        best = c
        if abs(float(c) - x) <= tol:
            return c
    if best is None:
        return Fraction(round(x))
    return Fraction(x).limit_denominator(max_den)
