"""Exact rationals, dense polynomials and sequence-shape predicates."""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import zip_longest
from numbers import Rational as _RationalABC

Rational = Fraction


def to_rational(x) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to Fraction.

    Floats are rejected: silently converting binary floats would smuggle
    rounding error into code paths that are meant to be exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def rational_str(x: Fraction) -> str:
    x = to_rational(x)
    return f"{x.numerator}/{x.denominator}"


class Poly:
    """Dense univariate polynomial with exact rational coefficients.

    ``coeffs[i]`` is the coefficient of lambda**i.  Trailing zeros are
    stripped, so the zero polynomial has ``coeffs == ()`` and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [to_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls([0] * k + [c])

    @classmethod
    def binomial_power(cls, a, d: int) -> "Poly":
        """(lambda + a)**d."""
        p = cls([1])
        lin = cls([a, 1])
        for _ in range(d):
            p = p * lin
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def coefficient_list(self, length: int | None = None) -> list[Fraction]:
        n = len(self.coeffs) if length is None else length
        return [self[i] for i in range(n)]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        return Poly(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = to_rational(c)
        return Poly(c * a for a in self.coeffs)

    def shift(self, k: int) -> "Poly":
        """Multiply by lambda**k."""
        if k < 0:
            raise ValueError("shift must be non-negative")
        if not self.coeffs:
            return Poly()
        return Poly([0] * k + list(self.coeffs))

    def substitute_power(self, c: int) -> "Poly":
        """Return p(lambda**c)."""
        if c < 1:
            raise ValueError("c must be a positive integer")
        out = [Fraction(0)] * (c * max(self.degree, 0) + 1)
        for i, a in enumerate(self.coeffs):
            out[c * i] = a
        return Poly(out)

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def abs_coeffs(self) -> "Poly":
        return Poly(abs(a) for a in self.coeffs)

    def to_json(self) -> list[str]:
        return [rational_str(a) for a in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "Poly":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(to_rational(s) for s in data)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[i]
            if a == 0:
                continue
            mono = "" if i == 0 else ("λ" if i == 1 else f"λ^{i}")
            if mono and a == 1:
                terms.append(mono)
            elif mono and a == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{a}{mono}")
        return " + ".join(terms).replace("+ -", "- ")


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly([x])


def poly_arith(a: Poly, b: Poly | None, op: str, arg=None) -> Poly:
    """Functional front end: op in {"add", "mul", "scale", "shift"}."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(arg)
    if op in ("shift", "shift_by_power"):
        return a.shift(int(arg))
    raise ValueError(f"unknown polynomial operation {op!r}")


def substitute_power(p: Poly, c: int) -> Poly:
    return p.substitute_power(c)


def _check_nonneg(s):
    for i, x in enumerate(s):
        if x < 0:
            raise ValueError(f"negative entry {x} at index {i}")


def log_concavity_witness(s, slack: float = 0.0):
    """Smallest interior index i with s[i-1]*s[i+1] > s[i]**2, or None.

    Exact inputs are compared by cross-multiplication with no tolerance.
    ``slack`` is a relative allowance for float sequences only.
    """
    s = list(s)
    _check_nonneg(s)
    for i in range(1, len(s) - 1):
        lhs = s[i - 1] * s[i + 1]
        rhs = s[i] * s[i]
        if slack:
            if lhs > rhs + slack * max(abs(rhs), abs(lhs), 1.0):
                return i
        elif lhs > rhs:
            return i
    return None


def is_log_concave(s, slack: float = 0.0) -> bool:
    return log_concavity_witness(s, slack) is None


def is_unimodal(s) -> bool:
    s = list(s)
    i = 1
    while i < len(s) and s[i] >= s[i - 1]:
        i += 1
    while i < len(s) and s[i] <= s[i - 1]:
        i += 1
    return i >= len(s)
