"""Exponent-vector monomials over x_0..x_N.

A :class:`Monomial` is a tuple of nonnegative exponents; index ``i`` holds the
degree of ``x_i``.  Widths are fixed per instance, so two monomials only
compare equal when they live over the same variable range.
"""

from __future__ import annotations

import re
from typing import Iterable

__all__ = ["Monomial", "MonomialParseError", "parse_monomial", "format_monomial"]


class MonomialParseError(ValueError):
    pass


class Monomial(tuple):
    """Fixed-width exponent vector.  ``Monomial([0, 3, 0, 1])`` is x1^3*x3."""

    __slots__ = ()

    def __new__(cls, exponents: Iterable[int] = ()):
        exps = tuple(int(e) for e in exponents)
        for e in exps:
            if e < 0:
                raise ValueError(f"negative exponent in {exps}")
        return super().__new__(cls, exps)

    @classmethod
    def unit(cls, width: int) -> "Monomial":
        return cls((0,) * width)

    @classmethod
    def var(cls, i: int, width: int, power: int = 1) -> "Monomial":
        exps = [0] * width
        exps[i] = power
        return cls(exps)

    @property
    def width(self) -> int:
        return len(self)

    @property
    def degree(self) -> int:
        return sum(self)

    def d(self, i: int) -> int:
        """Degree of x_i (zero past the stored width)."""
        return self[i] if i < len(self) else 0

    def _check_width(self, other: "Monomial") -> None:
        if len(self) != len(other):
            raise ValueError(f"width mismatch: {len(self)} vs {len(other)}")

    def __mul__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        self._check_width(other)
        return Monomial(a + b for a, b in zip(self, other))

    def __truediv__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        self._check_width(other)
        return Monomial(a - b for a, b in zip(self, other))

    def __pow__(self, k: int) -> "Monomial":
        return Monomial(a * k for a in self)

    def divides(self, other: "Monomial") -> bool:
        self._check_width(other)
        return all(a <= b for a, b in zip(self, other))

    def is_squarefree(self) -> bool:
        return all(a <= 1 for a in self)

    def shift(self, i: int, j: int) -> "Monomial":
        """Return (x_j / x_i) * self; raises if x_i does not divide."""
        if self[i] == 0:
            raise ValueError(f"x{i} does not divide {self}")
        exps = list(self)
        exps[i] -= 1
        exps[j] += 1
        return Monomial(exps)

    def padded(self, width: int) -> "Monomial":
        if width < len(self):
            if any(self[width:]):
                raise ValueError(f"{self} does not fit in {width} variables")
            return Monomial(self[:width])
        return Monomial(tuple(self) + (0,) * (width - len(self)))

    def __str__(self) -> str:
        return format_monomial(self)

    def __repr__(self) -> str:
        return f"Monomial({format_monomial(self)!r})"


def format_monomial(m: Iterable[int]) -> str:
    terms = []
    for i, e in enumerate(m):
        if e == 1:
            terms.append(f"x{i}")
        elif e > 1:
            terms.append(f"x{i}^{e}")
    return "*".join(terms) if terms else "1"


_TERM = re.compile(r"x(\d+)(?:\^(\d+))?$")


def parse_monomial(text: str, width: int | None = None) -> Monomial:
    """Parse ``x1^3*x3``, ``1`` or the vector form ``[0,3,0,1]``.

    ``width`` pads (or checks) the result to a fixed variable range.
    """
    s = text.strip()
    if not s:
        raise MonomialParseError("empty monomial")
    if s.startswith("["):
        if not s.endswith("]"):
            raise MonomialParseError(f"unterminated vector form: {text!r}")
        body = s[1:-1].strip()
        try:
            exps = [int(tok) for tok in body.split(",")] if body else []
        except ValueError:
            raise MonomialParseError(f"bad vector form: {text!r}") from None
        if any(e < 0 for e in exps):
            raise MonomialParseError(f"negative exponent in {text!r}")
    elif s == "1":
        exps = []
    else:
        counts: dict[int, int] = {}
        for tok in s.split("*"):
            match = _TERM.match(tok.strip())
            if match is None:
                raise MonomialParseError(f"bad term {tok.strip()!r} in {text!r}")
            idx = int(match.group(1))
            counts[idx] = counts.get(idx, 0) + int(match.group(2) or 1)
        exps = [0] * (max(counts) + 1)
        for idx, e in counts.items():
            exps[idx] += e
    m = Monomial(exps)
    if width is not None:
        try:
            m = m.padded(width)
        except ValueError as exc:
            raise MonomialParseError(str(exc)) from None
    return m
