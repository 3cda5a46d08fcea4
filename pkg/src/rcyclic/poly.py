"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a sorted tuple of ``(symbol, exponent)`` pairs; the empty
tuple is the constant monomial. Zero coefficients are never stored, so two
polynomials are equal exactly when their term dictionaries are.

Polys mix freely with ``int`` and ``Fraction`` operands, which lets the
cumulant engines run unchanged on symbolic and on plain rational inputs.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Mapping, Union

Monomial = tuple[tuple[str, int], ...]
Scalar = Union[int, Fraction]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for s, e in b:
        acc[s] = acc.get(s, 0) + e
    return tuple(sorted(acc.items()))


class Poly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c != 0:
                    clean[tuple(sorted(m))] = Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def symbol(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1})

    @classmethod
    def const(cls, value: Scalar) -> "Poly":
        return cls({(): value})

    @staticmethod
    def lift(value) -> "Poly":
        if isinstance(value, Poly):
            return value
        if isinstance(value, (int, Rational)):
            return Poly.const(value)
        raise TypeError(f"cannot lift {type(value).__name__} to Poly")

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Poly):
            if not other.terms:
                return self
            out = dict(self.terms)
            for m, c in other.terms.items():
                v = out.get(m, 0) + c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
            return _raw(out)
        if isinstance(other, (int, Rational)):
            if other == 0:
                return self
            out = dict(self.terms)
            v = out.get((), 0) + other
            if v:
                out[()] = Fraction(v)
            else:
                out.pop((), None)
            return _raw(out)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return _raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (Poly, int, Rational)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            if not self.terms or not other.terms:
                return _raw({})
            out: dict[Monomial, Fraction] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = _mono_mul(m1, m2)
                    v = out.get(m, 0) + c1 * c2
                    if v:
                        out[m] = v
                    else:
                        out.pop(m, None)
            return _raw(out)
        if isinstance(other, (int, Rational)):
            if other == 0:
                return _raw({})
            if other == 1:
                return self
            return _raw({m: c * other for m, c in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Poly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison / hashing ------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Rational)):
            if other == 0:
                return not self.terms
            return self.terms == {(): other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if not self.terms:
                self._hash = hash(0)
            elif set(self.terms) == {()}:
                self._hash = hash(self.terms[()])
            else:
                self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- inspection -------------------------------------------------------

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {()}

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), Fraction(0))

    def symbols(self) -> set[str]:
        return {s for m in self.terms for s, _ in m}

    def evaluate(self, **values):
        """Substitute numbers (or Polys) for symbols."""
        total = 0
        for m, c in self.terms.items():
            term = c
            for s, e in m:
                if s in values:
                    term = term * values[s] ** e
                else:
                    term = term * Poly({((s, e),): 1})
            total = total + term
        return total

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m in sorted(self.terms, key=lambda m: (-sum(e for _, e in m), m)):
            c = self.terms[m]
            mono = "*".join(s if e == 1 else f"{s}^{e}" for s, e in m)
            if not mono:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(mono)
            elif c == -1:
                pieces.append(f"-{mono}")
            else:
                pieces.append(f"{c}*{mono}")
        return " + ".join(pieces).replace("+ -", "- ")

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict[str, str]:
        """``{"c^2*x": "3/2", "1": "1/1"}``; the key ``"1"`` is the constant monomial."""
        out = {}
        for m, c in sorted(self.terms.items()):
            key = "*".join(s if e == 1 else f"{s}^{e}" for s, e in m) or "1"
            out[key] = f"{c.numerator}/{c.denominator}"
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "Poly":
        terms: dict[Monomial, Fraction] = {}
        for key, val in data.items():
            mono: dict[str, int] = {}
            if key != "1":
                for factor in key.split("*"):
                    s, _, e = factor.partition("^")
                    mono[s] = mono.get(s, 0) + (int(e) if e else 1)
            terms[tuple(sorted(mono.items()))] = Fraction(val)
        return cls(terms)


def _raw(terms: dict[Monomial, Fraction]) -> Poly:
    p = Poly.__new__(Poly)
    p.terms = terms
    p._hash = None
    return p


def as_exact(value):
    """Collapse constant Polys to Fractions; leave everything else alone."""
    if isinstance(value, Poly) and value.is_constant():
        return value.constant_value()
    return value
