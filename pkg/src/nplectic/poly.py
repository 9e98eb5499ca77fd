"""Exact multivariate polynomials over the rationals.

A :class:`Polynomial` lives in a fixed ambient dimension ``d`` and maps dense
exponent tuples of length ``d`` to nonzero :class:`fractions.Fraction`
coefficients.  Instances are immutable and hashable.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Scalar = Union[int, Fraction]


class DimensionError(ValueError):
    """Operands live in different ambient dimensions."""


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"inexact coefficient {c!r}; use int or Fraction")


class Polynomial:
    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[tuple[int, ...], Scalar] | None = None):
        self.dim = dim
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for mono, c in terms.items():
                if len(mono) != dim:
                    raise DimensionError(f"monomial {mono} in dimension {dim}")
                c = _as_fraction(c)
                if c:
                    clean[tuple(mono)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: dict) -> "Polynomial":
        # trusted constructor: terms already canonical
        p = cls.__new__(cls)
        p.dim = dim
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, c: Scalar) -> "Polynomial":
        c = _as_fraction(c)
        return cls._raw(dim, {(0,) * dim: c} if c else {})

    @classmethod
    def one(cls, dim: int) -> "Polynomial":
        return cls.constant(dim, 1)

    @classmethod
    def var(cls, dim: int, i: int) -> "Polynomial":
        """The coordinate function ``x_i`` (1-based)."""
        if not 1 <= i <= dim:
            raise IndexError(f"coordinate x{i} out of range 1..{dim}")
        mono = [0] * dim
        mono[i - 1] = 1
        return cls._raw(dim, {tuple(mono): Fraction(1)})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.dim, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def evaluate(self, point: Iterable[Scalar]) -> Fraction:
        point = [_as_fraction(v) for v in point]
        if len(point) != self.dim:
            raise DimensionError(f"point of length {len(point)} in dimension {self.dim}")
        total = Fraction(0)
        for mono, c in self.terms.items():
            val = c
            for x, e in zip(point, mono):
                if e:
                    val *= x ** e
            total += val
        return total

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimension {self.dim} vs {other.dim}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Polynomial._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.dim, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def scale(self, c: Scalar) -> "Polynomial":
        c = _as_fraction(c)
        if not c:
            return Polynomial.zero(self.dim)
        if c == 1:
            return self
        return Polynomial._raw(self.dim, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Polynomial.zero(self.dim)
        out: dict[tuple[int, ...], Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = out.get(m)
                out[m] = c1 * c2 if v is None else v + c1 * c2
        return Polynomial._raw(self.dim, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.one(self.dim)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def partial(self, i: int) -> "Polynomial":
        """Formal derivative with respect to ``x_i`` (1-based)."""
        if not 1 <= i <= self.dim:
            raise IndexError(f"coordinate x{i} out of range 1..{self.dim}")
        k = i - 1
        out = {}
        for m, c in self.terms.items():
            e = m[k]
            if e:
                out[m[:k] + (e - 1,) + m[k + 1:]] = c * e
        return Polynomial._raw(self.dim, out)

    # -- identity ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.dim, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({self.dim}, {str(self)!r})"

    def __str__(self) -> str:
        return render_polynomial(self)


def _grlex_key(mono: tuple[int, ...]):
    # graded lex, highest first: sort ascending on the negated key
    return (-sum(mono), tuple(-e for e in mono))


def _render_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_monomial(mono: tuple[int, ...]) -> str:
    parts = []
    for i, e in enumerate(mono, start=1):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts)


def render_polynomial(p: Polynomial) -> str:
    """Canonical text, terms in graded-lex order, e.g. ``x1^2*x3 - x4``."""
    if not p.terms:
        return "0"
    out = []
    for mono in sorted(p.terms, key=_grlex_key):
        c = p.terms[mono]
        neg = c < 0
        mag = -c if neg else c
        body = render_monomial(mono)
        if not body:
            text = _render_coeff(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{_render_coeff(mag)}*{body}"
        if not out:
            out.append(f"-{text}" if neg else text)
        else:
            out.append(f"- {text}" if neg else f"+ {text}")
    return " ".join(out)
