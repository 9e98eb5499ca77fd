"""Differential forms and multivector fields with polynomial coefficients.

Both kinds are sparse maps from strictly increasing index tuples to
:class:`~nplectic.poly.Polynomial` coefficients.  ``dx^I`` and ``@_I`` (the
wedge of coordinate vector fields ``d/dx_i``) are the basis elements.

Conventions (these are the ones under which the Cartan-type identities
exercised in the test-suite hold):

* contraction by a decomposable field is repeated contraction, first factor
  first: ``i_{X1^...^Xr} a = i_{Xr} ... i_{X1} a``; in coordinates
  ``i_{@J} dx^J^dx^K = dx^K``;
* ``L_X a = d i_X a - (-1)^r i_X d a`` for ``X`` of tensor degree ``r``;
* the Schouten bracket restricts to the Lie bracket ``[X, Y] = XY - YX`` on
  vector fields and obeys ``[X, Y^Z] = [X, Y]^Z + (-1)^((|X|-1)|Y|) Y^[X, Z]``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, TypeVar, Union

from .poly import DimensionError, Polynomial, Scalar

Index = tuple[int, ...]
T = TypeVar("T", bound="_Tensor")


class KindError(TypeError):
    """A form was used where a multivector field was expected, or vice versa."""


@lru_cache(maxsize=None)
def merge_sign(a: Index, b: Index) -> int:
    """Sign of the permutation sorting ``a + b``; 0 if they share an index."""
    if set(a) & set(b):
        return 0
    inv = sum(1 for x in a for y in b if x > y)
    return -1 if inv % 2 else 1


@lru_cache(maxsize=None)
def _merge(a: Index, b: Index) -> tuple[int, Index]:
    s = merge_sign(a, b)
    return s, (tuple(sorted(a + b)) if s else ())


@lru_cache(maxsize=None)
def _contract_index(j: Index, i: Index) -> tuple[int, Index]:
    """``i_{@J} dx^I = sign * dx^rest``; sign 0 when ``J`` is not inside ``I``."""
    if not set(j) <= set(i):
        return 0, ()
    rest = tuple(x for x in i if x not in j)
    return merge_sign(j, rest), rest


@lru_cache(maxsize=None)
def _right_drop(j: Index, i: int) -> tuple[int, Index]:
    # theta_J differentiated from the right by theta_i
    after = sum(1 for x in j if x > i)
    return (-1 if after % 2 else 1), tuple(x for x in j if x != i)


@lru_cache(maxsize=None)
def _left_drop(k: Index, i: int) -> tuple[int, Index]:
    before = sum(1 for x in k if x < i)
    return (-1 if before % 2 else 1), tuple(x for x in k if x != i)


def _add_into(acc: dict, key: Index, value: Polynomial) -> None:
    cur = acc.get(key)
    acc[key] = value if cur is None else cur + value


class _Tensor:
    """Shared machinery for forms and multivector fields."""

    __slots__ = ("dim", "comps", "_hash")
    prefix = "?"

    def __init__(self, dim: int, comps: Mapping[Iterable[int], Polynomial] | None = None):
        self.dim = dim
        clean: dict[Index, Polynomial] = {}
        for idx, coeff in (comps or {}).items():
            idx = tuple(idx)
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing")
            if idx and not (1 <= idx[0] and idx[-1] <= dim):
                raise IndexError(f"index tuple {idx} out of range 1..{dim}")
            if not isinstance(coeff, Polynomial):
                coeff = Polynomial.constant(dim, coeff)
            elif coeff.dim != dim:
                raise DimensionError(f"coefficient in dimension {coeff.dim}, expected {dim}")
            if coeff:
                _add_into(clean, idx, coeff)
        self.comps = {k: v for k, v in clean.items() if v}
        self._hash = None

    @classmethod
    def _raw(cls: type[T], dim: int, comps: dict) -> T:
        obj = cls.__new__(cls)
        obj.dim = dim
        obj.comps = {k: v for k, v in comps.items() if v}
        obj._hash = None
        return obj

    @classmethod
    def zero(cls: type[T], dim: int) -> T:
        return cls._raw(dim, {})

    @classmethod
    def basis(cls: type[T], dim: int, *indices: int) -> T:
        """A single wedge of basis elements in the given order (sign applied)."""
        out = cls._raw(dim, {(): Polynomial.one(dim)})
        for i in indices:
            if not 1 <= i <= dim:
                raise IndexError(f"index {i} out of range 1..{dim}")
            out = out.wedge(cls._raw(dim, {(i,): Polynomial.one(dim)}))
        return out

    @classmethod
    def function(cls: type[T], p: Polynomial) -> T:
        return cls._raw(p.dim, {(): p})

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.comps

    def __bool__(self) -> bool:
        return bool(self.comps)

    def degrees(self) -> set[int]:
        return {len(k) for k in self.comps}

    def tensor_degree(self) -> int | None:
        """Common length of all index tuples; ``None`` if mixed or zero."""
        degs = self.degrees()
        return degs.pop() if len(degs) == 1 else None

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def homogeneous_parts(self: T) -> dict[int, T]:
        parts: dict[int, dict] = {}
        for k, v in self.comps.items():
            parts.setdefault(len(k), {})[k] = v
        return {r: type(self)._raw(self.dim, c) for r, c in sorted(parts.items())}

    def part(self: T, r: int) -> T:
        return type(self)._raw(self.dim, {k: v for k, v in self.comps.items() if len(k) == r})

    def coefficient(self, idx: Iterable[int]) -> Polynomial:
        return self.comps.get(tuple(idx), Polynomial.zero(self.dim))

    def is_constant(self) -> bool:
        return all(v.is_constant() for v in self.comps.values())

    def __iter__(self) -> Iterator[tuple[Index, Polynomial]]:
        return iter(sorted(self.comps.items(), key=lambda kv: (len(kv[0]), kv[0])))

    # -- linear structure ------------------------------------------------------

    def _same(self, other) -> None:
        if type(other) is not type(self):
            raise KindError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"dimension {self.dim} vs {other.dim}")

    def __add__(self: T, other: T) -> T:
        self._same(other)
        out = dict(self.comps)
        for k, v in other.comps.items():
            _add_into(out, k, v)
        return type(self)._raw(self.dim, out)

    def __neg__(self: T) -> T:
        return type(self)._raw(self.dim, {k: -v for k, v in self.comps.items()})

    def __sub__(self: T, other: T) -> T:
        return self + (-other)

    def scale(self: T, c: Union[Scalar, Polynomial]) -> T:
        if isinstance(c, Polynomial):
            if c.dim != self.dim:
                raise DimensionError(f"dimension {self.dim} vs {c.dim}")
            return type(self)._raw(self.dim, {k: v * c for k, v in self.comps.items()})
        c = Fraction(c)
        if c == 1:
            return self
        return type(self)._raw(self.dim, {k: v.scale(c) for k, v in self.comps.items()})

    def __mul__(self: T, c) -> T:
        if isinstance(c, (int, Fraction, Polynomial)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def wedge(self: T, other: T) -> T:
        self._same(other)
        out: dict[Index, Polynomial] = {}
        for a, pa in self.comps.items():
            for b, pb in other.comps.items():
                s, idx = _merge(a, b)
                if s:
                    term = pa * pb
                    _add_into(out, idx, term if s > 0 else -term)
        return type(self)._raw(self.dim, out)

    def __xor__(self: T, other: T) -> T:
        return self.wedge(other)

    def map_coefficients(self: T, fn) -> T:
        return type(self)._raw(self.dim, {k: fn(v) for k, v in self.comps.items()})

    # -- identity ----------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.dim == other.dim and self.comps == other.comps

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.dim, frozenset(self.comps.items())))
        return self._hash

    def __str__(self) -> str:
        return render_tensor(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.dim}, {str(self)!r})"

    def basis_name(self, idx: Index) -> str:
        return "^".join(f"{self.prefix}{i}" for i in idx)


class DiffForm(_Tensor):
    __slots__ = ()
    prefix = "dx"


class MultiVec(_Tensor):
    __slots__ = ()
    prefix = "@"


def render_tensor(t: _Tensor) -> str:
    """Canonical text: components by tensor degree, then lexicographic index."""
    if not t.comps:
        return "0"
    pieces = []
    for idx, p in t:
        basis = t.basis_name(idx)
        ptxt = str(p)
        if not idx:
            text = ptxt if len(p.terms) == 1 or len(t.comps) == 1 else f"({ptxt})"
        elif p == 1:
            text = basis
        elif p == -1:
            text = f"-{basis}"
        elif len(p.terms) == 1:
            text = f"{ptxt} {basis}"
        else:
            text = f"({ptxt}) {basis}"
        pieces.append(text)
    out = pieces[0]
    for text in pieces[1:]:
        out += f" - {text[1:]}" if text.startswith("-") else f" + {text}"
    return out


# -- calculus -------------------------------------------------------------------


def exterior_derivative(f: DiffForm) -> DiffForm:
    if not isinstance(f, DiffForm):
        raise KindError("exterior derivative of a non-form")
    out: dict[Index, Polynomial] = {}
    for idx, p in f.comps.items():
        for i in range(1, f.dim + 1):
            if i in idx:
                continue
            dp = p.partial(i)
            if not dp:
                continue
            s, new = _merge((i,), idx)
            _add_into(out, new, dp if s > 0 else -dp)
    return DiffForm._raw(f.dim, out)


def contraction(x: MultiVec, f: DiffForm) -> DiffForm:
    """Contract ``f`` along ``x``: ``i_{@J} dx^J^dx^K = dx^K``, extended bilinearly."""
    if not isinstance(x, MultiVec) or not isinstance(f, DiffForm):
        raise KindError("contraction takes (MultiVec, DiffForm)")
    if x.dim != f.dim:
        raise DimensionError(f"dimension {x.dim} vs {f.dim}")
    out: dict[Index, Polynomial] = {}
    for j, px in x.comps.items():
        for i, pf in f.comps.items():
            if len(j) > len(i):
                continue
            s, rest = _contract_index(j, i)
            if s:
                term = px * pf
                _add_into(out, rest, term if s > 0 else -term)
    return DiffForm._raw(f.dim, out)


def lie_derivative(x: MultiVec, f: DiffForm) -> DiffForm:
    """``L_X f = d i_X f - (-1)^r i_X d f``, summed over homogeneous parts of ``X``."""
    total = DiffForm.zero(f.dim)
    df = None
    for r, xr in x.homogeneous_parts().items():
        term = exterior_derivative(contraction(xr, f))
        if df is None:
            df = exterior_derivative(f)
        second = contraction(xr, df)
        term = term - second if r % 2 == 0 else term + second
        total = total + term
    return total


def schouten(x: MultiVec, y: MultiVec) -> MultiVec:
    """Schouten-Nijenhuis bracket; on vector fields the Lie bracket ``XY - YX``.

    Computed as the odd Poisson bracket in the fibre coordinates dual to
    ``@_i``: ``sum_i (X d<_i)(d_i Y) - (d_i X)(d>_i Y)`` with right/left odd
    derivatives ``d<``, ``d>``.
    """
    if not isinstance(x, MultiVec) or not isinstance(y, MultiVec):
        raise KindError("Schouten bracket takes two multivector fields")
    if x.dim != y.dim:
        raise DimensionError(f"dimension {x.dim} vs {y.dim}")
    dim = x.dim
    out: dict[Index, Polynomial] = {}
    for i in range(1, dim + 1):
        # X differentiated in theta_i from the right, times d_i Y
        for j, px in x.comps.items():
            if i not in j:
                continue
            s1, jr = _right_drop(j, i)
            for k, py in y.comps.items():
                dpy = py.partial(i)
                if not dpy:
                    continue
                s2, idx = _merge(jr, k)
                if s2:
                    term = px * dpy
                    _add_into(out, idx, term if s1 * s2 > 0 else -term)
        # d_i X times Y differentiated in theta_i from the left
        for k, py in y.comps.items():
            if i not in k:
                continue
            s1, kr = _left_drop(k, i)
            for j, px in x.comps.items():
                dpx = px.partial(i)
                if not dpx:
                    continue
                s2, idx = _merge(j, kr)
                if s2:
                    term = dpx * py
                    _add_into(out, idx, -term if s1 * s2 > 0 else term)
    return MultiVec._raw(dim, out)


def lie_bracket(x: MultiVec, y: MultiVec) -> MultiVec:
    """Plain ``XY - YX`` for vector fields; an oracle for :func:`schouten`."""
    if x.degrees() - {1} or y.degrees() - {1}:
        raise ValueError("lie_bracket takes vector fields")
    dim = x.dim
    out = {}
    for i in range(1, dim + 1):
        acc = Polynomial.zero(dim)
        for (j,), xj in x.comps.items():
            acc = acc + xj * y.coefficient((i,)).partial(j)
        for (j,), yj in y.comps.items():
            acc = acc - yj * x.coefficient((i,)).partial(j)
        out[(i,)] = acc
    return MultiVec._raw(dim, out)


def basis_indices(dim: int, k: int) -> list[Index]:
    """Strictly increasing ``k``-tuples from ``1..dim`` in lexicographic order."""
    return list(combinations(range(1, dim + 1), k))


def dx(dim: int, *indices: int) -> DiffForm:
    return DiffForm.basis(dim, *indices)


def vec(dim: int, *indices: int) -> MultiVec:
    return MultiVec.basis(dim, *indices)
