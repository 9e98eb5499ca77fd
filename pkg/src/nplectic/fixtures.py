"""Named n-plectic spaces and a seeded generator of Hamiltonian forms."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .calculus import DiffForm, MultiVec, basis_indices, contraction, dx, exterior_derivative
from .linalg import nullspace
from .poly import Polynomial
from .solver import HamiltonianForm, NPlecticSpace, solve_semi_hamiltonian, validate_nplectic


def _symplectic_r2() -> tuple[int, int, DiffForm]:
    return 2, 1, dx(2, 1, 2)


def _volume_r3() -> tuple[int, int, DiffForm]:
    return 3, 2, dx(3, 1, 2, 3)


def _paper_r6() -> tuple[int, int, DiffForm]:
    return 6, 3, dx(6, 1, 3, 5, 6) + dx(6, 2, 4, 5, 6)


def _darboux_r6() -> tuple[int, int, DiffForm]:
    # base x1, x2; fibre q = x3, p^1 = x4, p^2 = x5, p = x6
    # dq^dp^mu^(i_mu dx1^dx2) - dp^dx1^dx2
    return 6, 2, dx(6, 2, 3, 4) - dx(6, 1, 3, 5) - dx(6, 1, 2, 6)


SPACES = {
    "symplectic-R2": _symplectic_r2,
    "volume-R3": _volume_r3,
    "paper-R6": _paper_r6,
    "darboux-R6": _darboux_r6,
}

_cache: dict[str, NPlecticSpace] = {}


def space(name: str) -> NPlecticSpace:
    """Validated fixture space by id."""
    if name not in SPACES:
        raise KeyError(f"unknown space {name!r}; choose from {', '.join(SPACES)}")
    if name not in _cache:
        dim, n, omega = SPACES[name]()
        _cache[name] = validate_nplectic(dim, n, omega)
    return _cache[name]


def random_polynomial(rng: random.Random, dim: int, max_degree: int = 1, max_terms: int = 2) -> Polynomial:
    """A sparse polynomial with small integer coefficients."""
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        mono = [0] * dim
        for _ in range(rng.randint(0, max_degree)):
            mono[rng.randrange(dim)] += 1
        terms[tuple(mono)] = rng.choice((-3, -2, -1, 1, 2, 3))
    return Polynomial(dim, terms)


def random_tensor(rng: random.Random, cls, dim: int, degree: int, max_degree: int = 1, max_components: int = 2):
    """A homogeneous tensor with a few random polynomial components."""
    idx = basis_indices(dim, degree)
    if not idx:
        return cls.zero(dim)
    comps = {}
    for _ in range(rng.randint(1, max_components)):
        comps[rng.choice(idx)] = random_polynomial(rng, dim, max_degree)
    return cls(dim, comps)


def _monomials(dim: int, degree: int):
    for combo in itertools.combinations_with_replacement(range(dim), degree):
        mono = [0] * dim
        for c in combo:
            mono[c] += 1
        yield tuple(mono)


_basis_cache: dict[tuple, list[tuple[DiffForm, MultiVec]]] = {}


def hamiltonian_basis(sp: NPlecticSpace, r: int, poly_degree: int) -> list[tuple[DiffForm, MultiVec]]:
    """Spanning set of Hamiltonian r-forms ``f = -i_Y omega`` whose ``Y`` has
    homogeneous coefficients of the given polynomial degree.

    Candidates ``-i_Y omega`` for monomial ``Y`` are combined so that ``-df``
    lies in the image of the contraction map: the obstruction rows of the
    eliminated contraction matrix must vanish, which is a linear condition on
    the combination coefficients.  Returns ``(f, Y)`` pairs.
    """
    key = (sp.dim, sp.n, sp.omega, r, poly_degree)
    if key in _basis_cache:
        return _basis_cache[key]
    dim, n = sp.dim, sp.n
    cands: list[tuple[DiffForm, MultiVec]] = []
    seen: set[DiffForm] = set()
    for idx in basis_indices(dim, n + 1 - r):
        for mono in _monomials(dim, poly_degree):
            y = MultiVec(dim, {idx: Polynomial(dim, {mono: 1})})
            f = -contraction(y, sp.omega)
            if f and f not in seen and -f not in seen:
                seen.add(f)
                cands.append((f, y))
    cm, lin = sp._solver(n - r)
    row_of = {t: i for i, t in enumerate(cm.target_basis)}
    zero = Polynomial.zero(dim)
    columns = []
    for f, _ in cands:
        b = [zero] * len(cm.target_basis)
        for t, p in exterior_derivative(f).comps.items():
            b[row_of[t]] = p
        obstruction = {}
        for i in range(lin.rank, len(lin.transform)):
            for mono, c in lin._combine(lin.transform[i], b, zero).terms.items():
                obstruction[(i, mono)] = c
        columns.append(obstruction)
    rows = sorted(set().union(*columns)) if columns else []
    matrix = [[col.get(row, Fraction(0)) for col in columns] for row in rows]
    out = []
    for v in nullspace(matrix, len(columns)):
        f = DiffForm.zero(dim)
        y = MultiVec.zero(dim)
        for c, (fc, yc) in zip(v, cands):
            if c:
                f = f + fc.scale(c)
                y = y + yc.scale(c)
        if f:
            out.append((f, y))
    _basis_cache[key] = out
    return out


@dataclass
class HamiltonianGenerator:
    """Draws Hamiltonian forms as ``f = -i_Y omega`` from random ``Y``.

    Draws with ``f = 0`` or without a solution of ``i_X omega = -df`` are
    discarded and counted.  With ``use_basis`` the draw is a random small
    combination from :func:`hamiltonian_basis` (plus a random constant
    ``Y``), which keeps draws Hamiltonian on spaces where blind sampling
    almost always produces forms whose brackets vanish.
    """

    space: NPlecticSpace
    seed: int = 0
    max_degree: int = 3
    max_components: int = 5
    use_basis: bool = True
    rng: random.Random = field(init=False)
    drawn: int = 0
    discarded: int = 0

    def __post_init__(self) -> None:
        self.rng = random.Random(self.seed)

    @property
    def discard_rate(self) -> float:
        return self.discarded / self.drawn if self.drawn else 0.0

    def draw(self, tensor_degree: Optional[int] = None) -> HamiltonianForm:
        sp = self.space
        while True:
            r = tensor_degree if tensor_degree is not None else self._tensor_degree()
            if self.use_basis:
                y = self._basis_draw(r)
            else:
                y = random_tensor(self.rng, MultiVec, sp.dim, sp.n + 1 - r, self.max_degree, self.max_components)
            self.drawn += 1
            f = -contraction(y, sp.omega)
            if f.is_zero():
                self.discarded += 1
                continue
            semi = solve_semi_hamiltonian(sp, f)
            if not semi.ok:
                self.discarded += 1
                continue
            return HamiltonianForm(f, sp.n, semi.solution, y)

    def _tensor_degree(self) -> int:
        # bracket values have tensor degree n + 1 - sum of symmetric degrees,
        # so low-degree draws make higher brackets vanish; favour r = n - 1, n.
        # For n >= 2 a Hamiltonian function has constant X (dg ^ omega = 0)
        # and only adds zero terms, so functions are not drawn there.
        n = self.space.n
        weights = [1] * (n + 1)
        weights[n - 1] = 4
        weights[n] = 2
        if n >= 2:
            weights[0] = 0
        return self.rng.choices(range(n + 1), weights)[0]

    def _basis_draw(self, r: int) -> MultiVec:
        rng, sp = self.rng, self.space
        y = random_tensor(rng, MultiVec, sp.dim, sp.n + 1 - r, 0, 1)
        for _ in range(rng.randint(1, self.max_components)):
            basis = hamiltonian_basis(sp, r, rng.randint(1, self.max_degree))
            if basis:
                y = y + rng.choice(basis)[1].scale(rng.choice((-2, -1, 1, 2)))
        return y

    def tuple(self, k: int) -> list[HamiltonianForm]:
        return [self.draw() for _ in range(k)]


def random_kernel_element(rng: random.Random, kernel: list[MultiVec]) -> MultiVec:
    """Random polynomial combination of kernel basis fields (omega is constant)."""
    if not kernel:
        raise ValueError("empty kernel")
    dim = kernel[0].dim
    total = MultiVec.zero(dim)
    for k in kernel:
        c = random_polynomial(rng, dim).scale(Fraction(1, rng.randint(1, 2)))
        total = total + k.scale(c)
    return total
