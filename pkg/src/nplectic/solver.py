"""n-plectic structures and the two pairing equations.

For an n-plectic form ``omega`` a form ``f`` is semi-Hamiltonian when some
multivector field ``X`` solves ``i_X omega = -d f`` and Hamiltonian when, in
addition, some ``Y`` solves ``i_Y omega = -f``.  With constant coefficients
in the chosen coordinates both equations are a constant linear map applied
to polynomial coefficient vectors, so exact elimination decides them.
"""
from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .calculus import (
    DiffForm,
    Index,
    MultiVec,
    basis_indices,
    contraction,
    exterior_derivative,
    schouten,
)
from .graded import sign_e
from .linalg import LinearSolver, nullspace
from .poly import Polynomial, render_monomial


class NPlecticError(ValueError):
    pass


class NotClosed(NPlecticError):
    def __init__(self, witness: DiffForm):
        super().__init__(f"omega is not closed: d(omega) = {witness}")
        self.witness = witness


class Degenerate(NPlecticError):
    def __init__(self, kernel_vector: MultiVec, where: str = ""):
        msg = f"omega is degenerate: i_X omega = 0 for X = {kernel_vector}"
        super().__init__(msg + (f" at {where}" if where else ""))
        self.kernel_vector = kernel_vector


class NonConstantOmega(NPlecticError):
    def __init__(self) -> None:
        super().__init__("solver requires omega with constant coefficients")


class NotNPlecticFunction(NPlecticError):
    pass


class DegreeError(NPlecticError):
    pass


class Status(str, enum.Enum):
    HAMILTONIAN = "Hamiltonian"
    SEMI = "semi-Hamiltonian"
    NEITHER = "neither"


@dataclass(frozen=True)
class ContractionMatrix:
    """Matrix of ``X -> i_X omega`` from degree-``k`` fields to forms."""

    source_degree: int
    source_basis: tuple[Index, ...]
    target_basis: tuple[Index, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.target_basis), len(self.source_basis)

    def rank(self) -> int:
        return LinearSolver([list(r) for r in self.matrix], len(self.source_basis)).rank


@dataclass(frozen=True)
class NoSolution:
    """Certificate that ``i_Z omega = rhs`` has no solution.

    ``combination`` maps target basis indices to rational weights; the same
    combination of the equations has a zero left side but ``residual`` on
    the right, and ``monomial`` is a monomial where ``residual`` is nonzero.
    """

    equation: str
    degree: int
    combination: dict
    residual: Polynomial
    monomial: tuple[int, ...] | None

    def describe(self) -> str:
        if self.monomial is None:
            return f"{self.equation}: no field of tensor degree {self.degree} can exist"
        terms = " + ".join(
            f"{c}*[dx{'^dx'.join(map(str, idx)) or '0'}]" for idx, c in sorted(self.combination.items())
        )
        mono = render_monomial(self.monomial) or "1"
        coeff = self.residual.terms[self.monomial]
        return (
            f"{self.equation}: no field of tensor degree {self.degree}; "
            f"equation combination {terms} at monomial {mono} reads 0 = {coeff}"
        )


@dataclass(frozen=True)
class SolveOutcome:
    solution: Optional[MultiVec] = None
    kernel_dimension: int = 0
    witness: Optional[NoSolution] = None

    @property
    def ok(self) -> bool:
        return self.solution is not None


@dataclass(frozen=True)
class HamiltonianForm:
    f: DiffForm
    plectic_degree: int
    semi_associate: Optional[MultiVec] = None
    ham_associate: Optional[MultiVec] = None
    semi_witness: Optional[NoSolution] = None
    ham_witness: Optional[NoSolution] = None

    @property
    def status(self) -> Status:
        if self.semi_associate is None:
            return Status.NEITHER
        if self.ham_associate is None:
            return Status.SEMI
        return Status.HAMILTONIAN

    @property
    def is_hamiltonian(self) -> bool:
        return self.status is Status.HAMILTONIAN

    @property
    def degree(self) -> int | None:
        """Symmetric degree ``n - |f|``; ``None`` for mixed tensor degree."""
        r = self.f.tensor_degree()
        return None if r is None else self.plectic_degree - r

    def sign(self) -> int:
        return sign_e(self.degree)


@dataclass
class NPlecticSpace:
    """A coordinate space ``R^dim`` with a validated n-plectic form.

    Build instances with :func:`validate_nplectic`.  ``certified`` is False
    when nondegeneracy was only checked at sample points.
    """

    dim: int
    plectic_degree: int
    omega: DiffForm
    certified: bool = True
    _matrices: dict = field(default_factory=dict, repr=False, compare=False)
    _solvers: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.plectic_degree

    @property
    def constant(self) -> bool:
        return self.omega.is_constant()

    def symmetric_degree(self, f: DiffForm) -> int | None:
        r = f.tensor_degree()
        return None if r is None else self.n - r

    def _solver(self, k: int) -> tuple[ContractionMatrix, LinearSolver]:
        with self._lock:
            if k not in self._solvers:
                cm = _build_contraction_matrix(self.dim, self.omega, k)
                self._matrices[k] = cm
                self._solvers[k] = LinearSolver([list(r) for r in cm.matrix], len(cm.source_basis))
            return self._matrices[k], self._solvers[k]


def _build_contraction_matrix(dim: int, omega: DiffForm, k: int) -> ContractionMatrix:
    r = omega.tensor_degree()
    src = tuple(basis_indices(dim, k))
    tgt = tuple(basis_indices(dim, r - k)) if r - k >= 0 else ()
    row_of = {idx: i for i, idx in enumerate(tgt)}
    cols = []
    for idx in src:
        image = contraction(MultiVec.basis(dim, *idx), omega)
        col = [Fraction(0)] * len(tgt)
        for t, p in image.comps.items():
            col[row_of[t]] = p.constant_value()
        cols.append(col)
    matrix = tuple(tuple(cols[c][row] for c in range(len(src))) for row in range(len(tgt)))
    return ContractionMatrix(k, src, tgt, matrix)


def _vector_to_field(dim: int, basis: Sequence[Index], values: Sequence) -> MultiVec:
    comps = {}
    for idx, v in zip(basis, values):
        if v:
            comps[idx] = v if isinstance(v, Polynomial) else Polynomial.constant(dim, v)
    return MultiVec(dim, comps)


def validate_nplectic(
    dim: int,
    n: int,
    omega: DiffForm,
    sample_points: Iterable[Sequence] | None = None,
) -> NPlecticSpace:
    """Check closedness and injectivity of ``X -> i_X omega`` on vector fields.

    Constant ``omega`` is certified by a full-rank contraction matrix.  For
    polynomial ``omega`` the rank is checked at ``sample_points`` only and the
    result is marked ``certified=False``.
    """
    if omega.dim != dim:
        raise NPlecticError(f"omega lives in dimension {omega.dim}, not {dim}")
    if not 1 <= n <= dim - 1:
        raise NPlecticError(f"plectic degree {n} outside 1..{dim - 1}")
    if omega.is_zero() or omega.tensor_degree() != n + 1:
        raise NPlecticError(f"omega must be homogeneous of tensor degree {n + 1}")
    dw = exterior_derivative(omega)
    if dw:
        raise NotClosed(dw)
    if omega.is_constant():
        cm = _build_contraction_matrix(dim, omega, 1)
        ker = nullspace([list(r) for r in cm.matrix], len(cm.source_basis))
        if ker:
            raise Degenerate(_vector_to_field(dim, cm.source_basis, ker[0]))
        return NPlecticSpace(dim, n, omega, certified=True)
    points = list(sample_points or [])
    if not points:
        raise NPlecticError("polynomial omega needs sample points for the nondegeneracy check")
    for pt in points:
        at = DiffForm(dim, {k: Polynomial.constant(dim, v.evaluate(pt)) for k, v in omega.comps.items()})
        if at.is_zero():
            raise Degenerate(MultiVec.basis(dim, 1), where=str(tuple(pt)))
        cm = _build_contraction_matrix(dim, at, 1)
        ker = nullspace([list(r) for r in cm.matrix], len(cm.source_basis))
        if ker:
            raise Degenerate(_vector_to_field(dim, cm.source_basis, ker[0]), where=str(tuple(pt)))
    return NPlecticSpace(dim, n, omega, certified=False)


def contraction_matrix(space: NPlecticSpace, k: int) -> ContractionMatrix:
    if not space.constant:
        raise NonConstantOmega()
    if not 0 <= k <= space.n + 1:
        raise DegreeError(f"contraction degree {k} outside 0..{space.n + 1}")
    return space._solver(k)[0]


def _solve_pairing(space: NPlecticSpace, rhs: DiffForm, label: str) -> SolveOutcome:
    """Solve ``i_Z omega = rhs`` one homogeneous part of ``rhs`` at a time."""
    if not space.constant:
        raise NonConstantOmega()
    dim, top = space.dim, space.n + 1
    total = MultiVec.zero(dim)
    kernel_dim = 0
    for r, part in rhs.homogeneous_parts().items():
        k = top - r
        if k < 0:
            return SolveOutcome(witness=NoSolution(label, k, {}, Polynomial.zero(dim), None))
        cm, lin = space._solver(k)
        row_of = {idx: i for i, idx in enumerate(cm.target_basis)}
        b = [Polynomial.zero(dim)] * len(cm.target_basis)
        for idx, p in part.comps.items():
            b[row_of[idx]] = p
        x, bad = lin.solve(b, Polynomial.zero(dim))
        if x is None:
            _, comb, residual = bad
            combination = {cm.target_basis[j]: v for j, v in comb.items()}
            mono = min(residual.terms)
            return SolveOutcome(witness=NoSolution(label, k, combination, residual, mono))
        total = total + _vector_to_field(dim, cm.source_basis, x)
        kernel_dim += lin.nullity
    return SolveOutcome(solution=total, kernel_dimension=kernel_dim)


def solve_semi_hamiltonian(space: NPlecticSpace, f: DiffForm) -> SolveOutcome:
    """Find ``X`` with ``i_X omega = -d f``."""
    return _solve_pairing(space, -exterior_derivative(f), "i_X omega = -df")


def solve_hamiltonian(space: NPlecticSpace, f: DiffForm) -> SolveOutcome:
    """Find ``Y`` with ``i_Y omega = -f``."""
    return _solve_pairing(space, -f, "i_Y omega = -f")


def is_semi_associate(space: NPlecticSpace, f: DiffForm, x: MultiVec) -> bool:
    return contraction(x, space.omega) + exterior_derivative(f) == DiffForm.zero(space.dim)


def is_ham_associate(space: NPlecticSpace, f: DiffForm, y: MultiVec) -> bool:
    return contraction(y, space.omega) + f == DiffForm.zero(space.dim)


def classify(space: NPlecticSpace, f: DiffForm) -> HamiltonianForm:
    semi = solve_semi_hamiltonian(space, f)
    ham = solve_hamiltonian(space, f)
    return HamiltonianForm(
        f,
        space.n,
        semi_associate=semi.solution,
        ham_associate=ham.solution,
        semi_witness=semi.witness,
        ham_witness=ham.witness,
    )


def kernel_basis(space: NPlecticSpace, k: int) -> list[MultiVec]:
    """Constant degree-``k`` fields ``xi`` with ``i_xi omega = 0``."""
    if not space.constant:
        raise NonConstantOmega()
    if k < 0:
        return []
    if k > space.n + 1:
        return [MultiVec.basis(space.dim, *idx) for idx in basis_indices(space.dim, k)]
    cm, lin = space._solver(k)
    vectors = nullspace([list(r) for r in cm.matrix], len(cm.source_basis))
    return [_vector_to_field(space.dim, cm.source_basis, v) for v in vectors]


def kernel_property_check(space: NPlecticSpace, hf: HamiltonianForm | DiffForm) -> tuple[bool, Optional[MultiVec]]:
    """Check ``i_xi f = 0`` for kernel basis elements up to the degree of ``f``.

    Returns ``(True, None)`` or ``(False, xi)`` for the first offending ``xi``.
    """
    f = hf.f if isinstance(hf, HamiltonianForm) else hf
    top = max(f.degrees(), default=0)
    for k in range(1, top + 1):
        for xi in kernel_basis(space, k):
            if contraction(xi, f):
                return False, xi
    return True, None


def is_nplectic_function(space: NPlecticSpace, g: Polynomial) -> bool:
    dg = exterior_derivative(DiffForm.function(g))
    return dg.wedge(space.omega).is_zero()


@dataclass(frozen=True)
class ModuleAction:
    """Result of multiplying a Hamiltonian form by an n-plectic function.

    ``semi_sign`` is +1 when ``e(g)[g, Y] + g X`` was a semi-associate, -1 when
    ``-e(g)[g, Y] + g X`` was, and 0 when neither applied and the solver
    supplied one instead.
    """

    result: HamiltonianForm
    semi_sign: int


def module_action(space: NPlecticSpace, g: Polynomial, hf: HamiltonianForm) -> ModuleAction:
    if not is_nplectic_function(space, g):
        raise NotNPlecticFunction(f"d({g}) ^ omega != 0")
    if not hf.is_hamiltonian:
        raise NPlecticError("module action needs a Hamiltonian form")
    f = hf.f.scale(g)
    gfield = MultiVec.function(g)
    y = hf.ham_associate.scale(g)
    if not is_ham_associate(space, f, y):
        solved = solve_hamiltonian(space, f)
        y = solved.solution
    e_g = sign_e(space.n)
    bracket = schouten(gfield, hf.ham_associate)
    gx = hf.semi_associate.scale(g)
    for sign in (1, -1):
        x = gx + bracket.scale(sign * e_g)
        if is_semi_associate(space, f, x):
            return ModuleAction(HamiltonianForm(f, space.n, x, y), sign)
    return ModuleAction(classify(space, f), 0)


def product_of_hamiltonian_functions(
    space: NPlecticSpace, hf1: HamiltonianForm, hf2: HamiltonianForm
) -> HamiltonianForm:
    """Product of two Hamiltonian functions with associates built from the factors."""
    for hf in (hf1, hf2):
        if not hf.f.is_zero() and hf.f.degrees() != {0}:
            raise DegreeError("product is defined for tensor-degree-0 forms")
        if not hf.is_hamiltonian:
            raise NPlecticError("product needs Hamiltonian factors")
    p1, p2 = hf1.f.coefficient(()), hf2.f.coefficient(())
    f = DiffForm.function(p1 * p2)
    x = hf2.semi_associate.scale(p1) + hf1.semi_associate.scale(p2)
    y = hf2.ham_associate.scale(p1)
    if not is_semi_associate(space, f, x):
        raise AssertionError("constructed semi-associate fails the first pairing")
    if not is_ham_associate(space, f, y):
        raise AssertionError("constructed associate fails the second pairing")
    return HamiltonianForm(f, space.n, x, y)
