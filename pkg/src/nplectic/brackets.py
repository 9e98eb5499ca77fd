"""The strong homotopy brackets D_1, D_2, D_3, ..., D_k on Hamiltonian forms.

All signs use the symmetric degree ``deg f = n - |f|``.  Brackets are
evaluated on homogeneous arguments and extended multilinearly.  Every
argument is lifted through a :class:`BracketContext`, which solves (once) for
its associated fields.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .calculus import DiffForm, MultiVec, contraction, exterior_derivative, lie_derivative, schouten
from .graded import enumerate_shuffles, koszul_sign, sign_e, sign_e2
from .solver import (
    HamiltonianForm,
    NPlecticError,
    NPlecticSpace,
    classify,
    is_ham_associate,
    is_semi_associate,
    solve_hamiltonian,
    solve_semi_hamiltonian,
)

FormLike = Union[DiffForm, HamiltonianForm]


class UnsolvedArgument(NPlecticError):
    """An argument has no semi-Hamiltonian associate."""


class BracketValueNotHamiltonian(NPlecticError):
    """A lower bracket value has no associated field, so the tower stops."""


# largest k for which the wedge formula of Dk_semi_associate is an associate
EXPLICIT_SEMI_MAX = 4


def bracket_prefactor(k: int) -> Fraction:
    """The constant in front of the shuffle sum defining D_k for k >= 3."""
    return Fraction(1, 2) if k == 3 else Fraction(1)


class BracketContext:
    """Caches lifted arguments and bracket values for one n-plectic space.

    ``formula_log`` records every explicit associate formula that failed its
    substitution check (the solver is used instead in that case).
    """

    def __init__(self, space: NPlecticSpace):
        self.space = space
        self._lifted: dict[DiffForm, HamiltonianForm] = {}
        self._values: dict[tuple, HamiltonianForm] = {}
        self._lock = threading.RLock()
        self.formula_log: list[str] = []

    @property
    def n(self) -> int:
        return self.space.n

    def register(self, hf: HamiltonianForm) -> HamiltonianForm:
        """Use the given associates for ``hf.f`` after checking them."""
        sp = self.space
        if hf.semi_associate is not None and not is_semi_associate(sp, hf.f, hf.semi_associate):
            raise NPlecticError(f"semi-associate does not satisfy i_X omega = -df for {hf.f}")
        if hf.ham_associate is not None and not is_ham_associate(sp, hf.f, hf.ham_associate):
            raise NPlecticError(f"associate does not satisfy i_Y omega = -f for {hf.f}")
        with self._lock:
            self._lifted[hf.f] = hf
            self._values.clear()
        return hf

    def lift(self, f: FormLike) -> HamiltonianForm:
        if isinstance(f, HamiltonianForm):
            with self._lock:
                known = self._lifted.get(f.f)
            if known is f:
                return f
            if f.semi_associate is None and f.ham_associate is None:
                f = f.f
            else:
                return self.register(f)
        with self._lock:
            hf = self._lifted.get(f)
        if hf is None:
            hf = classify(self.space, f)
            with self._lock:
                hf = self._lifted.setdefault(f, hf)
        return hf

    def split(self, f: FormLike) -> list[HamiltonianForm]:
        """Homogeneous parts of an argument, each lifted."""
        hf = self.lift(f)
        parts = hf.f.homogeneous_parts()
        if len(parts) <= 1:
            return [hf] if parts else []
        out = []
        for r, fr in parts.items():
            x = hf.semi_associate.part(self.n - r) if hf.semi_associate is not None else None
            y = hf.ham_associate.part(self.n + 1 - r) if hf.ham_associate is not None else None
            if x is not None and not is_semi_associate(self.space, fr, x):
                x = None
            if y is not None and not is_ham_associate(self.space, fr, y):
                y = None
            out.append(self.lift(HamiltonianForm(fr, self.n, x, y)) if x or y else self.lift(fr))
        return out

    def _memo(self, key, compute):
        with self._lock:
            hit = self._values.get(key)
        if hit is None:
            hit = compute()
            with self._lock:
                hit = self._values.setdefault(key, hit)
        return hit

    def _finish(self, f: DiffForm, x_candidate, y_candidate, label: str) -> HamiltonianForm:
        """Attach verified associates to a bracket value, solving where needed."""
        sp = self.space
        x = x_candidate() if x_candidate else None
        if x is not None and not is_semi_associate(sp, f, x):
            self.formula_log.append(f"{label}: explicit semi-associate failed")
            x = None
        semi_witness = None
        if x is None:
            out = solve_semi_hamiltonian(sp, f)
            x, semi_witness = out.solution, out.witness
        y = y_candidate() if y_candidate else None
        if y is not None and not is_ham_associate(sp, f, y):
            self.formula_log.append(f"{label}: explicit associate failed")
            y = None
        ham_witness = None
        if y is None:
            out = solve_hamiltonian(sp, f)
            y, ham_witness = out.solution, out.witness
        hf = HamiltonianForm(f, self.n, x, y, semi_witness, ham_witness)
        with self._lock:
            self._lifted.setdefault(f, hf)
            return self._lifted[f]


def _need_x(h: HamiltonianForm) -> MultiVec:
    if h.semi_associate is None:
        raise UnsolvedArgument(f"{h.f} is not semi-Hamiltonian")
    return h.semi_associate


def _zero(ctx: BracketContext) -> HamiltonianForm:
    z = DiffForm.zero(ctx.space.dim)
    return HamiltonianForm(z, ctx.n, MultiVec.zero(z.dim), MultiVec.zero(z.dim))


def _sum(ctx: BracketContext, pieces: list[HamiltonianForm]) -> HamiltonianForm:
    if not pieces:
        return _zero(ctx)
    if len(pieces) == 1:
        return pieces[0]
    f = pieces[0].f
    x, y = pieces[0].semi_associate, pieces[0].ham_associate
    for p in pieces[1:]:
        f = f + p.f
        x = None if x is None or p.semi_associate is None else x + p.semi_associate
        y = None if y is None or p.ham_associate is None else y + p.ham_associate
    return ctx._finish(f, (lambda: x) if x is not None else None, (lambda: y) if y is not None else None, "sum")


def _multilinear(ctx: BracketContext, args: Sequence[FormLike], homog) -> HamiltonianForm:
    parts = [ctx.split(a) for a in args]
    if any(not p for p in parts):
        return _zero(ctx)
    if all(len(p) == 1 for p in parts):
        return homog(ctx, [p[0] for p in parts])
    pieces = [homog(ctx, list(combo)) for combo in itertools.product(*parts)]
    return _sum(ctx, [p for p in pieces if p.f])


# -- D_1 -------------------------------------------------------------------------


def D1(ctx: BracketContext, f: FormLike) -> HamiltonianForm:
    """``D_1 f = -d f``; its associated field is ``-X`` for ``i_X omega = -df``."""
    hf = ctx.lift(f)
    x = -hf.semi_associate if hf.semi_associate is not None else None
    value = -exterior_derivative(hf.f)
    zero = MultiVec.zero(ctx.space.dim)
    return ctx._finish(value, lambda: zero, (lambda: x) if x is not None else None, "D1")


# -- D_2 -------------------------------------------------------------------------


def _d2_value(h1: HamiltonianForm, h2: HamiltonianForm) -> DiffForm:
    x1, x2 = _need_x(h1), _need_x(h2)
    e1, e2 = h1.sign(), h2.sign()
    e12 = sign_e2(h1.degree, h2.degree)
    return lie_derivative(x1, h2.f).scale(e1) + lie_derivative(x2, h1.f).scale(e12 * e2)


def _d2_x(h1: HamiltonianForm, h2: HamiltonianForm) -> MultiVec:
    return schouten(_need_x(h2), _need_x(h1)).scale(-2 * h1.sign())


def _d2_y(h1: HamiltonianForm, h2: HamiltonianForm) -> Optional[MultiVec]:
    if h1.ham_associate is None or h2.ham_associate is None:
        return None
    e12 = sign_e2(h1.degree, h2.degree)
    return schouten(h2.ham_associate, _need_x(h1)) + schouten(h1.ham_associate, _need_x(h2)).scale(e12)


def _d2_homog(ctx: BracketContext, hs: list[HamiltonianForm]) -> HamiltonianForm:
    h1, h2 = hs

    def compute():
        value = _d2_value(h1, h2)
        return ctx._finish(value, lambda: _d2_x(h1, h2), lambda: _d2_y(h1, h2), "X_D2/Y_D2")

    return ctx._memo((2, h1.f, h2.f), compute)


def D2(ctx: BracketContext, f1: FormLike, f2: FormLike) -> HamiltonianForm:
    """``e(f1) L_{X1} f2 + e(f1,f2) e(f2) L_{X2} f1``."""
    return _multilinear(ctx, [f1, f2], _d2_homog)


def D2_semi_associate(ctx: BracketContext, f1: FormLike, f2: FormLike) -> MultiVec:
    """``-2 e(f1) [X2, X1]`` summed over homogeneous parts."""
    parts = [ctx.split(f1), ctx.split(f2)]
    total = MultiVec.zero(ctx.space.dim)
    for a, b in itertools.product(*parts):
        total = total + _d2_x(a, b)
    return total


def D2_ham_associate(ctx: BracketContext, f1: FormLike, f2: FormLike) -> MultiVec:
    """``[Y2, X1] + e(f1,f2) [Y1, X2]`` summed over homogeneous parts."""
    parts = [ctx.split(f1), ctx.split(f2)]
    total = MultiVec.zero(ctx.space.dim)
    for a, b in itertools.product(*parts):
        y = _d2_y(a, b)
        if y is None:
            raise UnsolvedArgument("second pairing unsolved for an argument")
        total = total + y
    return total


# -- D_3 and higher ------------------------------------------------------------------


def _sign_prod(hs) -> int:
    out = 1
    for h in hs:
        out *= h.sign()
    return out


def _lower_x(ctx: BracketContext, hs: list[HamiltonianForm]) -> MultiVec:
    """A semi-associate of D_{k-1}(hs), as used inside D_k."""
    if len(hs) == 2:
        return _d2_x(hs[0], hs[1])
    value = bracket(ctx, hs)
    if value.semi_associate is None:
        raise BracketValueNotHamiltonian(
            f"D_{len(hs)} value {value.f} admits no field with i_X omega = -dD"
        )
    return value.semi_associate


def _dk_sum(ctx: BracketContext, hs: list[HamiltonianForm], build) -> Optional[MultiVec | DiffForm]:
    """Sum over (k-1,1)-shuffles of ``sign * build(lower_hs, last)``."""
    k = len(hs)
    degs = [h.degree for h in hs]
    total = None
    for sh in enumerate_shuffles((k - 1, 1)):
        idx = sh.perm.images
        lower = [hs[i - 1] for i in idx[:-1]]
        last = hs[idx[-1] - 1]
        sign = koszul_sign(sh.perm, degs)
        term = build(lower, last, sign)
        if term is None:
            return None
        total = term if total is None else total + term
    return total


def _dk_value(ctx: BracketContext, hs: list[HamiltonianForm]) -> DiffForm:
    def build(lower, last, sign):
        x = _lower_x(ctx, lower)
        return contraction(x, last.f).scale(sign * _sign_prod(lower))

    total = _dk_sum(ctx, hs, build)
    return total.scale(-bracket_prefactor(len(hs)))


def _dk_y(ctx: BracketContext, hs: list[HamiltonianForm]) -> Optional[MultiVec]:
    """Explicit associate ``-c_k sum e(s) e(f_s1)..e(f_s(k-1)) Y_sk ^ X_{D_{k-1}}``."""
    def build(lower, last, sign):
        if last.ham_associate is None:
            return None
        x = _lower_x(ctx, lower)
        return last.ham_associate.wedge(x).scale(sign * _sign_prod(lower))

    total = _dk_sum(ctx, hs, build)
    return None if total is None else total.scale(-bracket_prefactor(len(hs)))


def _wedge_sum(ctx: BracketContext, hs: list[HamiltonianForm]) -> MultiVec:
    """``c_k sum_{Sh(k-1,1)} e(s) X_sk ^ X_{D_{k-1}}``."""
    def build(lower, last, sign):
        return _need_x(last).wedge(_lower_x(ctx, lower)).scale(sign)

    return _dk_sum(ctx, hs, build).scale(bracket_prefactor(len(hs)))


def _d3_homog(ctx: BracketContext, hs: list[HamiltonianForm]) -> HamiltonianForm:
    def compute():
        value = _dk_value(ctx, hs)
        return ctx._finish(value, None, lambda: _dk_y(ctx, hs), "Y_D3")

    return ctx._memo((3,) + tuple(h.f for h in hs), compute)


def _dk_homog(ctx: BracketContext, hs: list[HamiltonianForm]) -> HamiltonianForm:
    k = len(hs)

    def compute():
        value = _dk_value(ctx, hs)
        return ctx._finish(value, None, lambda: _dk_y(ctx, hs), f"Y_D{k}")

    return ctx._memo((k,) + tuple(h.f for h in hs), compute)


def D3(ctx: BracketContext, f1: FormLike, f2: FormLike, f3: FormLike) -> HamiltonianForm:
    """``-1/2 sum_{Sh(2,1)} e(s) e(f_s1) e(f_s2) i_{X_D2(f_s1, f_s2)} f_s3``.

    The semi-associate of the value is solved; the associate comes from the
    explicit wedge formula and is checked by substitution.
    """
    return _multilinear(ctx, [f1, f2, f3], _d3_homog)


def Dk(ctx: BracketContext, forms: Sequence[FormLike]) -> HamiltonianForm:
    """``-sum_{Sh(k-1,1)} e(s) e(f_s1)..e(f_s(k-1)) i_{X_D(k-1)} f_sk`` for k >= 4."""
    if len(forms) < 4:
        raise ValueError("Dk is the inductive bracket for k >= 4")
    return _multilinear(ctx, list(forms), _dk_homog)


def bracket(ctx: BracketContext, forms: Sequence[FormLike]) -> HamiltonianForm:
    """D_k for ``k = len(forms)``."""
    k = len(forms)
    if k == 0:
        raise ValueError("brackets take at least one argument")
    if k == 1:
        return D1(ctx, forms[0])
    if k == 2:
        return D2(ctx, forms[0], forms[1])
    if k == 3:
        return D3(ctx, *forms)
    return Dk(ctx, forms)


# Explicit associate formulas.  They take homogeneous arguments and serve as
# oracles against the solver-produced associates.


def _ham_args(ctx: BracketContext, forms: Sequence[FormLike]) -> list[HamiltonianForm]:
    hs = _homogeneous_args(ctx, forms)
    for h in hs:
        _need_x(h)
        if h.ham_associate is None:
            raise UnsolvedArgument(f"{h.f} has no field with i_Y omega = -f")
    return hs


def jacobiator_associate(
    ctx: BracketContext,
    f1: FormLike,
    f2: FormLike,
    f3: FormLike,
    blocks: tuple[int, int] = (1, 2),
    factor: Fraction = Fraction(1),
) -> MultiVec:
    """``factor * sum_s e(s) e(f_s2) [[X_s3, X_s2], Y_s1]`` over shuffles of ``blocks``.

    With the defaults this solves ``i_Y omega = -J`` for the Jacobiator ``J``
    of :func:`jacobiator`.  Other index sets and factors are accepted so that
    alternative readings of the sum can be tested.
    """
    hs = _ham_args(ctx, [f1, f2, f3])
    degs = [h.degree for h in hs]
    total = MultiVec.zero(ctx.space.dim)
    for sh in enumerate_shuffles(blocks):
        a, b, c = (hs[t - 1] for t in sh.perm.images)
        term = schouten(schouten(c.semi_associate, b.semi_associate), a.ham_associate)
        total = total + term.scale(koszul_sign(sh.perm, degs) * b.sign())
    return total.scale(factor)


def _defect_associate(ctx: BracketContext, hs: list[HamiltonianForm]) -> MultiVec:
    if len(hs) == 3:
        return jacobiator_associate(ctx, *hs)
    yj = solve_hamiltonian(ctx.space, jacobi_defect(ctx, hs))
    if not yj.ok:
        raise BracketValueNotHamiltonian("the Jacobi defect admits no associated field")
    return yj.solution


def D3_semi_associate(ctx: BracketContext, f1: FormLike, f2: FormLike, f3: FormLike) -> MultiVec:
    """``1/2 sum_{Sh(2,1)} e(s) X_s3 ^ X_D2(f_s1, f_s2) + Y_J`` for the Jacobiator."""
    return Dk_semi_associate(ctx, [f1, f2, f3])


def D3_ham_associate(ctx: BracketContext, f1: FormLike, f2: FormLike, f3: FormLike) -> MultiVec:
    return Dk_ham_associate(ctx, [f1, f2, f3])


def Dk_ham_associate(ctx: BracketContext, forms: Sequence[FormLike]) -> MultiVec:
    return _dk_y(ctx, _ham_args(ctx, forms))


def jacobi_defect(ctx: BracketContext, forms: Sequence[FormLike]) -> DiffForm:
    """``sum_{i,j>1, i+j=k+1} sum_{Sh(j,k-j)} e(s) D_i(D_j(..), ..)``."""
    hs = [ctx.lift(f) for f in forms]
    k = len(hs)
    total = DiffForm.zero(ctx.space.dim)
    for term in _sh_terms(ctx, hs, k):
        i, j = term[0], term[1]
        if i > 1 and j > 1:
            total = total + term[3]
    return total


def Dk_semi_associate(ctx: BracketContext, forms: Sequence[FormLike]) -> MultiVec:
    """``c_k sum_{Sh(k-1,1)} e(s) X_sk ^ X_{D_(k-1)} + Y_J``.

    ``Y_J`` solves ``i_Y omega = -jacobi_defect`` (explicitly for k = 3).
    This is an associate for k = 3 and k = 4.  From k = 5 on the defect also
    contains terms ``D_i(D_i(..), ..)`` and the formula is off by their
    associate; use the solver there.
    """
    hs = _ham_args(ctx, forms)
    if len(hs) < 3:
        raise ValueError("the wedge formula is for k >= 3")
    return _wedge_sum(ctx, hs) + _defect_associate(ctx, hs)


# -- Jacobi identities ------------------------------------------------------------------


@dataclass
class JacobiReport:
    dimension: int
    lhs_total: DiffForm
    per_term: dict = field(default_factory=dict)
    anomaly: Optional[DiffForm] = None
    rhs_total: Optional[DiffForm] = None
    anomaly_closed: Optional[bool] = None
    anomaly_hamiltonian: Optional[bool] = None
    anomaly_associate_ok: Optional[bool] = None
    anomaly_witness: Optional[str] = None

    @property
    def is_zero(self) -> bool:
        return self.lhs_total.is_zero()

    @property
    def identity_holds(self) -> bool:
        """For the Jacobiator: left side equals right side."""
        if self.rhs_total is None:
            return self.is_zero
        return self.lhs_total == self.rhs_total


def _sh_terms(ctx: BracketContext, hs: list[HamiltonianForm], dim: int):
    degs = [h.degree for h in hs]
    for j in range(dim, 0, -1):
        i = dim + 1 - j
        for sh in enumerate_shuffles((j, dim - j)):
            idx = sh.perm.images
            inner = bracket(ctx, [hs[t - 1] for t in idx[:j]])
            rest = [hs[t - 1] for t in idx[j:]]
            if inner.f.is_zero():
                value = DiffForm.zero(ctx.space.dim)
            else:
                value = bracket(ctx, [inner] + rest).f
            yield i, j, idx, value.scale(koszul_sign(sh.perm, degs))


def _homogeneous_args(ctx: BracketContext, forms: Sequence[FormLike]) -> list[HamiltonianForm]:
    hs = [ctx.lift(f) for f in forms]
    for h in hs:
        if not h.f.is_zero() and h.degree is None:
            raise ValueError("Jacobi checks take homogeneous arguments")
    return hs


def sh_jacobi_check(ctx: BracketContext, forms: Sequence[FormLike]) -> JacobiReport:
    """Evaluate the dimension-``len(forms)`` strong homotopy Jacobi sum."""
    hs = _homogeneous_args(ctx, forms)
    dim = len(hs)
    report = JacobiReport(dim, DiffForm.zero(ctx.space.dim))
    if any(h.f.is_zero() for h in hs):
        return report
    for h in hs:
        _need_x(h)
    total = DiffForm.zero(ctx.space.dim)
    for i, j, idx, value in _sh_terms(ctx, hs, dim):
        report.per_term[(i, j, idx)] = value
        total = total + value
    report.lhs_total = total
    if dim == 3:
        anomaly = DiffForm.zero(ctx.space.dim)
        for (i, j, _), v in report.per_term.items():
            if i == 2 and j == 2:
                anomaly = anomaly + v
        report.anomaly = anomaly
    return report


def jacobiator(ctx: BracketContext, f1: FormLike, f2: FormLike, f3: FormLike) -> JacobiReport:
    """Jacobi expression of D_2 against the Lie-derivative formula for it.

    The left side nests D_2; the right side is
    ``-1/2 sum_{Sh(2,1)} e(s) e(f_s1) e(f_s2) L_{X_D2(f_s1,f_s2)} f_s3``.
    When all three arguments are Hamiltonian the explicit associate from
    :func:`jacobiator_associate` is checked as well.
    """
    hs = _homogeneous_args(ctx, [f1, f2, f3])
    dim = ctx.space.dim
    report = JacobiReport(3, DiffForm.zero(dim))
    if any(h.f.is_zero() for h in hs):
        report.rhs_total = DiffForm.zero(dim)
        report.anomaly = report.lhs_total
        return report
    degs = [h.degree for h in hs]
    lhs = DiffForm.zero(dim)
    rhs = DiffForm.zero(dim)
    for sh in enumerate_shuffles((2, 1)):
        idx = sh.perm.images
        a, b, c = (hs[t - 1] for t in idx)
        sign = koszul_sign(sh.perm, degs)
        inner = D2(ctx, a, b)
        term = D2(ctx, inner, c).f.scale(sign)
        report.per_term[(2, 2, idx)] = term
        lhs = lhs + term
        rhs = rhs + lie_derivative(_d2_x(a, b), c.f).scale(sign * a.sign() * b.sign())
    report.lhs_total = lhs
    report.rhs_total = rhs.scale(Fraction(-1, 2))
    report.anomaly = lhs
    report.anomaly_closed = exterior_derivative(lhs).is_zero()
    solved = solve_hamiltonian(ctx.space, lhs)
    report.anomaly_hamiltonian = solved.ok
    if not solved.ok:
        report.anomaly_witness = solved.witness.describe()
    if all(h.is_hamiltonian for h in hs):
        report.anomaly_associate_ok = is_ham_associate(ctx.space, lhs, jacobiator_associate(ctx, *hs))
    return report
