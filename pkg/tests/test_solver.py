import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import polynomials
from nplectic.calculus import DiffForm, MultiVec, contraction, dx, exterior_derivative, vec
from nplectic.fixtures import random_tensor, space
from nplectic.poly import Polynomial
from nplectic.solver import (
    Degenerate,
    DegreeError,
    HamiltonianForm,
    NonConstantOmega,
    NotClosed,
    NotNPlecticFunction,
    NPlecticError,
    Status,
    classify,
    contraction_matrix,
    is_ham_associate,
    is_nplectic_function,
    is_semi_associate,
    kernel_basis,
    kernel_property_check,
    module_action,
    product_of_hamiltonian_functions,
    solve_hamiltonian,
    solve_semi_hamiltonian,
    validate_nplectic,
)

R6 = space("paper-R6")
x = [None] + [Polynomial.var(6, i) for i in range(1, 7)]


def test_validation_errors():
    with pytest.raises(NotClosed):
        validate_nplectic(3, 1, dx(3, 1, 2).scale(Polynomial.var(3, 3) + 0) + dx(3, 2, 3).scale(Polynomial.var(3, 1)))
    with pytest.raises(Degenerate) as err:
        validate_nplectic(3, 1, dx(3, 1, 2))
    assert contraction(err.value.kernel_vector, dx(3, 1, 2)).is_zero()
    with pytest.raises(NPlecticError):
        validate_nplectic(3, 1, dx(3, 1, 2, 3))
    with pytest.raises(NPlecticError):
        validate_nplectic(3, 3, dx(3, 1, 2, 3))


def test_polynomial_omega_checked_at_points():
    p = Polynomial.var(2, 1) ** 2 + 1
    sp = validate_nplectic(2, 1, dx(2, 1, 2).scale(p), sample_points=[(0, 0), (1, 2)])
    assert not sp.certified
    with pytest.raises(NPlecticError):
        validate_nplectic(2, 1, dx(2, 1, 2).scale(p))
    with pytest.raises(Degenerate):
        validate_nplectic(2, 1, dx(2, 1, 2).scale(Polynomial.var(2, 1)), sample_points=[(0, 1)])
    with pytest.raises(NonConstantOmega):
        kernel_basis(sp, 1)


def test_fixture_spaces_validate():
    for name in ("symplectic-R2", "volume-R3", "paper-R6", "darboux-R6"):
        sp = space(name)
        assert sp.certified and contraction_matrix(sp, 1).rank() == sp.dim
        assert kernel_basis(sp, 1) == []


def test_contraction_matrix_degree_range():
    with pytest.raises(DegreeError):
        contraction_matrix(R6, 5)


def _witness_is_certificate(sp, outcome, rhs):
    w = outcome.witness
    if w.monomial is None:
        return w.degree < 0
    cm = contraction_matrix(sp, w.degree)
    col_sums = [sum(w.combination.get(t, 0) * cm.matrix[i][c] for i, t in enumerate(cm.target_basis))
                for c in range(len(cm.source_basis))]
    combined = sum((rhs.coefficient(t).scale(v) for t, v in w.combination.items()), Polynomial.zero(sp.dim))
    return all(s == 0 for s in col_sums) and combined == w.residual and w.residual


def test_classification_of_worked_forms():
    f1 = dx(6, 5, 6).scale(x[4] - x[1] ** 2 * x[3])
    f3 = dx(6, 1, 2)
    h1 = classify(R6, f1)
    assert h1.status is Status.HAMILTONIAN and h1.degree == 1 and h1.sign() == -1
    h3 = classify(R6, f3)
    assert h3.status is Status.SEMI
    assert _witness_is_certificate(R6, solve_hamiltonian(R6, f3), -f3)
    assert "no field of tensor degree 2" in h3.ham_witness.describe()


@given(st.integers(0, 2**32), st.integers(0, 4))
def test_solutions_satisfy_their_equations(seed, r):
    rng = random.Random(seed)
    f = random_tensor(rng, DiffForm, 6, r, 2, 3)
    semi, ham = solve_semi_hamiltonian(R6, f), solve_hamiltonian(R6, f)
    if semi.ok:
        assert is_semi_associate(R6, f, semi.solution)
    else:
        assert _witness_is_certificate(R6, semi, -exterior_derivative(f))
    if ham.ok:
        assert is_ham_associate(R6, f, ham.solution)
    else:
        assert _witness_is_certificate(R6, ham, -f)


def test_degree_bound():
    # nothing of tensor degree above n + 1 pairs with omega
    f = dx(6, 1, 2, 3, 4, 5)
    out = solve_hamiltonian(R6, f)
    assert not out.ok and out.witness.monomial is None
    assert "can exist" in out.witness.describe()


def test_exact_forms_are_semi_hamiltonian():
    g = DiffForm(6, {(1,): x[2] * x[3]})
    assert classify(R6, exterior_derivative(g)).status is not Status.NEITHER


def test_kernel_basis_and_kernel_property():
    ker2 = kernel_basis(R6, 2)
    assert len(ker2) == 5
    for xi in ker2:
        assert contraction(xi, R6.omega).is_zero()
    f1 = classify(R6, dx(6, 5, 6).scale(x[4] - x[1] ** 2 * x[3]))
    assert kernel_property_check(R6, f1) == (True, None)
    ok, xi = kernel_property_check(R6, dx(6, 1, 2))
    assert not ok and contraction(xi, dx(6, 1, 2))


def test_nplectic_functions():
    vol = space("volume-R3")
    for g in (Polynomial.var(3, 1) ** 3, Polynomial.var(3, 2) * Polynomial.var(3, 3)):
        assert is_nplectic_function(vol, g)
    assert is_nplectic_function(R6, Polynomial.constant(6, 7))
    assert not is_nplectic_function(R6, x[1])
    with pytest.raises(NotNPlecticFunction):
        module_action(R6, x[1], classify(R6, dx(6, 5, 6)))


@given(polynomials(2, 3, 2), polynomials(2, 3, 2))
def test_product_of_hamiltonian_functions(p, q):
    sp = space("symplectic-R2")
    h1, h2 = classify(sp, DiffForm.function(p)), classify(sp, DiffForm.function(q))
    prod = product_of_hamiltonian_functions(sp, h1, h2)
    assert prod.f == DiffForm.function(p * q)
    assert is_semi_associate(sp, prod.f, prod.semi_associate)
    assert is_ham_associate(sp, prod.f, prod.ham_associate)


def test_product_rejects_forms():
    sp = space("symplectic-R2")
    h = classify(sp, dx(2, 1))
    with pytest.raises(DegreeError):
        product_of_hamiltonian_functions(sp, h, h)


def test_module_action_on_volume_form():
    vol = space("volume-R3")
    g = Polynomial.var(3, 1) ** 2
    h = classify(vol, dx(3, 1, 2).scale(Polynomial.var(3, 3)))
    out = module_action(vol, g, h)
    assert out.semi_sign in (1, -1)
    assert is_semi_associate(vol, out.result.f, out.result.semi_associate)
    assert is_ham_associate(vol, out.result.f, out.result.ham_associate)


def test_module_action_requires_hamiltonian():
    with pytest.raises(NPlecticError):
        module_action(R6, Polynomial.one(6), HamiltonianForm(dx(6, 1, 2), 3, MultiVec.zero(6)))


def test_symmetric_degree():
    assert R6.symmetric_degree(dx(6, 1)) == 2
    assert R6.symmetric_degree(dx(6, 1) + dx(6, 1, 2)) is None
    assert HamiltonianForm(dx(6, 1) + dx(6, 1, 2), 3).degree is None


def test_solution_is_unique_up_to_kernel():
    f = dx(6, 5, 6).scale(x[3] * x[4])
    y = solve_hamiltonian(R6, f).solution
    for xi in kernel_basis(R6, 2):
        assert is_ham_associate(R6, f, y + xi.scale(x[1]))
    assert not is_ham_associate(R6, f, y + vec(6, 5, 6))
