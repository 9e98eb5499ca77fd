from fractions import Fraction

import sympy
from hypothesis import given
from hypothesis import strategies as st

from nplectic.linalg import LinearSolver, nullspace, rref

entries = st.fractions(-4, 4, max_denominator=3)


@st.composite
def matrices(draw):
    m, n = draw(st.integers(1, 5)), draw(st.integers(1, 5))
    return [[draw(entries) for _ in range(n)] for _ in range(m)]


def mul(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


@given(matrices())
def test_rref_matches_sympy(a):
    r, e, pivots = rref(a)
    expected, exp_pivots = sympy.Matrix(a).rref()
    assert list(pivots) == list(exp_pivots)
    assert sympy.Matrix(r) == expected
    assert sympy.Matrix(e) * sympy.Matrix(a) == expected


@given(matrices())
def test_nullspace_dimension_and_kernel(a):
    ns = nullspace(a)
    assert len(ns) == len(a[0]) - sympy.Matrix(a).rank()
    for v in ns:
        assert all(x == 0 for x in mul(a, v))
    if ns:
        assert sympy.Matrix(ns).rank() == len(ns)


@given(matrices(), st.data())
def test_solver_solves_consistent_and_certifies_inconsistent(a, data):
    n = len(a[0])
    solver = LinearSolver(a, n)
    x0 = [data.draw(entries) for _ in range(n)]
    b = mul(a, x0)
    x, witness = solver.solve(b, Fraction(0))
    assert witness is None and mul(a, x) == b
    b2 = [bi + data.draw(entries) for bi in b]
    x, witness = solver.solve(b2, Fraction(0))
    if x is None:
        _, combo, residual = witness
        assert residual != 0
        assert all(sum(c * a[i][j] for i, c in combo.items()) == 0 for j in range(n))
        assert sum(c * b2[i] for i, c in combo.items()) == residual
    else:
        assert mul(a, x) == b2


def test_empty_matrix_nullspace():
    assert nullspace([], 2) == [[1, 0], [0, 1]]
