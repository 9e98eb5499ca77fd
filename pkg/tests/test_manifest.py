from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import tensors
from nplectic.calculus import DiffForm, MultiVec, dx, render_tensor, vec
from nplectic.manifest import MAX_EXPONENT, Check, ManifestError, parse_field, parse_form, parse_manifest
from nplectic.poly import Polynomial


def example_text(name="paper_example.nplx"):
    return resources.files("nplectic").joinpath("data", name).read_text()


def test_parse_bundled_example():
    m = parse_manifest(example_text())
    assert (m.dim, m.plectic_degree) == (6, 3)
    assert m.omega == dx(6, 1, 3, 5, 6) + dx(6, 2, 4, 5, 6)
    x = [None] + [Polynomial.var(6, i) for i in range(1, 7)]
    assert m.forms["f1"] == dx(6, 5, 6).scale(x[4] - x[1] ** 2 * x[3])
    assert m.fields["X2"] == -vec(6, 1) - vec(6, 2).scale(x[2] ** 2) + vec(6, 4).scale((x[2] * x[4]).scale(2))
    assert Check("bracket", (2, ("f1", "f2"))) in m.checks
    assert [c.kind for c in m.checks].count("kernel") == 2


def test_render_round_trip():
    m = parse_manifest(example_text())
    again = parse_manifest(m.render())
    assert again.render() == m.render()
    assert again.forms == m.forms and again.fields == m.fields and again.checks == m.checks


@given(st.integers(0, 4).flatmap(lambda r: tensors(DiffForm, 4, r)))
def test_form_round_trip(f):
    assert parse_form(render_tensor(f), 4) == f


@given(st.integers(0, 4).flatmap(lambda r: tensors(MultiVec, 4, r)))
def test_field_round_trip(x):
    assert parse_field(render_tensor(x), 4) == x


@pytest.mark.parametrize(
    "text, expected",
    [
        ("x1 dx2 + 2 dx1^dx3", dx(3, 2).scale(Polynomial.var(3, 1)) + dx(3, 1, 3).scale(2)),
        ("(x1 + 1/2)*dx1", dx(3, 1).scale(Polynomial.var(3, 1) + Polynomial.constant(3, Fraction(1, 2)))),
        ("x1*x2", DiffForm.function(Polynomial.var(3, 1) * Polynomial.var(3, 2))),
        ("dx2^dx1", -dx(3, 1, 2)),
        ("-(x3^2) dx1", dx(3, 1).scale(-(Polynomial.var(3, 3) ** 2))),
    ],
)
def test_expression_grammar(text, expected):
    assert parse_form(text, 3) == expected


HEADER = "manifold R3 plectic 1\nomega: dx1^dx2\n"


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("", 1, 1),
        ("manifold R3\n", 1, 1),
        (HEADER + "form f: x4 dx1\n", 3, 9),
        (HEADER + "form f: x1 $ dx1\n", 3, 12),
        (HEADER + "check classify g\n", 3, 1),
        (HEADER + "check frobnicate f\n", 3, 7),
        (HEADER + "form f: dx1\nform f: dx2\n", 4, 6),
        (HEADER + "form x1: dx1\n", 3, 6),
        (HEADER + "omega: dx1^dx3\n", 3, 1),
        (HEADER + "form f: dx1\ncheck bracket D2(f)\n", 4, 15),
        (HEADER + "form f: dx1\ncheck jacobi 2 (f)\n", 4, 14),
        (HEADER + "form f: dx1\ncheck classify f extra\n", 4, 18),
        (HEADER + f"form f: x1^{MAX_EXPONENT + 1} dx1\n", 3, 12),
        (HEADER + "wibble\n", 3, 1),
    ],
)
def test_errors_carry_positions(text, line, col):
    with pytest.raises(ManifestError) as err:
        parse_manifest(text)
    assert (err.value.line, err.value.column) == (line, col), str(err.value)


def test_repeated_basis_index_is_zero():
    assert parse_form("x1 dx1^dx1", 3).is_zero()
    with pytest.raises(ManifestError):
        parse_form("x1 x2", 3)


def test_comments_and_blank_lines():
    m = parse_manifest("# hello\n\n" + HEADER + "form f: dx1  # trailing\ncheck classify f\n")
    assert m.forms["f"] == dx(3, 1) and m.checks == [Check("classify", ("f",))]
