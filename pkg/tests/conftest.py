import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from nplectic.calculus import DiffForm, MultiVec, basis_indices
from nplectic.poly import Polynomial

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def polynomials(dim: int, max_terms: int = 4, max_exp: int = 2):
    mono = st.tuples(*[st.integers(0, max_exp)] * dim)
    coef = st.fractions(min_value=-5, max_value=5, max_denominator=3)
    return st.dictionaries(mono, coef, max_size=max_terms).map(lambda t: Polynomial(dim, t))


def tensors(cls, dim: int, degree: int, max_comps: int = 3):
    idx = basis_indices(dim, degree)
    return st.dictionaries(st.sampled_from(idx), polynomials(dim, 3, 2), max_size=max_comps).map(
        lambda c: cls(dim, c)
    )


def nonzero_tensors(cls, dim: int, degree: int):
    return tensors(cls, dim, degree).filter(lambda t: not t.is_zero())


@st.composite
def homogeneous(draw, cls, dim: int, lo: int = 0, hi: int = 4):
    degree = draw(st.integers(lo, min(hi, dim)))
    return draw(nonzero_tensors(cls, dim, degree))


def rng(seed: int) -> random.Random:
    return random.Random(seed)


__all__ = ["DiffForm", "MultiVec", "homogeneous", "nonzero_tensors", "polynomials", "rng", "tensors"]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
