"""Identities of the multivector calculus, as exact yes/no checks.

Each function evaluates both sides of an identity on concrete inputs and
returns whether they agree.  They back the randomized suites in the CLI and
the test-suite.
"""
from __future__ import annotations

import itertools
from typing import Sequence

from .calculus import DiffForm, MultiVec, contraction, exterior_derivative, lie_derivative, schouten
from .graded import Permutation, koszul_sign


def _deg(t) -> int:
    r = t.tensor_degree()
    if r is None:
        raise ValueError("identity checks take homogeneous nonzero tensors")
    return r


def multi_rules(x: MultiVec, y: MultiVec, alpha: DiffForm) -> dict[str, bool]:
    """The four commutation rules between d, i, L and the Schouten bracket."""
    r, s = _deg(x), _deg(y)
    xy = schouten(x, y)
    return {
        "d L_X = (-1)^(r-1) L_X d": exterior_derivative(lie_derivative(x, alpha))
        == lie_derivative(x, exterior_derivative(alpha)).scale((-1) ** (r - 1)),
        "i_[X,Y] = (-1)^((r-1)s) L_X i_Y - i_Y L_X": contraction(xy, alpha)
        == lie_derivative(x, contraction(y, alpha)).scale((-1) ** ((r - 1) * s))
        - contraction(y, lie_derivative(x, alpha)),
        "L_[X,Y] = (-1)^((r-1)(s-1)) L_X L_Y - L_Y L_X": lie_derivative(xy, alpha)
        == lie_derivative(x, lie_derivative(y, alpha)).scale((-1) ** ((r - 1) * (s - 1)))
        - lie_derivative(y, lie_derivative(x, alpha)),
        "L_(X^Y) = (-1)^s i_Y L_X + L_Y i_X": lie_derivative(x.wedge(y), alpha)
        == contraction(y, lie_derivative(x, alpha)).scale((-1) ** s) + lie_derivative(y, contraction(x, alpha)),
    }


def schouten_antisymmetry(x: MultiVec, y: MultiVec) -> bool:
    """``[X, Y] = -(-1)^((r-1)(s-1)) [Y, X]``."""
    r, s = _deg(x), _deg(y)
    return schouten(x, y) == schouten(y, x).scale(-((-1) ** ((r - 1) * (s - 1))))


def schouten_leibniz(x: MultiVec, y: MultiVec, z: MultiVec) -> bool:
    """``[X, Y^Z] = [X, Y]^Z + (-1)^((r-1)s) Y^[X, Z]``."""
    r, s = _deg(x), _deg(y)
    lhs = schouten(x, y.wedge(z))
    rhs = schouten(x, y).wedge(z) + y.wedge(schouten(x, z)).scale((-1) ** ((r - 1) * s))
    return lhs == rhs


def schouten_jacobi_sum(x: MultiVec, y: MultiVec, z: MultiVec) -> MultiVec:
    """``sum_{Sh(2,1)} sgn(s) e(s; r-1) [[X_s1, X_s2], X_s3]`` with shifted degrees.

    The Schouten bracket is a graded Lie bracket for the degrees shifted by
    one; written with unshifted Koszul signs this is the alternating sum.
    """
    fields = (x, y, z)
    shifted = [_deg(t) - 1 for t in fields]
    total = MultiVec.zero(x.dim)
    for images in ((1, 2, 3), (1, 3, 2), (2, 3, 1)):
        s = Permutation(images)
        a, b, c = (fields[i - 1] for i in images)
        sign = s.parity() * koszul_sign(s, shifted)
        total = total + schouten(schouten(a, b), c).scale(sign)
    return total


def schouten_jacobi(x: MultiVec, y: MultiVec, z: MultiVec) -> bool:
    return schouten_jacobi_sum(x, y, z).is_zero()


def contraction_composition(vectors: Sequence[MultiVec], alpha: DiffForm) -> bool:
    """``i_{X1^...^Xr} alpha = i_Xr ... i_X1 alpha`` for vector fields ``Xi``."""
    if not vectors:
        raise ValueError("need at least one vector field")
    for v in vectors:
        if _deg(v) != 1:
            raise ValueError("contraction composition is stated for vector fields")
    wedge = vectors[0]
    for v in vectors[1:]:
        wedge = wedge.wedge(v)
    step = alpha
    for v in vectors:
        step = contraction(v, step)
    return contraction(wedge, alpha) == step


def dd_zero(alpha: DiffForm) -> bool:
    return exterior_derivative(exterior_derivative(alpha)).is_zero()


def cocycle_rule(s: Permutation, t: Permutation, degrees: Sequence[int]) -> bool:
    """``e(ts; v) = e(t; v_s1..v_sk) e(s; v)`` for the composite ``t*s``."""
    return koszul_sign(t * s, degrees) == koszul_sign(t, s.apply(degrees)) * koszul_sign(s, degrees)


def exhaustive_cocycle(k: int, max_degree: int = 2) -> tuple[int, int]:
    """Check the cocycle rule on all ``s, t`` in ``S_k`` and all degree lists.

    Returns ``(checked, failures)``.
    """
    perms = [Permutation(p) for p in itertools.permutations(range(1, k + 1))]
    checked = failures = 0
    for degrees in itertools.product(range(max_degree + 1), repeat=k):
        for s in perms:
            for t in perms:
                checked += 1
                failures += not cocycle_rule(s, t, degrees)
    return checked, failures
