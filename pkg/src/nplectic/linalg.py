"""Exact Gauss-Jordan elimination over the rationals.

Matrices are lists of rows of :class:`~fractions.Fraction`.  The solver keeps
the left transform ``E`` with ``E @ A = rref(A)`` so that many right-hand
sides, including polynomial ones, can be solved against one elimination.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence


def rref(a: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[list[Fraction]], list[int]]:
    """Reduced row echelon form ``R`` of ``a`` with transform ``E`` and pivot columns."""
    m = len(a)
    ncols = len(a[0]) if m else 0
    r = [[Fraction(v) for v in row] for row in a]
    e = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, m) if r[i][col]), None)
        if piv is None:
            continue
        r[row], r[piv] = r[piv], r[row]
        e[row], e[piv] = e[piv], e[row]
        inv = 1 / r[row][col]
        r[row] = [v * inv for v in r[row]]
        e[row] = [v * inv for v in e[row]]
        for i in range(m):
            if i != row and r[i][col]:
                c = r[i][col]
                r[i] = [vi - c * vr for vi, vr in zip(r[i], r[row])]
                e[i] = [vi - c * vr for vi, vr in zip(e[i], e[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    return r, e, pivots


def nullspace(a: Sequence[Sequence[Fraction]], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{x : a x = 0}``, one vector per free column."""
    if ncols is None:
        ncols = len(a[0]) if a else 0
    if not a:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    r, _, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, pcol in enumerate(pivots):
            v[pcol] = -r[i][fcol]
        basis.append(v)
    return basis


@dataclass
class LinearSolver:
    """Solve ``A x = b`` for a fixed rational ``A`` and arbitrary ``b``.

    ``b`` entries may be any ring elements supporting ``+`` and scalar ``*``
    (fractions or polynomials).  The returned solution has zero entries on
    the free (non-pivot) columns.
    """

    matrix: list[list[Fraction]]
    ncols: int
    transform: list[list[tuple[int, Fraction]]] = field(init=False)
    pivots: list[int] = field(init=False)

    def __post_init__(self) -> None:
        if self.matrix:
            _, e, self.pivots = rref(self.matrix)
        else:
            e, self.pivots = [], []
        self.transform = [[(j, v) for j, v in enumerate(row) if v] for row in e]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def nullity(self) -> int:
        return self.ncols - self.rank

    def _combine(self, row, b, zero):
        acc = zero
        for j, v in row:
            if b[j]:
                acc = acc + b[j] * v
        return acc

    def solve(self, b: Sequence, zero):
        """Return ``(x, None)`` or ``(None, (row_index, combination, residual))``.

        For an inconsistent system the witness is a row combination ``c`` with
        ``c A = 0`` but ``c b = residual != 0``.
        """
        if len(b) != len(self.matrix):
            raise ValueError(f"right-hand side of length {len(b)} for {len(self.matrix)} rows")
        for i in range(self.rank, len(self.transform)):
            val = self._combine(self.transform[i], b, zero)
            if val:
                return None, (i, dict(self.transform[i]), val)
        x = [zero] * self.ncols
        for i, col in enumerate(self.pivots):
            x[col] = self._combine(self.transform[i], b, zero)
        return x, None
