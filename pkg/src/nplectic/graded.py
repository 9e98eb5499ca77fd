"""Permutations, block shuffles and Koszul signs.

Permutations use one-line notation with 1-based images, so ``(2, 3, 1)``
reorders a sequence ``(v1, v2, v3)`` into ``(v2, v3, v1)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence


class ArityError(ValueError):
    """Permutation and degree list have different lengths."""


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(1, k + 1)))

    def __len__(self) -> int:
        return len(self.images)

    def __getitem__(self, i: int) -> int:
        """Image of position ``i`` (1-based)."""
        return self.images[i - 1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.images)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for pos, img in enumerate(self.images, start=1):
            inv[img - 1] = pos
        return Permutation(tuple(inv))

    def __mul__(self, other: "Permutation") -> "Permutation":
        """The product ``self * other`` acting on sequences as ``other`` first.

        Reordering ``v`` by ``other`` and then by ``self`` equals reordering
        ``v`` by ``self * other``; its images are ``other[self[i]]``.
        """
        if len(self) != len(other):
            raise ArityError("cannot compose permutations of different size")
        return Permutation(tuple(other[i] for i in self.images))

    def apply(self, seq: Sequence):
        """Return ``(seq[s1], ..., seq[sk])``."""
        if len(seq) != len(self.images):
            raise ArityError(f"sequence of length {len(seq)} for permutation of size {len(self)}")
        return tuple(seq[i - 1] for i in self.images)

    def parity(self) -> int:
        inversions = sum(
            1 for a, b in itertools.combinations(self.images, 2) if a > b
        )
        return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class BlockShuffle:
    blocks: tuple[int, ...]
    perm: Permutation

    def __post_init__(self) -> None:
        if sum(self.blocks) != len(self.perm):
            raise ValueError("block sizes do not add up to the permutation size")
        start = 0
        for size in self.blocks:
            chunk = self.perm.images[start:start + size]
            if any(a >= b for a, b in zip(chunk, chunk[1:])):
                raise ValueError(f"{self.perm.images} is not increasing on block {chunk}")
            start += size

    def block(self, index: int) -> tuple[int, ...]:
        """Images of the ``index``-th block (0-based)."""
        start = sum(self.blocks[:index])
        return self.perm.images[start:start + self.blocks[index]]


def enumerate_shuffles(blocks: Sequence[int]) -> list[BlockShuffle]:
    """All permutations increasing within each block, in lexicographic order."""
    blocks = tuple(int(b) for b in blocks)
    if any(b < 0 for b in blocks):
        raise ValueError(f"negative block size in {blocks}")
    total = sum(blocks)
    if total < 1:
        raise ValueError("shuffles need at least one element")

    out: list[tuple[int, ...]] = []

    def rec(remaining: frozenset, i: int, acc: tuple[int, ...]) -> None:
        if i == len(blocks):
            out.append(acc)
            return
        for chosen in itertools.combinations(sorted(remaining), blocks[i]):
            rec(remaining.difference(chosen), i + 1, acc + chosen)

    rec(frozenset(range(1, total + 1)), 0, ())
    out.sort()
    return [BlockShuffle(blocks, Permutation(images)) for images in out]


def sign_e(deg: int) -> int:
    return -1 if deg % 2 else 1


def sign_e2(deg1: int, deg2: int) -> int:
    return -1 if (deg1 * deg2) % 2 else 1


def koszul_sign(s: Permutation, degrees: Sequence[int]) -> int:
    """Koszul sign e(s; v_1..v_k) for homogeneous v_i of the given degrees.

    Defined by ``v_1 (x) ... (x) v_k = e(s) v_{s1} (x) ... (x) v_{sk}``: every
    pair that ``s`` puts out of order contributes ``(-1)^(deg_a * deg_b)``.
    """
    degrees = tuple(degrees)
    if len(degrees) != len(s):
        raise ArityError(f"{len(degrees)} degrees for a permutation of size {len(s)}")
    if any(d is None for d in degrees):
        raise ValueError("Koszul sign requested for a non-homogeneous element")
    odd = [i for i in s.images if degrees[i - 1] % 2]
    parity = sum(1 for a, b in itertools.combinations(odd, 2) if a > b)
    return -1 if parity % 2 else 1


def koszul_sign_by_transpositions(s: Permutation, degrees: Sequence[int]) -> int:
    """Reference Koszul sign built from adjacent transpositions (bubble sort).

    Each swap of neighbouring entries of degrees a and b contributes
    ``(-1)^(a*b)``; used as an oracle for :func:`koszul_sign`.
    """
    degrees = tuple(degrees)
    if len(degrees) != len(s):
        raise ArityError(f"{len(degrees)} degrees for a permutation of size {len(s)}")
    seq = list(s.images)
    sign = 1
    changed = True
    while changed:
        changed = False
        for j in range(len(seq) - 1):
            if seq[j] > seq[j + 1]:
                sign *= sign_e2(degrees[seq[j] - 1], degrees[seq[j + 1] - 1])
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                changed = True
    return sign
