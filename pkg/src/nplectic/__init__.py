"""Exact n-plectic geometry on coordinate spaces and its bracket tower."""
from .brackets import (
    BracketContext,
    BracketValueNotHamiltonian,
    D1,
    D2,
    D3,
    Dk,
    JacobiReport,
    UnsolvedArgument,
    bracket,
    jacobiator,
    sh_jacobi_check,
)
from .calculus import DiffForm, MultiVec, contraction, exterior_derivative, lie_derivative, schouten
from .graded import BlockShuffle, Permutation, enumerate_shuffles, koszul_sign
from .poly import Polynomial
from .solver import HamiltonianForm, NPlecticSpace, classify, validate_nplectic

__all__ = [
    "BlockShuffle",
    "BracketContext",
    "BracketValueNotHamiltonian",
    "D1",
    "D2",
    "D3",
    "DiffForm",
    "Dk",
    "HamiltonianForm",
    "JacobiReport",
    "MultiVec",
    "NPlecticSpace",
    "Permutation",
    "Polynomial",
    "UnsolvedArgument",
    "bracket",
    "classify",
    "contraction",
    "enumerate_shuffles",
    "exterior_derivative",
    "jacobiator",
    "koszul_sign",
    "lie_derivative",
    "schouten",
    "sh_jacobi_check",
    "validate_nplectic",
]
