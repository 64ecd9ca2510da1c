"""Generalized lambda functions of level N: exact q-series, integrality and CM checks."""

from .cm import CMPoint, cm_certify
from .cyclotomic import CycNum
from .eisenstein import IndexPair, e_diff_series, e_series, theta_leading
from .lambdas import BasisPair, c_constant, decompose_basis, lambda_composed, lambda_k_series
from .modpoly import PsiPoly, psi_poly
from .qseries import QSeries
from .sl2 import SL2Mat

__all__ = [
    "BasisPair",
    "CMPoint",
    "CycNum",
    "IndexPair",
    "PsiPoly",
    "QSeries",
    "SL2Mat",
    "c_constant",
    "cm_certify",
    "decompose_basis",
    "e_diff_series",
    "e_series",
    "lambda_composed",
    "lambda_k_series",
    "psi_poly",
    "theta_leading",
]

__version__ = "0.1.0"
