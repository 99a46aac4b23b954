"""Exact checks of gradient-product closure for polynomial invariants of
finite reflection groups."""

from .polycore import Polynomial, Space, U, X, exact_divide, parse_polynomial, render, substitute
from .forms import BilinearForm, CodomainMetric, gradient_product, laplacian
from .groups import FiniteMatrixGroup, LinearMap, generate_group, is_reflection, reynolds
from .catalog import InvariantSystem, build_system, list_systems
from .rewrite import express_in_basis
from .saito import VerificationReport, run_report

__all__ = [
    "BilinearForm", "CodomainMetric", "FiniteMatrixGroup", "InvariantSystem", "LinearMap",
    "Polynomial", "Space", "U", "VerificationReport", "X", "build_system", "exact_divide",
    "express_in_basis", "generate_group", "gradient_product", "is_reflection", "laplacian",
    "list_systems", "parse_polynomial", "render", "reynolds", "run_report", "substitute",
]
