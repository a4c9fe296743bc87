"""Correction polynomials for the product formula of k-th regularized Fredholm
determinants: exact free-algebra derivation and numerical checks on matrices."""

from .correction import (
    CorrectionSet,
    coefficient_norm_bound,
    derive,
    trace_correction,
    verify_decomposition,
    verify_lemma_membership,
    x_poly,
    y_poly,
    z_closed,
    z_partition,
)
from .matnum import eig_small, lu_det, mat_exp, regularized_det, regularized_det_spectral
from .ncpoly import NcPoly, canonical_rotation, is_commutator_member, trace_normal_form
from .verify import commutation_check, eval_poly, product_formula_check, sample_matrix

__version__ = "0.1.0"
