"""Degeneracy and sufficient-condition audits of parallel-MAC games."""

from .models import DEFAULT_COND_TOL, DEFAULT_RANK_TOL, ConditionReport
from .spectral import spectral_lower_bound, spectral_radius
from .degeneracy import constraint_matrix, degeneracy_index, degenerate_directions
from .conditions import c2_min_eigenvalue, check_conditions, s_alpha_matrix, s_max_matrix

__all__ = [
    "DEFAULT_COND_TOL",
    "DEFAULT_RANK_TOL",
    "ConditionReport",
    "spectral_lower_bound",
    "spectral_radius",
    "constraint_matrix",
    "degeneracy_index",
    "degenerate_directions",
    "c2_min_eigenvalue",
    "check_conditions",
    "s_alpha_matrix",
    "s_max_matrix",
]
