"""Finite groups, exact integer matrices and group presentations."""

from __future__ import annotations

from .groups import (
    DEFAULT_CLOSURE_CAP,
    FiniteGroup,
    cyclic_group,
    dihedral_group,
    find_isomorphism,
    general_linear_group,
    group_from_permutations,
    group_from_table,
    is_subgroup,
    left_cosets,
    right_cosets,
    subgroup_as_group,
    subgroup_closure,
    symmetric_group,
    trivial_group,
)
from .presentations import (
    AbelianInvariants,
    GroupPresentation,
    TietzeResult,
    abelianization,
    direct_sum,
    free_reduce,
    tietze_reduce,
    tietze_simplify,
)
from .smith import (
    IntMatrix,
    SmithDecomposition,
    invariant_factors,
    is_smith_chain,
    smith_normal_form,
    sparse_invariant_factors,
)

__all__ = [
    "AbelianInvariants",
    "DEFAULT_CLOSURE_CAP",
    "FiniteGroup",
    "GroupPresentation",
    "IntMatrix",
    "SmithDecomposition",
    "TietzeResult",
    "abelianization",
    "cyclic_group",
    "dihedral_group",
    "direct_sum",
    "find_isomorphism",
    "free_reduce",
    "general_linear_group",
    "group_from_permutations",
    "group_from_table",
    "invariant_factors",
    "is_smith_chain",
    "is_subgroup",
    "left_cosets",
    "right_cosets",
    "smith_normal_form",
    "sparse_invariant_factors",
    "subgroup_as_group",
    "subgroup_closure",
    "symmetric_group",
    "tietze_reduce",
    "tietze_simplify",
    "trivial_group",
]
