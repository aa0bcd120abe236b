"""Groupoid atlases: data model, constructors, transforms and morphisms."""

from __future__ import annotations

from .constructors import (
    closed_subsets,
    explicit_atlas,
    from_global_action,
    from_simplicial_complex,
    from_single_groupoid,
    gl_atlas,
    sphere,
)
from .model import (
    Atlas,
    PredicateReport,
    ValidationReport,
    Violation,
    frame_index_sets,
    initial_element,
    is_irreducible,
    predicates,
    require_valid,
    transitive_closure,
    validate_atlas,
)
from .morphisms import (
    AtlasMorphism,
    compose,
    constant_morphism,
    corestriction_chain_ok,
    identity_morphism,
    is_corestriction,
    is_morphism,
    same_morphism,
    validate_morphism,
)
from .transforms import (
    Dedupe,
    Irreducibilization,
    Regularization,
    dedupe_paired_indices,
    factor_through_irreducible,
    irreducibilize,
    regular_retraction,
    regularize,
)

__all__ = [
    "Atlas",
    "AtlasMorphism",
    "Dedupe",
    "Irreducibilization",
    "PredicateReport",
    "Regularization",
    "ValidationReport",
    "Violation",
    "closed_subsets",
    "compose",
    "constant_morphism",
    "corestriction_chain_ok",
    "dedupe_paired_indices",
    "explicit_atlas",
    "factor_through_irreducible",
    "frame_index_sets",
    "from_global_action",
    "from_simplicial_complex",
    "from_single_groupoid",
    "gl_atlas",
    "identity_morphism",
    "initial_element",
    "irreducibilize",
    "is_corestriction",
    "is_irreducible",
    "is_morphism",
    "predicates",
    "regular_retraction",
    "regularize",
    "require_valid",
    "same_morphism",
    "sphere",
    "transitive_closure",
    "validate_atlas",
    "validate_morphism",
]
