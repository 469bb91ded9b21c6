"""Exact symbolic calculus for skew/Lie algebroids, modular classes,
Courant structures presented by cubic Hamiltonians, and Dirac frames."""

from .algebroid import (
    AlgebroidMorphism,
    SkewAlgebroid,
    bracket_sections,
    conjugate_frame,
    interior_product,
    is_lie,
    is_morphism,
    lie_derivative_form,
    pullback,
    schouten,
)
from .courant import (
    BidegreeParts,
    Hamiltonian,
    Projection,
    SymplecticSpace2,
    algebroid_hamiltonian,
    anchor_apply,
    bidegree_split,
    derived_bracket,
    hamiltonian_square,
    is_projectable,
    poisson_bracket,
    project_to_E,
    split_space,
    standard_hamiltonian,
)
from .dirac import (
    Bivector,
    DiracFrame,
    TwistedStructure,
    gauge_transform,
    graph_frame,
    induced_algebroid,
    quasi_poisson_check,
    relative_modular_class,
    sharp_substitution,
    solve_twist,
    twisted_bracket,
    twisted_hamiltonian,
    verify_morphism_cor53,
)
from .errors import DiracClosureError, InternalConsistencyError
from .modular import (
    Cocycle1,
    characteristic_form,
    d_of_function,
    is_exact,
    modular_class_of_morphism,
    modular_cocycle,
)
from .scalar import BaseChart, ParseError, ScalarField, parse_scalar
from .superalg import (
    GeneratorTable,
    SuperPoly,
    SuperVectorField,
    commutator,
    divergence,
    gauge_divergence,
    parse_super,
    transport,
)

__all__ = [
    "AlgebroidMorphism",
    "BaseChart",
    "BidegreeParts",
    "Bivector",
    "Cocycle1",
    "DiracClosureError",
    "DiracFrame",
    "GeneratorTable",
    "Hamiltonian",
    "InternalConsistencyError",
    "ParseError",
    "Projection",
    "ScalarField",
    "SkewAlgebroid",
    "SuperPoly",
    "SuperVectorField",
    "SymplecticSpace2",
    "TwistedStructure",
    "algebroid_hamiltonian",
    "anchor_apply",
    "bidegree_split",
    "bracket_sections",
    "characteristic_form",
    "commutator",
    "conjugate_frame",
    "d_of_function",
    "derived_bracket",
    "divergence",
    "gauge_divergence",
    "gauge_transform",
    "graph_frame",
    "hamiltonian_square",
    "induced_algebroid",
    "interior_product",
    "is_exact",
    "is_lie",
    "is_morphism",
    "is_projectable",
    "lie_derivative_form",
    "modular_class_of_morphism",
    "modular_cocycle",
    "parse_scalar",
    "parse_super",
    "poisson_bracket",
    "project_to_E",
    "pullback",
    "quasi_poisson_check",
    "relative_modular_class",
    "schouten",
    "sharp_substitution",
    "solve_twist",
    "split_space",
    "standard_hamiltonian",
    "transport",
    "twisted_bracket",
    "twisted_hamiltonian",
    "verify_morphism_cor53",
]
