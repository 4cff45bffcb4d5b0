"""Finite computational engine for nonabelian Cech cohomology.

Cocycle data lives on the nerves of finite covers and takes values in
crossed modules and 2-crossed modules of finite groups.  Everything is
tabulated and every law is checked exhaustively, so the package doubles as
an executable verifier for the algebra it implements.
"""

from .report import (
    Failure,
    InvariantViolation,
    ResourceBudgetError,
    StructuralError,
    UnsupportedOperation,
    ValidationReport,
)
from .groups import (
    FiniteGroup,
    GroupAction,
    GroupHom,
    Subgroup,
    action_verify,
    alternating_subgroup,
    conjugation_action,
    cyclic,
    dihedral,
    direct_product,
    hom_verify,
    identity_hom,
    image,
    is_normal,
    kernel,
    klein_four,
    quaternion8,
    quotient,
    subgroup_closure,
    symmetric,
    trivial_action,
    trivial_group,
    verify_group,
)
from .nerves import (
    Nerve,
    NerveMap,
    full_simplex,
    hexagon,
    hexagon_to_triangle,
    nerve_map_verify,
    nerve_verify,
    simplex_boundary,
    triangle,
)
from .crossed import (
    CrossedModule,
    CrossedModuleMorphism,
    TwoCrossedModule,
    TwoCrossedModuleMorphism,
    cm_morphism_verify,
    cm_verify,
    derived_crossed_module,
    gray_compose,
    identity_cm_morphism,
    identity_tcm_morphism,
    peiffer_commutator,
    tcm_derived_action,
    tcm_induced_quotient_cm,
    tcm_morphism_verify,
    tcm_verify,
    two_group_compose_horizontal,
    two_group_compose_vertical,
)
from .standard import (
    central_quotient_cm,
    commutator_tcm,
    conjugation_cm,
    forced_chain_tcm,
    forced_pairing_tcm,
    group_cm,
    inclusion_cm,
    inclusion_tcm,
    module_cm,
    module_tcm,
    tcm_direct_product,
)
from .cocycles import (
    AbelianObstruction,
    Bundle1Cocycle,
    Coboundary1,
    Coboundary2,
    Coboundary3,
    Gerbe2Cocycle,
    TcmCoboundary2,
    TcmGerbe2Cocycle,
    TwoGerbe3Cocycle,
    apply_coboundary,
    change_structure,
    constant_bundle1,
    constant_cocycle,
    constant_gerbe2,
    constant_two_gerbe3,
    inverse,
    product,
    pullback,
    verify,
)
from .classify import (
    ClassTable,
    EquivalenceWitness,
    class_of,
    enumerate_classes,
    enumerate_cocycles,
    equivalence_search_size,
    equivalent,
    search_budget,
)
from .lifting import (
    ExtensionContext,
    LiftContext,
    TwistContext,
    compute_obstruction,
    lift_bundle_to_gerbe,
    lift_bundle_to_two_gerbe,
    lift_function_to_bundle,
    lift_to_tcm_gerbe,
    obstruction_is_trivial,
    twist_by_abelian_gerbe,
    twisted_gerbe,
)
from .documents import (
    Document,
    from_document,
    load,
    parse,
    save,
    serialize,
    to_document,
)
from .cli import run_cli
from . import formulas

__all__ = [name for name in dir() if not name.startswith("_")]
