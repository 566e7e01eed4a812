"""Higher Franz-Reidemeister and complex torsion: exact calculators and checks."""

from .charclass import (
    BundleModel,
    RingClass,
    RingSpec,
    chern_character_component,
    half_ch_complexification,
    hom_end_bundle,
    newton_polynomial,
    ring_arith,
)
from .polylog import PolylogValue, RootOfUnity, polylog_L, riemann_zeta_odd, verify_distribution
from .torsion import (
    MorseSection,
    MorseSectionData,
    TorsionClass,
    boundary_corrected_complex_torsion,
    complex_framing_pushdown,
    complex_torsion_closed,
    framing_correction,
    real_even_closed,
    torsion_circle_bundle,
    torsion_combinators,
    torsion_lens_bundle,
    torsion_lens_via_splitting,
    torsion_sphere_bundle,
    unoriented_relations,
    verify_complex_transfer,
)
from .twisted import (
    DeltaFamily,
    GradedPoset,
    SimplicialBase,
    TwistedCochain,
    TwistedTensorProduct,
    UTEndomorphism,
    homology_ranks,
    kill_cross_term,
    split_sum,
    suspend,
    total_complex,
    validate_twisted,
)
from .kamber_tondeur import (
    KTValue,
    MatrixFamily,
    QuadratureSpec,
    catalog_family,
    kt_cochain,
    kt_direct_sum_check,
    kt_involution_check,
    kt_unitary_invariance_check,
)
from .transfer import (
    CoveringMap,
    GradedSheets,
    SimplicialCochain,
    covering_from_cyclic_action,
    euler_multiplication_check,
    pushdown_alternating,
    transfer_cochain,
    transfer_expansion_kt,
)

__version__ = "0.1.0"
