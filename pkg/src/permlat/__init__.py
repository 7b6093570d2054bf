"""permlat: exact arithmetic for p-adic lattices with finite p-group action.

Builds p-groups as explicit multiplication tables, represents G-lattices
over Z_p and finite G-modules over Z/p^k exactly, decides whether a
lattice is a permutation module (directly, by certified Krull-Schmidt
recognition at Maranda precision, and through the quotient-level
characterization), and emits machine-checkable certificates for every
verdict.
"""

from .errors import (
    BadModulus,
    CapExceeded,
    CertificationFailed,
    CrossCheckMismatch,
    InvalidTable,
    MixedRing,
    NoConvergence,
    NotAPGroup,
    NotIdempotent,
    NotNested,
    NotNormal,
    ParameterError,
    ParseError,
    PermlatError,
    PrecisionLoss,
    RestrictionNotPermutation,
    SubgroupResolutionError,
    TargetNotPermutation,
    TrivialGroup,
    ValidationError,
)
from .pgroup import (
    PGroup,
    QuotientData,
    SubgroupHandle,
    build_group,
    enumerate_subgroups,
    make_handle,
    orbit_reps_gamma,
    quotient_group,
    subgroup_as_group,
    subgroup_closure,
)
from .zlinalg import (
    TorsionProfile,
    cokernel_structure,
    howell_form,
    kernel_saturated,
    smith_normal_form,
)
from .gmodule import (
    GModule,
    ModuleMap,
    Ring,
    augmentation_image,
    coinvariants,
    coset_sum_matrix,
    direct_sum,
    finite_ring,
    fixed_points,
    lattice_ring,
    make_module,
    norm_operator,
    permutation_lattice,
    quotient_by_fixed_coinv,
    reduce_mod,
    restriction,
    trivial_module,
)
from .cohomo import CohomologyGroup, ext1, h1, is_coflasque
from .krs import (
    BlockStructure,
    Decomposition,
    EndoRing,
    classify_restriction,
    decompose_indecomposables,
    endomorphism_ring,
    fitting_split,
    is_isomorphic,
    lift_idempotent,
    maranda_precision,
    recognize_permutation,
    recognize_permutation_block,
)
from .theorem import (
    VerdictReport,
    check_main_theorem,
    check_weiss_msz,
    filtration_subspace,
    recursive_is_permutation,
    supersurjective_split,
)
from .corpus import (
    Fixture,
    disguised_permutation,
    group_catalog,
    named_group,
    paper_example_4_2,
    syzygy_nonpermutation,
)

__version__ = "0.1.0"
