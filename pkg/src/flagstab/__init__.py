"""Exact computation with series of subspaces and their stability groups."""

from .builder import (
    GeneratorSet,
    LowerCentralChain,
    McLainElement,
    mclain_matrices,
    mclain_truncate,
    module_lcs,
    refine_series,
)
from .decomposition import ChainSplit, SectionAssignment, patch_sections, section_basis, split_chain
from .linalg import (
    GF,
    QQ,
    Field,
    Mat,
    QuotientMap,
    Subspace,
    Vec,
    complement_basis,
    complement_in,
    echelonize,
    image,
    kernel,
)
from .series import (
    Jump,
    Series,
    canonical_coarsening,
    extend_to_full_flag,
    in_stabilizer,
    is_adapted_basis,
    jump_of,
    section_series,
    validate,
)
from .transvections import (
    TransvectionSpec,
    commutator,
    fixed_line_engel_witness,
    iterated_commutator,
    transvection_commutator_check,
    make_transvection,
    one_plus_eta_commutator,
)
from .unipotent import (
    JordanData,
    KernelChain,
    jordan_blocks,
    jordan_matrix,
    kernel_chain,
    unipotent_exponent,
)
from .witness import (
    PairSelection,
    PreorderedBasis,
    WitnessCertificate,
    build_h,
    construct_witness,
    extend_witness,
    level,
    select_pairs,
    validate_selection,
    verify_witness,
)

__version__ = "0.1.0"
