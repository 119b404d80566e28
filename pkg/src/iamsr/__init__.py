"""Secure interference-alignment MSR storage code over prime fields."""

from .analysis import (
    ComparisonRow,
    TradeoffPoint,
    bandwidth_table,
    exact_repair_secrecy_bound,
    ia_repair_bandwidth,
    ia_secrecy_capacity,
    mbr_point,
    msr_point,
    msr_secrecy_bound,
    secrecy_table,
    to_csv,
    write_csv,
)
from .cauchy import InjectiveSequence, cauchy_build, cauchy_canonical, verify_total_nonsingularity
from .gf import (
    FieldElement,
    FieldMismatchError,
    Matrix,
    PrimeField,
    SingularMatrixError,
    fe_add,
    fe_inv,
    fe_mul,
    fe_sub,
    mat_inverse,
    mat_mul,
    mat_rank,
    mat_solve,
)
from .iacode import (
    CodeError,
    CodeParams,
    GeneratorSet,
    NodeContent,
    RepairDownload,
    RepairResult,
    build_generators,
    cutset_validate,
    encode,
    interference_ranks,
    params_new,
    reconstruct,
    repair_parity_fallback,
    repair_plan,
    repair_systematic,
)
from .secrecy import (
    EveModel,
    ObservationMatrix,
    SecrecyError,
    SecrecyReport,
    SecureLayout,
    capacity_identity_check,
    eavesdrop,
    observation_matrix,
    observed_symbol_count,
    random_symbol_count,
    secrecy_capacity,
    secure_decode,
    secure_encode,
    secure_layout,
    upper_bounds,
    verify_secrecy_exhaustive,
    verify_secrecy_rank,
)
from .storage import ClusterManifest, NodeFile, egest, ingest, read_node, write_node

__version__ = "0.1.0"
