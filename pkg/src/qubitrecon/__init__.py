"""Single-qubit channels in affine form: CP certification, conservative reconstruction, metrics."""

from .core import (
    EPS_FRAME,
    EPS_NUM,
    EPS_STATE,
    AffineChannel,
    Frame,
    SingularData,
    adapt,
    apply,
    bloch,
    check_state,
    complete_frame,
    compose,
    fidelity,
    fidelity_to_mixture,
    frame_from_pair,
    is_pure,
    rebase,
    singular_decompose,
    trace_distance,
)
from .cp import (
    EPS_CP,
    EPS_HERM,
    CpCertificate,
    UhlmannResult,
    affine_from_choi,
    affine_from_kraus,
    certify_cp,
    choi_from_affine,
    fa_margins,
    kraus_from_affine,
    kraus_from_choi,
    min_choi_eigenvalue,
    uhlmann_compatible,
)
from .errors import (
    DegenerateDataError,
    DegenerateGeometryError,
    FrameError,
    InconsistentDataError,
    InfeasibleSearchError,
    InvalidStateError,
    NoPureCombinationError,
    NotCompletelyPositiveError,
    NotTracePreservingError,
    NotUnitalError,
    QubitReconError,
)
from .metrics import (
    DistanceEstimate,
    HierarchyResult,
    Measure,
    average_distance,
    hierarchy_check,
    image_cloud,
    image_mean_distance,
    unital_capacity,
)
from .reconstruct import (
    EPS_FIT,
    Branch,
    CanonicalPair,
    OptimizerVariables,
    ReconstructionOptions,
    ReconstructionReport,
    TransformationRecord,
    canonicalize_pair,
    estimate,
    estimate_four,
    estimate_none,
    estimate_one,
    estimate_three,
    estimate_two,
)
from .search import SearchResult, constrained_search

__version__ = "0.1.0"
