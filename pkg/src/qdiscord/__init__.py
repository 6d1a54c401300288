"""Multipartite quantum discord for the symmetric N-qubit state family."""

from .discord import (
    Category,
    ClosedFormReport,
    OracleConfig,
    OracleResult,
    classify,
    closed_form_discord,
    discord_objective,
    entropy_defect,
    oracle_discord,
)
from .dynamics import (
    ChannelParams,
    TrajectoryPoint,
    certify_monotone_decrease,
    discord_trajectory,
    kraus_operators,
    phase_flip_coefficients,
    transition_point,
)
from .errors import InvalidStateError, UnsupportedSizeError
from .linalg import (
    DensityMatrix,
    hermitian_eigenvalues,
    kron,
    partial_trace,
    von_neumann_entropy,
)
from .measurement import (
    BlochAxis,
    BranchEnsemble,
    MeasurementFrame,
    MeasurementTree,
    apply_tree,
    conditional_entropy_term,
    frame_to_bloch,
    measure_qubit,
    unconditional_term,
)
from .states import (
    FamilyCoefficients,
    SpectrumReport,
    build_density_matrix,
    global_entropy,
    is_physical,
    spectrum_closed_form,
)
from .surface import (
    ScalarField,
    TriangleMesh,
    export_mesh,
    extract_isosurface,
    sample_field,
)

__version__ = "0.1.0"
