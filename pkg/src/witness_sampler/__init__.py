"""Sampling positive-dimensional polynomial solution sets by homotopy
continuation, with extrinsic, global intrinsic, and local intrinsic slicing
coordinates."""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend  # noqa: F401
from .polysys import (  # noqa: F401
    Monomial,
    PolySystem,
    RestrictedSystem,
    adjacent_minors,
    cyclic_roots,
    evaluate,
    expand_substitution,
    format_system,
    jacobian,
    parse_system,
    random_sparse_hypersurface,
    restrict,
    square_system,
)
from .linalg import (  # noqa: F401
    OpCounter,
    condition_number,
    lu_solve,
    nullspace_basis,
    orthonormalize,
    project_perpendicular,
    random_unit_circle,
)
from .witness import (  # noqa: F401
    AffinePlane,
    ExtrinsicPlane,
    WitnessSet,
    extrinsic_to_intrinsic,
    intrinsic_to_extrinsic,
    load_witness,
    plane_distance,
    random_plane,
    rebase,
    save_witness,
)
from .tracker import (  # noqa: F401
    PathStats,
    TrackerConfig,
    apriori_step_control,
    endpoint_conditions,
    move_witness,
    newton_correct,
    predictor_direction,
    track_global,
    track_local,
)
from .solver import (  # noqa: F401
    StartSystem,
    total_degree_solve,
    witness_generate,
)
from .conditioning import (  # noqa: F401
    ConditionRatios,
    ConditionReport,
    UnivariatePoly,
    aberth_roots,
    local_shift_condition,
    root_condition,
    run_condition_experiment,
    univariate_restrict,
)
from .errors import (  # noqa: F401
    AlreadyOnPlane,
    ConvergenceError,
    DegeneracyError,
    DimensionError,
    OrthonormalityError,
    ParseError,
    PathCrossingError,
    PathFailureError,
    RankDeficiencyError,
    SingularMatrixError,
    StepSizeError,
    ValidationError,
)
