"""gapforge: spectral-gap reductions for local Hamiltonians, promise-robust
oracle search, and adaptive-query flattening, all certified at desk scale by
exact diagonalization."""

from .errors import (
    ConfigTooCoarseError,
    DimensionError,
    DimensionMismatchError,
    DuplicateIndexError,
    GapforgeError,
    IndexOutOfRangeError,
    InvalidInputError,
    NonConvergenceError,
    NonHermitianError,
    ParseError,
    PathTooDeepError,
    TooLargeError,
    TooManyInvalidError,
)
from .hamiltonian import (
    Hamiltonian,
    KlhInstance,
    LocalTerm,
    SpectralGapInstance,
    assemble,
    make_local_term,
    random_instance,
    shifted_dense,
    to_dense,
    validate_klh,
)
from .spectrum import (
    PromiseVerdict,
    Spectrum,
    crosscheck_eigenvalues,
    decide_gap_truth,
    decide_klh_truth,
    eigenvalues,
    lambda_c,
    spectral_gap,
)
from .reduction import (
    ReductionOutput,
    ReductionVariant,
    block_spectrum,
    predicted_gap,
    reduce_klh_to_gap,
)
from .promise_oracle import (
    AllNo,
    AllYes,
    AnswerPolicy,
    ExplicitPolicy,
    OracleLog,
    OracleQuery,
    QueryKind,
    SeededPolicy,
    answer,
    enumerate_adversaries,
    sample_adversaries,
)
from .gap_search import (
    GapDecision,
    SearchConfig,
    SearchResult,
    adaptive_gap_decider,
    decide_gap_via_oracle,
    default_search_config,
    explore_search_outcomes,
    make_search_config,
    query_budget,
    robust_search_lambda,
    rounds_config,
    single_search_machine,
)
from .query_flatten import (
    AdaptiveMachine,
    Halt,
    NextQuery,
    NonAdaptiveProgram,
    RobustnessReport,
    check_robustness,
    check_robustness_sampled,
    echo_machine,
    enumerate_paths,
    flatten,
    replay_machine,
    run_adaptive,
    run_nonadaptive,
    tree_stats,
)
from .harness import (
    Report,
    VerifyConfig,
    generate_instance,
    read_instance,
    run_verify,
    write_instance,
)

__version__ = "0.1.0"
