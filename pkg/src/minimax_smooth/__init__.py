"""Worst-case smooth convex function, resisting oracle and first-order methods."""
from .interpolation import (
    ConditionReport,
    ConvergenceError,
    EvalResult,
    Kernel,
    SimplexWeights,
    TriplePoint,
    TripleSet,
    check_interpolation_conditions,
    eval_interpolant,
    eval_quadratic_w,
    project_kernel,
)
from .methods import METHODS, RunResult, run_fgm, run_gd, run_ogm
from .resisting_oracle import (
    BudgetExhausted,
    FinalizedFunction,
    OracleAnswer,
    OracleStateError,
    ResistingOracle,
    Transcript,
    finalize,
    new_oracle,
    query,
    replay_verify,
)
from .theta_zeta import (
    BoundsReport,
    ThetaSequence,
    ZetaVector,
    reference_bounds,
    smooth_bound,
    theta_sequence,
    zeta_star,
)
from .worst_case import (
    WorstCaseFunction,
    build_triples,
    eval_worst_case,
    eval_worst_case_reference,
    verify_identities,
    worst_case_function,
)

__version__ = "0.1.0"
