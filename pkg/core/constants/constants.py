class Constants:
    COMMAND_PACKAGE: str = "povm_coherence.cli.commands"

    # numerical tolerances shared by the domain package
    HERMITIAN_TOL: float = 1e-9
    PSD_TOL: float = 1e-9
    TRACE_TOL: float = 1e-9
    COMPLETENESS_TOL: float = 1e-9
    RANK_TOL: float = 1e-9
    ZERO_PROB: float = 1e-12
    PROB_DUST: float = 1e-10
    INCOHERENCE_TOL: float = 1e-8

    # extremal searches
    GRADIENT_STEP: float = 1e-6
    GRADIENT_TOL: float = 1e-6
    ARMIJO_C: float = 1e-4
    DESCENT_MAX_ITERS: int = 5000
    SPHERE_POINTS: int = 2000

    # SDP
    SOLVER_TOL: float = 1e-9
    SOLVER_MAX_ITERS: int = 200
    FEAS_THRESHOLD: float = 1e-7
    MARGINAL_FACTOR: float = 10.0
    SLACK_FLOOR: float = 1.0
    RANK_REDUCTION_TOL: float = 1e-10
    CONSISTENCY_TOL: float = 1e-8
    # minimal face of the incoherent Choi matrices; eigenvalues below FACE_TOL * lambda_max count as zero
    FACE_TOL: float = 1e-6
    FACE_CONSISTENCY_TOL: float = 1e-5
    STATE_RANGE_TOL: float = 1e-12
    RETRY_TOL_FACTOR: float = 100.0

    SUITE_BUDGET_SECONDS: float = 600.0

    DEFAULT_GRID: str = "181x91"
    RESOURCE_PACKAGE: str = "resources.povm_coherence"
