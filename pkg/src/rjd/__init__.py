"""Reflected jump-diffusions on the half-line: certified ergodicity rates,
path simulation with monotone couplings, Monte-Carlo rate verification, and
the two-particle gap-process reduction.

Quick tour::

    import rjd

    model = rjd.RJDModel(
        dd=rjd.DriftDiffusionSpec.constants(-2.0, 1.0),
        jumps=rjd.PointShift(1.0),
        lambda0=2.0,
        k_constant_in_x=True,
    )
    cert = rjd.optimize_lambda(model)      # certified rate kappa = |K_max|
    path = rjd.simulate_rjd(model, x0=1.0, T=10.0, dt=1e-3, seed=1)
    fit = rjd.exact_rate_test(model, cert.lambda_star, 0.0, 2.0,
                              times=[0.5, 1.0, 1.5, 2.0], n_paths=20_000)
"""

from .measures import DivergentMomentError, ExpComponent, FiniteMeasure
from .model import (
    DifferencePushforward,
    DriftDiffusionSpec,
    ExpRightTail,
    JumpFamily,
    NoJumpError,
    NoJumps,
    PointMap,
    PointShift,
    RJDModel,
    TranslationInvariant,
    ValidationReport,
    exp_moment,
    is_stochastically_ordered,
    jump_rate,
    bundled_model_path,
    load_model,
    model_from_config,
    sample_jump,
    validate_model,
)
from .rate import (
    DominationError,
    DriftConditionReport,
    InfeasibleRateError,
    LambdaRangeError,
    RateCertificate,
    VLyapunov,
    certificate_at,
    check_drift_condition,
    dominating_certificate,
    feasible_interval,
    joint_drift,
    k_max,
    k_value,
    optimize_lambda,
)
from .sim import (
    CoupledPair,
    JumpEvent,
    PathRecord,
    simulate_coupled_pair,
    simulate_reflected_diffusion,
    simulate_rjd,
)
from .ensemble import coupled_states, terminal_states
from .verify import (
    BoundCheckReport,
    DecayFit,
    EmpiricalDistribution,
    MomentDecayReport,
    coupling_bound_check,
    estimate_stationary,
    exact_rate_test,
    gap_series,
    moment_convergence_check,
    stationary_v_moment,
    v_gap_estimate,
)
from .levy import (
    EffectiveDrifts,
    GapEquivalenceReport,
    GeneralPlanar,
    LevyPairModel,
    PlanarJumpMeasure,
    PointMassJump,
    ProductIndependent,
    RankedPaths,
    ZeroJumps,
    effective_drifts,
    gap_equivalence_test,
    gap_model,
    load_pair_model,
    pair_gap_samples,
    pair_model_from_config,
    simulate_pair,
)
from .streams import DEFAULT_SEED, substream

__version__ = "0.1.0"
