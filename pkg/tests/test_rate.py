import numpy as np
import pytest

from rjd.measures import FiniteMeasure
from rjd.model import (
    DriftDiffusionSpec,
    NoJumps,
    PointShift,
    RJDModel,
    TranslationInvariant,
)
from rjd.rate import (
    DominationError,
    InfeasibleRateError,
    LambdaRangeError,
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

# Closed forms used as independent oracles below:
#   unit right jumps:  K(l) = -2 l + l^2/2 + e^l - 1
#   Exp(1) right jumps: K(l) = -2 l + l^2/2 + 1/(1-l) - 1
def _k_unit(l):
    return -2.0 * l + 0.5 * l * l + np.exp(l) - 1.0


def _k_exp(l):
    return -2.0 * l + 0.5 * l * l + 1.0 / (1.0 - l) - 1.0


def _bisect(f, lo, hi, tol=1e-12):
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (f(mid) < 0) == (flo < 0):
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------
# pointwise values
# ----------------------------------------------------------------------


def test_k_value_unit_jump_reference(unit_jump_model):
    for x in (0.0, 1.0, 7.3):
        assert k_value(unit_jump_model, x, 0.442954) == pytest.approx(-0.230503, abs=1e-6)


def test_k_value_zero_lambda_is_zero(unit_jump_model, exp_jump_model, rbm_model):
    for model in (unit_jump_model, exp_jump_model, rbm_model):
        for x in (0.0, 0.5, 12.0):
            assert k_value(model, x, 0.0) == 0.0


def test_k_value_exp_jump_reference(exp_jump_model):
    assert k_value(exp_jump_model, 2.0, 0.245122) == pytest.approx(-0.135484, abs=1e-6)


def test_k_value_lambda_guard(unit_jump_model):
    with pytest.raises(LambdaRangeError):
        k_value(unit_jump_model, 0.0, 2.0)
    with pytest.raises(LambdaRangeError):
        k_value(unit_jump_model, 0.0, -0.1)


def test_joint_drift_values(unit_jump_model, exp_jump_model, rbm_model):
    assert joint_drift(unit_jump_model, 3.0) == pytest.approx(-1.0)
    assert joint_drift(exp_jump_model, 0.4) == pytest.approx(-1.0)
    assert joint_drift(rbm_model, 5.0) == pytest.approx(-2.0)


def test_k_max_values(unit_jump_model, rbm_model):
    assert k_max(unit_jump_model, 0.8) == pytest.approx(_k_unit(0.8), rel=1e-12)
    assert k_max(rbm_model, 2.0) == pytest.approx(-2.0, rel=1e-12)
    assert k_max(unit_jump_model, 0.0) == 0.0


def test_k_max_grid_matches_exact_for_translation_invariant(unit_jump_model):
    from dataclasses import replace

    grid_model = replace(unit_jump_model, k_constant_in_x=False)
    for lam in (0.2, 0.44, 0.8):
        assert k_max(grid_model, lam) == pytest.approx(k_max(unit_jump_model, lam), rel=1e-12)


# ----------------------------------------------------------------------
# derivative/convexity structure of K in lambda
# ----------------------------------------------------------------------


@pytest.mark.parametrize("x", [0.0, 0.8, 4.0])
def test_first_difference_at_zero_matches_joint_drift(unit_jump_model, exp_jump_model, x):
    h = 1e-6
    for model in (unit_jump_model, exp_jump_model):
        slope = (k_value(model, x, h) - 0.0) / h  # K(x, 0) = 0 exactly
        assert slope == pytest.approx(joint_drift(model, x), abs=1e-5)
        central = (k_value(model, x, 2 * h) - 0.0) / (2 * h)
        assert 2 * slope - central == pytest.approx(joint_drift(model, x), abs=1e-6)


@pytest.mark.parametrize("x", [0.0, 1.7])
def test_k_convex_in_lambda(unit_jump_model, exp_jump_model, x):
    h = 1e-4
    for model in (unit_jump_model, exp_jump_model):
        s2 = float(model.dd.sigma2_at(x))
        for lam in np.linspace(0.05, min(0.9, 0.45 * model.lambda0), 7):
            second = (
                k_value(model, x, lam + h)
                - 2 * k_value(model, x, lam)
                + k_value(model, x, lam - h)
            ) / (h * h)
            assert second >= 0.99 * s2


# ----------------------------------------------------------------------
# the optimizer
# ----------------------------------------------------------------------


def test_optimize_unit_jump_model(unit_jump_model):
    cert = optimize_lambda(unit_jump_model)
    # independent oracle: minimize the closed form by slope bisection
    lam_oracle = _bisect(lambda l: np.exp(l) + l - 2.0, 0.1, 1.0)
    assert cert.lambda_star == pytest.approx(lam_oracle, abs=1e-8)
    assert cert.kappa == pytest.approx(-_k_unit(lam_oracle), abs=1e-10)
    assert cert.kappa == pytest.approx(0.230503, abs=1e-4)
    assert cert.method == "exact_x_independent"
    assert cert.k_max_at_star < 0
    assert cert.kappa == abs(cert.k_max_at_star)


def test_optimize_exp_jump_model(exp_jump_model):
    cert = optimize_lambda(exp_jump_model)
    assert cert.lambda_star == pytest.approx(0.245122, abs=1e-4)
    assert cert.kappa == pytest.approx(0.135484, abs=1e-4)


def test_optimize_no_jump_closed_form(rbm_model):
    cert = optimize_lambda(rbm_model)
    assert cert.lambda_star == pytest.approx(2.0, abs=1e-8)
    assert cert.kappa == pytest.approx(2.0, abs=1e-8)


def test_optimizer_reproducible_bit_for_bit(unit_jump_model):
    a = optimize_lambda(unit_jump_model)
    b = optimize_lambda(unit_jump_model)
    assert a.lambda_star == b.lambda_star
    assert a.kappa == b.kappa
    assert a.feasible_interval == b.feasible_interval


def test_optimize_infeasible_reports_minimum():
    model = RJDModel(DriftDiffusionSpec.constants(1.0, 1.0), NoJumps(), lambda0=2.0, k_constant_in_x=True)
    with pytest.raises(InfeasibleRateError) as err:
        optimize_lambda(model)
    assert err.value.min_value >= 0.0


def test_feasible_interval_unit_jump(unit_jump_model):
    lo, hi = feasible_interval(unit_jump_model)
    assert lo == 0.0
    assert hi == pytest.approx(0.849245, abs=1e-5)


def test_feasible_interval_no_jumps(rbm_model):
    lo, hi = feasible_interval(rbm_model)
    assert hi == pytest.approx(4.0, abs=1e-6)  # -2 l + l^2/2 < 0 iff l < 4


def test_feasible_interval_exp_jump(exp_jump_model):
    root_oracle = _bisect(_k_exp, 0.3, 1.0 - 1e-9)
    lo, hi = feasible_interval(exp_jump_model)
    assert hi == pytest.approx(root_oracle, abs=1e-6)


def test_optimize_with_binding_lambda0():
    """Small moment radius: the optimum sits at the lambda0 edge, root clamps."""
    model = RJDModel(
        DriftDiffusionSpec.constants(-2.0, 1.0), NoJumps(), lambda0=0.05, k_constant_in_x=True
    )
    cert = optimize_lambda(model)
    assert cert.lambda_star == pytest.approx(0.05, rel=1e-4)
    assert cert.kappa == pytest.approx(2 * 0.05 - 0.5 * 0.05**2, rel=1e-3)
    assert cert.feasible_interval[1] == 0.05
    assert any("clamped" in w for w in cert.warnings)


def test_certificate_at_fixed_lambda(unit_jump_model):
    cert = certificate_at(unit_jump_model, 0.8)
    assert cert.lambda_star == 0.8
    assert cert.kappa == pytest.approx(-_k_unit(0.8), rel=1e-10)
    opt = optimize_lambda(unit_jump_model)
    assert cert.kappa < opt.kappa  # larger lambda: stronger norm, lower rate
    with pytest.raises(InfeasibleRateError):
        certificate_at(unit_jump_model, 0.9)


# ----------------------------------------------------------------------
# drift condition
# ----------------------------------------------------------------------


def test_drift_condition_examples(unit_jump_model):
    assert check_drift_condition(unit_jump_model).ok
    up = RJDModel(DriftDiffusionSpec.constants(1.0, 1.0), NoJumps(), lambda0=1.0, k_constant_in_x=True)
    assert not check_drift_condition(up).ok
    overshoot = RJDModel(
        DriftDiffusionSpec.constants(-2.0, 1.0), PointShift(3.0), lambda0=1.0, k_constant_in_x=True
    )
    rep = check_drift_condition(overshoot)
    assert not rep.ok
    assert rep.sup_m == pytest.approx(1.0)  # m = -2 + 3 through the joint-drift route


# ----------------------------------------------------------------------
# domination
# ----------------------------------------------------------------------


def test_dominating_certificate_folded_map(folded_map_model, unit_jump_model):
    cert = dominating_certificate(folded_map_model, PointShift(1.0))
    ref = optimize_lambda(unit_jump_model)
    assert cert.dominating
    assert cert.lambda_star == pytest.approx(ref.lambda_star, abs=1e-12)
    assert cert.kappa == pytest.approx(ref.kappa, abs=1e-12)


def test_dominating_with_own_family_is_identity(unit_jump_model):
    cert = dominating_certificate(unit_jump_model, unit_jump_model.jumps)
    ref = optimize_lambda(unit_jump_model)
    assert cert.lambda_star == pytest.approx(ref.lambda_star, abs=1e-12)
    assert cert.kappa == pytest.approx(ref.kappa, abs=1e-12)


def test_domination_check_failure_names_violation(folded_map_model):
    with pytest.raises(DominationError, match=r"x="):
        dominating_certificate(folded_map_model, PointShift(0.25))


def test_domination_requires_ordered_family(unit_jump_model, folded_map_model):
    with pytest.raises(DominationError, match="ordered"):
        dominating_certificate(unit_jump_model, folded_map_model.jumps)


def test_domination_monotonicity_of_k(folded_map_model, unit_jump_model):
    # tails of delta_{|x-1|} sit below tails of delta_{x+1}; K inherits the order
    xs = np.linspace(0.0, 6.0, 25)
    for lam in (0.1, 0.44, 0.8):
        k_orig = k_value(folded_map_model, xs, lam)
        k_dom = k_value(unit_jump_model, xs, lam)
        assert np.all(k_orig <= k_dom + 1e-12)


# ----------------------------------------------------------------------
# Lyapunov weight
# ----------------------------------------------------------------------


def test_v_lyapunov_shape():
    v = VLyapunov(0.5)
    assert v(0.0) == 1.0
    xs = np.linspace(0.0, 5.0, 21)
    vals = v(xs)
    assert np.all(np.diff(vals) > 0) and np.all(vals >= 1.0)
    with pytest.raises(ValueError):
        VLyapunov(0.0)


def test_certificate_serialization_round_trip(unit_jump_model):
    import json

    cert = optimize_lambda(unit_jump_model)
    blob = json.loads(cert.to_json())
    assert blob["lambda_star"] == cert.lambda_star
    assert blob["feasible_interval"][0] == 0.0
    assert blob["method"] == "exact_x_independent"
    assert blob["dominating"] is False
