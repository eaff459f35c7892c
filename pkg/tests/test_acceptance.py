"""Acceptance suite: one test per release criterion, printed pass/fail lines.

Monte-Carlo criteria run at fixed seeds with tolerances set up front; the
discretization-robustness checks repeat the relevant criteria at half the
step size and require the same verdicts. Budgets are desk scale: a few
minutes for the distributional criteria, seconds for everything else.
"""

import time

import numpy as np
import pytest
from scipy import stats

from helpers import ks_critical
from rjd.ensemble import coupled_states, terminal_states
from rjd.levy import gap_equivalence_test, gap_model, load_pair_model
from rjd.measures import DivergentMomentError
from rjd.model import (
    DriftDiffusionSpec,
    NoJumps,
    PointShift,
    RJDModel,
    bundled_model_path,
    load_model,
)
from rjd.rate import (
    LambdaRangeError,
    dominating_certificate,
    joint_drift,
    k_value,
    optimize_lambda,
)
from rjd.sim import simulate_rjd
from rjd.verify import coupling_bound_check, exact_rate_test, gap_series

UNIT = load_model(bundled_model_path("unit_jump.json"))
EXPJ = load_model(bundled_model_path("exp_jump.json"))
RBM = load_model(bundled_model_path("reflected_bm.json"))
FOLDED = load_model(bundled_model_path("folded_jump.json"))
PAIR_EXP = load_pair_model(bundled_model_path("pair_exp_jumps.json"))
PAIR_DOWN = load_pair_model(bundled_model_path("pair_down_point.json"))
PAIR_DIFF = load_pair_model(bundled_model_path("pair_diffusive.json"))


def _report(criterion, ok, detail):
    print(f"[acceptance] criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_1_unit_jump_certificate():
    t0 = time.perf_counter()
    cert = optimize_lambda(UNIT)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(cert.lambda_star - 0.442954) <= 1e-4
        and abs(cert.kappa - 0.230503) <= 1e-4
        and abs(cert.feasible_interval[1] - 0.849245) <= 1e-5
        and elapsed < 1.0
    )
    _report(
        1,
        ok,
        f"lambda*={cert.lambda_star:.6f} kappa={cert.kappa:.6f} "
        f"root={cert.feasible_interval[1]:.6f} ({elapsed * 1e3:.0f} ms)",
    )


def test_criterion_2_exp_jump_certificate_with_guard():
    t0 = time.perf_counter()
    cert = optimize_lambda(EXPJ)
    elapsed = time.perf_counter() - t0
    with pytest.raises(DivergentMomentError):
        EXPJ.jumps.exp_moment(0.0, 1.0)
    with pytest.raises(LambdaRangeError):
        k_value(EXPJ, 0.0, 1.0)
    ok = (
        abs(cert.lambda_star - 0.245122) <= 1e-4
        and abs(cert.kappa - 0.135484) <= 1e-4
        and elapsed < 1.0
    )
    _report(
        2,
        ok,
        f"lambda*={cert.lambda_star:.6f} kappa={cert.kappa:.6f} "
        f"divergence guard raises at lambda0=1 ({elapsed * 1e3:.0f} ms)",
    )


def test_criterion_3_closed_form_no_jumps():
    cert = optimize_lambda(RBM)
    ok = abs(cert.lambda_star - 2.0) <= 1e-8 and abs(cert.kappa - 2.0) <= 1e-8
    _report(3, ok, f"lambda*={cert.lambda_star:.12f} kappa={cert.kappa:.12f}")


def test_criterion_4_domination_transfers_certificate():
    cert = dominating_certificate(FOLDED, PointShift(1.0))
    ref = optimize_lambda(UNIT)
    ok = (
        cert.dominating
        and abs(cert.lambda_star - ref.lambda_star) <= 1e-12
        and abs(cert.kappa - ref.kappa) <= 1e-12
    )
    _report(
        4, ok, f"dominated certificate lambda*={cert.lambda_star:.6f} kappa={cert.kappa:.6f}"
    )


def test_criterion_5_pair_gap_certificates():
    t0 = time.perf_counter()
    model5 = gap_model(PAIR_EXP)
    cert5 = optimize_lambda(model5)
    t5 = time.perf_counter() - t0
    g = float(model5.dd.g_at(0.0))
    s2 = float(model5.dd.sigma2_at(0.0))
    t0 = time.perf_counter()
    model6 = gap_model(PAIR_DOWN)
    cert6 = dominating_certificate(model6, PointShift(1.0))
    t6 = time.perf_counter() - t0
    ok = (
        g == -3.0
        and s2 == 2.0
        and abs(cert5.lambda_star - 0.141906) <= 1e-4
        and abs(cert5.kappa - 0.0748337) <= 1e-4
        and abs(cert6.lambda_star - 0.314923) <= 1e-4
        and abs(cert6.kappa - 0.160516) <= 1e-4
        and t5 < 1.0
        and t6 < 1.0
    )
    _report(
        5,
        ok,
        f"gap(g={g:g}, sigma2={s2:g}) kappa5={cert5.kappa:.7f} kappa6={cert6.kappa:.6f} "
        f"({t5 * 1e3:.0f}/{t6 * 1e3:.0f} ms)",
    )


# criterion 6: the decay-rate regression; starts sit away from the boundary so
# the window t in [0.5, 3] lies in the exact-decay regime (boundary local time
# only reshapes the prefactor afterwards)
C6_KW = dict(x1=8.0, x2=10.0, times=[0.5, 1.0, 1.5, 2.0, 2.5, 3.0], n_paths=100_000, seed=106)


def _criterion6(dt):
    lam = optimize_lambda(UNIT).lambda_star
    fit = exact_rate_test(UNIT, lam, dt=dt, **C6_KW)
    dev = abs(fit.slope - (-0.230503))
    tol = max(3 * fit.slope_stderr, 0.1 * 0.230503)
    return fit, dev, tol


def test_criterion_6_exact_rate_regression():
    fit, dev, tol = _criterion6(1e-3)
    ok = fit.passed and dev <= tol
    _report(
        6,
        ok,
        f"slope={fit.slope:.6f} target=-0.230503 |dev|={dev:.6f} "
        f"tol={tol:.6f} (n=1e5, dt=1e-3)",
    )


def test_criterion_7_property_suite():
    checks = []

    # K(x, 0) = 0 exactly
    xs = np.linspace(0.0, 20.0, 41)
    checks.append(all(np.all(np.asarray(k_value(m, xs, 0.0)) == 0.0) for m in (UNIT, EXPJ, RBM, FOLDED)))

    # convexity in lambda: second differences at least 0.99 sigma^2
    h = 1e-4
    conv_ok = True
    for m in (UNIT, EXPJ):
        for lam in np.linspace(0.05, 0.45 * m.lambda0, 6):
            for x in (0.0, 1.0, 5.0):
                second = (
                    k_value(m, x, lam + h) - 2 * k_value(m, x, lam) + k_value(m, x, lam - h)
                ) / (h * h)
                conv_ok &= second >= 0.99 * float(m.dd.sigma2_at(x))
    checks.append(conv_ok)

    # slope of K at lambda = 0 equals the joint drift
    slope_ok = True
    for m in (UNIT, EXPJ, FOLDED):
        for x in (0.0, 0.7, 3.0):
            slope = (4 * k_value(m, x, h) - k_value(m, x, 2 * h)) / (2 * h)  # O(h^2) one-sided
            slope_ok &= abs(slope - joint_drift(m, x)) <= 1e-6
    checks.append(slope_ok)

    # coupling order: zero violations across 10^3 pairs (10 seeds x 100 pairs)
    order_ok = True
    grid = np.round(np.arange(0.0, 2.0 + 1e-12, 1e-3), 9)
    for seed in range(10):
        lo, hi = coupled_states(UNIT, 0.0, 2.0, grid, 1e-3, 100, seed=seed)
        order_ok &= bool(np.all(lo <= hi + 1e-12))
    checks.append(order_ok)

    # push-forward mass conservation: gap intensity equals the planar mass, exactly
    for pair in (PAIR_EXP, PAIR_DOWN):
        fam = gap_model(pair).jumps
        checks.append(
            all(float(fam.rate(x)) == pair.jumps.intensity() for x in (0.0, 0.3, 2.0, 17.0))
        )

    # nonnegativity and local-time monotonicity on whole paths
    path_ok = True
    for m in (UNIT, EXPJ):
        for seed in (0, 1):
            rec = simulate_rjd(m, 0.5, 5.0, 1e-3, seed=seed)
            path_ok &= bool(np.all(rec.states >= 0.0))
            path_ok &= bool(np.all(np.diff(rec.local_time) >= 0.0))
    checks.append(path_ok)

    _report(7, all(checks), f"{len(checks)} property groups, all hold")


def _criterion8(model, certificate, dt, seed):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return coupling_bound_check(
            model, certificate, 0.0, 2.0, times=[1.0, 2.0, 3.0], n_paths=100_000, dt=dt, seed=seed
        )


def test_criterion_8_coupling_bound_margins():
    rep_a = _criterion8(UNIT, optimize_lambda(UNIT), 1e-3, 108)
    cert6 = dominating_certificate(gap_model(PAIR_DOWN), PointShift(1.0))
    rep_b = _criterion8(gap_model(PAIR_DOWN), cert6, 1e-3, 109)
    worst = min(r["margin"] for r in rep_a.rows + rep_b.rows)
    ok = rep_a.passed and rep_b.passed
    _report(8, ok, f"margins nonnegative at t in {{1,2,3}}; worst margin {worst:+.4f}")


# criterion 9 fixtures: the stationary-law check needs dt far below 1e-3
# because the projection scheme carries an O(sqrt(dt)) boundary layer;
# measured at dt=2e-5 the mean bias is ~0.2% and the KS statistic ~0.007
STAT_MODEL = RJDModel(DriftDiffusionSpec.constants(-1.0, 1.0), NoJumps(), lambda0=1.0)


def _criterion9_stationary(dt, seed=901):
    warm = np.random.default_rng(2024).exponential(0.5, size=10_000)
    snaps = terminal_states(STAT_MODEL, warm, [3.0, 4.0, 5.0], dt, 10_000, seed=seed)
    mean = float(snaps.mean())
    final = snaps[-1]
    ks = stats.kstest(final, lambda z: 1.0 - np.exp(-2.0 * np.maximum(z, 0.0))).statistic
    mean_ok = abs(mean - 0.5) / 0.5 <= 0.02
    ks_ok = ks < ks_critical(final.size, 0.01)
    return mean, ks, mean_ok and ks_ok


def _criterion9_equivalence(dt):
    rep_free = gap_equivalence_test(PAIR_DIFF, 1.0, t=1.0, n_paths=10_000, dt=dt, seeds=(91, 92))
    rep_exp = gap_equivalence_test(PAIR_EXP, 1.0, t=2.0, n_paths=10_000, dt=dt, seeds=(93, 94))
    return rep_free, rep_exp


def test_criterion_9_oracle_equivalences():
    mean, ks, stat_ok = _criterion9_stationary(2e-5)
    rep_free, rep_exp = _criterion9_equivalence(2e-5)
    ok = stat_ok and rep_free.passed and rep_exp.passed
    _report(
        9,
        ok,
        f"stationary mean={mean:.4f} (target 0.5 within 2%), KS={ks:.4f}; "
        f"gap equivalence p={rep_free.p_value:.3f} (jump-free), p={rep_exp.p_value:.3f} (exp pair)",
    )


def test_criterion_9_dt_halving_robustness():
    fit, dev, tol = _criterion6(5e-4)
    c6_ok = fit.passed and dev <= tol
    mean, ks, stat_ok = _criterion9_stationary(1e-5)
    rep_free, rep_exp = _criterion9_equivalence(1e-5)
    ok = c6_ok and stat_ok and rep_free.passed and rep_exp.passed
    _report(
        "9 (dt halved)",
        ok,
        f"slope={fit.slope:.6f} (|dev|={dev:.4f} tol={tol:.4f}); "
        f"stationary mean={mean:.4f} KS={ks:.4f}; "
        f"equivalence p={rep_free.p_value:.3f}/{rep_exp.p_value:.3f}",
    )
