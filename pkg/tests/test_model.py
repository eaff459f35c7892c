import numpy as np
import pytest
from helpers import ks_critical, ks_statistic_mixed

from rjd.measures import DivergentMomentError, FiniteMeasure
from rjd.model import (
    DifferencePushforward,
    DriftDiffusionSpec,
    ExpRightTail,
    NoJumpError,
    NoJumps,
    PointMap,
    PointShift,
    RJDModel,
    TranslationInvariant,
    exp_moment,
    is_stochastically_ordered,
    jump_rate,
    model_from_config,
    sample_jump,
    validate_model,
)

ALL_FAMILIES = [
    PointShift(1.0),
    ExpRightTail(1.0, 1.0),
    PointMap(lambda x: np.abs(x - 1.0)),
    TranslationInvariant(FiniteMeasure.atoms([0.5, 2.0], [0.5, 1.5])),
    DifferencePushforward(FiniteMeasure.atoms([-1.0], [1.0])),
    DifferencePushforward(
        FiniteMeasure.exponential(1.0, 1.0) + FiniteMeasure.atoms([-0.5], [0.5])
    ),
]


# ----------------------------------------------------------------------
# jump_rate / exp_moment / sample_jump contract examples
# ----------------------------------------------------------------------


def test_jump_rate_examples():
    assert jump_rate(PointShift(1.0), 5.0) == 1.0
    assert jump_rate(NoJumps(), 3.0) == 0.0
    assert jump_rate(ExpRightTail(1.0, 1.0), 0.7) == 1.0


def test_exp_moment_examples():
    assert exp_moment(PointShift(1.0), 2.3, 0.4) == pytest.approx(np.exp(0.4), rel=1e-12)
    assert exp_moment(ExpRightTail(1.0, 1.0), 4.0, 0.2) == pytest.approx(1.25, rel=1e-12)


@pytest.mark.parametrize("family", ALL_FAMILIES)
@pytest.mark.parametrize("x", [0.0, 0.7, 3.2])
def test_exp_moment_at_zero_equals_rate(family, x):
    assert exp_moment(family, x, 0.0) == pytest.approx(jump_rate(family, x), rel=1e-12)


def test_exp_moment_divergence_guard_names_threshold():
    fam = ExpRightTail(rate=1.0, intensity=1.0)
    with pytest.raises(DivergentMomentError) as err:
        exp_moment(fam, 0.0, 1.0)
    assert err.value.threshold == 1.0
    with pytest.raises(DivergentMomentError):
        # reflected left-exponential mass diverges just the same
        DifferencePushforward(FiniteMeasure.exponential_negative(1.0, 1.0)).exp_moment(0.0, 1.0)


def test_sample_jump_examples():
    assert sample_jump(PointShift(1.0), 2.0, 0.37) == 3.0
    assert sample_jump(ExpRightTail(1.0, 1.0), 0.0, 0.5) == pytest.approx(np.log(2.0), rel=1e-12)
    assert sample_jump(PointMap(lambda x: np.abs(x - 1.0)), 0.25, 0.9) == pytest.approx(0.75)
    with pytest.raises(NoJumpError):
        sample_jump(NoJumps(), 1.0, 0.5)
    with pytest.raises(ValueError):
        sample_jump(PointShift(1.0), 1.0, 1.0)


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_sampled_destinations_nonnegative(family):
    gen = np.random.default_rng(7)
    xs = gen.uniform(0.0, 6.0, size=256)
    us = gen.uniform(1e-6, 1 - 1e-6, size=256)
    dest = sample_jump(family, xs, us)
    assert np.all(dest >= 0.0)


@pytest.mark.parametrize("family", ALL_FAMILIES)
@pytest.mark.parametrize("x", [0.0, 1.3])
def test_sampling_matches_cdf_by_ks(family, x):
    """Inverse-CDF draws reproduce the destination law (KS below the 1% level)."""
    gen = np.random.default_rng(11)
    n = 10_000
    us = gen.uniform(1e-9, 1 - 1e-9, size=n)
    draws = np.asarray(sample_jump(family, np.full(n, x), us))
    stat = ks_statistic_mixed(draws, lambda z: np.asarray(family.cdf(x, z)))
    assert stat < ks_critical(n, level=0.01)


def test_point_map_sampling_is_its_map():
    fam = PointMap(lambda x: np.abs(x - 1.0))
    xs = np.linspace(0.0, 4.0, 11)
    np.testing.assert_allclose(sample_jump(fam, xs, np.full(11, 0.5)), np.abs(xs - 1.0))


@pytest.mark.parametrize(
    "family",
    [PointShift(1.0), ExpRightTail(1.0), TranslationInvariant(FiniteMeasure.atoms([0.5, 2.0], [1.0, 1.0]))],
)
def test_exp_moment_nondecreasing_in_lambda_for_right_jumps(family):
    lams = np.linspace(0.0, 0.9, 10)
    vals = [exp_moment(family, 1.0, l) for l in lams]
    assert np.all(np.diff(vals) >= -1e-12)


# ----------------------------------------------------------------------
# stochastic ordering
# ----------------------------------------------------------------------


def test_point_shift_is_ordered():
    assert is_stochastically_ordered(PointShift(1.0))


def test_folded_point_map_is_not_ordered():
    fam = PointMap(lambda x: np.abs(x - 1.0))
    assert not is_stochastically_ordered(fam, x_grid=[0.0, 0.5, 2.0])


@pytest.mark.parametrize(
    "mu",
    [
        FiniteMeasure.point(1.0),
        FiniteMeasure.exponential(2.0, 0.7),
        FiniteMeasure.atoms([0.1, 3.0], [1.0, 0.25]) + FiniteMeasure.exponential(1.5, 0.5),
    ],
)
def test_translation_invariant_families_are_ordered(mu):
    assert is_stochastically_ordered(TranslationInvariant(mu))


def test_difference_pushforward_ordering_depends_on_support():
    assert is_stochastically_ordered(DifferencePushforward(FiniteMeasure.exponential(1.0, 2.0)))
    folded = DifferencePushforward(FiniteMeasure.atoms([-1.0], [1.0]))
    assert not is_stochastically_ordered(folded, x_grid=[0.0, 0.5, 2.0])


def test_pushforward_rate_constant_in_x():
    diff = FiniteMeasure.exponential(1.0, 1.5) + FiniteMeasure.atoms([-0.3], [0.5])
    fam = DifferencePushforward(diff)
    xs = np.linspace(0.0, 20.0, 41)
    np.testing.assert_allclose(jump_rate(fam, xs), diff.mass())


# ----------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------


def test_validate_unit_jump_model(unit_jump_model):
    rep = validate_model(unit_jump_model, grid_step=0.05)
    assert rep.ok
    assert rep.rho == pytest.approx(1.0)
    assert np.isfinite(rep.expmoment_sup)


def test_validate_pure_diffusion_passes():
    model = RJDModel(DriftDiffusionSpec.constants(0.0, 1.0), NoJumps(), lambda0=1.0)
    rep = validate_model(model, grid_step=0.05)
    assert rep.ok and rep.rho == 0.0


def test_validate_flags_moment_divergence():
    model = RJDModel(
        DriftDiffusionSpec.constants(-2.0, 1.0), ExpRightTail(1.0, 1.0), lambda0=1.5
    )
    rep = validate_model(model, grid_step=0.05)
    assert not rep.assumption3_ok and not rep.ok


def test_validate_boundary_lambda0_accepted(exp_jump_model):
    # moment radius exactly at the divergence threshold: valid, with a note
    rep = validate_model(exp_jump_model, grid_step=0.05)
    assert rep.assumption3_ok
    assert any("diverges at lambda0" in n for n in rep.notes)


def test_validate_flags_degenerate_sigma():
    model = RJDModel(DriftDiffusionSpec.constants(-1.0, 0.0), NoJumps(), lambda0=1.0)
    rep = validate_model(model, grid_step=0.05)
    assert not rep.assumption1_ok


def test_validate_records_nonfinite_coefficient():
    dd = DriftDiffusionSpec(lambda x: np.where(np.asarray(x) > 1.0, np.nan, -1.0), lambda x: np.ones_like(np.asarray(x, dtype=float)))
    model = RJDModel(dd, NoJumps(), lambda0=1.0, x_max=5.0, grid_step=0.1)
    rep = validate_model(model)
    assert not rep.assumption1_ok
    assert any("non-finite" in n for n in rep.notes)


def test_k_constant_flag_guard():
    with pytest.raises(ValueError):
        RJDModel(
            DriftDiffusionSpec.constants(-2.0, 1.0),
            PointMap(lambda x: np.abs(x - 1.0)),
            lambda0=2.0,
            k_constant_in_x=True,
        )
    with pytest.raises(ValueError):
        RJDModel(
            DriftDiffusionSpec(lambda x: -np.asarray(x), lambda x: np.ones_like(np.asarray(x, dtype=float))),
            PointShift(1.0),
            lambda0=2.0,
            k_constant_in_x=True,
        )


# ----------------------------------------------------------------------
# model files
# ----------------------------------------------------------------------


def test_model_from_config_constants_and_expressions():
    cfg = {
        "drift": {"kind": "constant", "value": -2.0},
        "sigma2": 1.0,
        "jumps": {"kind": "point_shift", "c": 1.0, "intensity": 1.0},
        "lambda0": 2.0,
        "x_max": 50.0,
    }
    model = model_from_config(cfg)
    assert model.k_constant_in_x  # auto-detected: constant coefficients, ordered family
    assert jump_rate(model.jumps, 0.0) == 1.0

    cfg2 = {
        "drift": {"kind": "expression", "body": "-2 - x / (1 + x)"},
        "sigma2": {"kind": "constant", "value": 1.0},
        "jumps": {"kind": "point_map", "psi": {"kind": "expression", "body": "abs(x - 1)"}, "intensity": 1.0},
        "lambda0": 2.0,
    }
    model2 = model_from_config(cfg2)
    assert not model2.k_constant_in_x
    assert model2.dd.g_at(1.0) == pytest.approx(-2.5)
    assert sample_jump(model2.jumps, 0.25, 0.5) == pytest.approx(0.75)


def test_model_from_config_missing_field():
    with pytest.raises(ValueError, match="lambda0"):
        model_from_config({"drift": 0.0, "sigma2": 1.0})
