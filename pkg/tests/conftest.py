import numpy as np
import pytest

from rjd.model import (
    DriftDiffusionSpec,
    ExpRightTail,
    NoJumps,
    PointMap,
    PointShift,
    RJDModel,
)


@pytest.fixture
def rbm_model():
    """Reflected Brownian motion, drift -2, unit diffusion, no jumps."""
    return RJDModel(
        dd=DriftDiffusionSpec.constants(-2.0, 1.0),
        jumps=NoJumps(),
        lambda0=10.0,
        k_constant_in_x=True,
    )


@pytest.fixture
def unit_jump_model():
    """Drift -2, unit diffusion, unit jumps one step to the right at rate 1."""
    return RJDModel(
        dd=DriftDiffusionSpec.constants(-2.0, 1.0),
        jumps=PointShift(1.0),
        lambda0=2.0,
        k_constant_in_x=True,
    )


@pytest.fixture
def exp_jump_model():
    """Drift -2, unit diffusion, Exp(1)-sized right jumps at rate 1."""
    return RJDModel(
        dd=DriftDiffusionSpec.constants(-2.0, 1.0),
        jumps=ExpRightTail(rate=1.0, intensity=1.0),
        lambda0=1.0,
        k_constant_in_x=True,
    )


@pytest.fixture
def folded_map_model():
    """Drift -2, unit diffusion, deterministic jump to |x - 1| at rate 1.

    The family is not stochastically ordered but is tail-dominated by unit
    right shifts, so its certificate goes through the dominating route.
    """
    return RJDModel(
        dd=DriftDiffusionSpec.constants(-2.0, 1.0),
        jumps=PointMap(lambda x: np.abs(x - 1.0)),
        lambda0=2.0,
    )
