import numpy as np
import pytest

from varwave import (
    ConstantSpeed,
    Grid,
    OseenFrankSpeed,
    PolynomialBump,
    ProblemSetup,
    SchemeConfig,
    Stepper,
    init_state,
)

SQRT2 = float(np.sqrt(2.0))


@pytest.fixture(scope="session")
def canonical_speed():
    """k1=2, k3=1 planar speed: c in [1, sqrt(2)], c'(pi/4) > 0."""
    return OseenFrankSpeed(c0=1.0, c1=SQRT2, k1=2.0, k3=1.0)


@pytest.fixture(scope="session")
def unit_speed():
    return ConstantSpeed.of(1.0)


@pytest.fixture(scope="session")
def canonical_setup(canonical_speed):
    """Theorem data at eps=0.05, the blow-up experiment family."""
    return ProblemSetup.theorem(
        d=3, r0=1.0, eps=0.05, u0=np.pi / 4, speed=canonical_speed
    )


@pytest.fixture(scope="session")
def gentle_setup(canonical_speed):
    """Same geometry with a mild bump; stays smooth over the full window."""
    return ProblemSetup.theorem(
        d=3,
        r0=1.0,
        eps=0.1,
        u0=np.pi / 4,
        speed=canonical_speed,
        profile=PolynomialBump(amplitude=2.0),
    )


def march(setup, grid, cfg, t_end, observers=()):
    """Step the solver to exactly t_end, invoking observers like run()."""
    stepper = Stepper(setup, grid, cfg)
    state = init_state(setup, grid)
    for obs in observers:
        obs(state)
    while state.t < t_end - 1e-15:
        state = stepper.step(state, min(stepper.base_dt, t_end - state.t))
        for obs in observers:
            obs(state)
    return state


@pytest.fixture(scope="session")
def march_to():
    return march
