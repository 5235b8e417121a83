"""Explicit characteristic-form solver on a uniform radial grid.

The scheme discretizes the diagonal system directly (advection plus
source), not the conservation form; the conservation law is reserved as an
independent diagnostic.  R is advected at speed -c(u) (upwinded from the
right), S at +c(u) (upwinded from the left), and u is integrated with the
same stages from u_t = (R+S)/(2 r^alpha).

Two schemes:
  * upwind1 — first-order upwind differences + forward Euler;
  * muscl2  — minmod-limited second-order reconstruction + two-stage
    strong-stability-preserving Runge-Kutta.

The time step is cfl*h/c1 with the global speed bound c1, so the discrete
domain of dependence always contains the physical one.  Fields at both
boundary nodes are clamped to the quiescent state (u=u0, R=S=0), valid
while the support stays interior.  The run loop stops at t_final, on a
gradient ceiling crossing (the blow-up signal), or on a step budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainMismatch, NonFiniteState
from .initial_data import ProblemSetup, initial_fields, initial_riemann
from .speed_models import WaveSpeedModel

SCHEMES = ("upwind1", "muscl2")

DEFAULT_CEILING_FACTOR = 1e4


@dataclass(frozen=True)
class Grid:
    """Uniform strictly increasing radii with r_lo > 0."""

    r: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        object.__setattr__(self, "r", r)
        if r.size < 8:
            raise ValueError("grid needs at least 8 nodes")
        if r[0] <= 0.0:
            raise ValueError("grid must satisfy r_lo > 0")
        steps = np.diff(r)
        if np.any(steps <= 0):
            raise ValueError("radii must be strictly increasing")
        h = (r[-1] - r[0]) / (r.size - 1)
        if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
            raise ValueError("grid spacing must be uniform")

    @classmethod
    def uniform(cls, r_lo: float, r_hi: float, n: int) -> "Grid":
        return cls(np.linspace(r_lo, r_hi, n))

    @property
    def n(self) -> int:
        return self.r.size

    @property
    def h(self) -> float:
        return float((self.r[-1] - self.r[0]) / (self.r.size - 1))

    @property
    def r_lo(self) -> float:
        return float(self.r[0])

    @property
    def r_hi(self) -> float:
        return float(self.r[-1])


@dataclass
class GridState:
    """Discrete solution (u, R, S) at one time level."""

    t: float
    u: np.ndarray
    R: np.ndarray
    S: np.ndarray

    def copy(self) -> "GridState":
        return GridState(self.t, self.u.copy(), self.R.copy(), self.S.copy())

    def is_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.u))
            and np.all(np.isfinite(self.R))
            and np.all(np.isfinite(self.S))
        )


@dataclass(frozen=True)
class SchemeConfig:
    """Courant number, scheme choice, step budget and blow-up stop level.

    gradient_ceiling is the stop threshold on max_i |S_i|/r_i^alpha; None
    selects the default of 1e4 times the initial maximum.
    """

    cfl: float = 0.9
    scheme: str = "upwind1"
    max_steps: int = 10_000_000
    gradient_ceiling: float | None = None

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError("cfl must lie in (0, 1]")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.max_steps < 0:
            raise ValueError("max_steps must be non-negative")
        if self.gradient_ceiling is not None and self.gradient_ceiling <= 0:
            raise ValueError("gradient_ceiling must be positive")


@dataclass
class RunResult:
    """Final state plus termination bookkeeping from a run."""

    state: GridState
    steps: int
    reason: str  # "t_final" | "gradient_ceiling" | "max_steps"
    detected: bool
    t_detect: float | None
    r_detect: float | None
    gradient_ceiling: float
    observers: list = field(default_factory=list)


def init_state(setup: ProblemSetup, grid: Grid) -> GridState:
    """Sample the initial data at every node; t = 0."""
    r_lo, r_hi = setup.domain
    if not (
        np.isclose(grid.r_lo, r_lo, rtol=1e-12, atol=0.0)
        and np.isclose(grid.r_hi, r_hi, rtol=1e-12, atol=0.0)
    ):
        raise DomainMismatch(
            f"grid [{grid.r_lo}, {grid.r_hi}] != setup domain [{r_lo}, {r_hi}]"
        )
    u, _ = initial_fields(setup, grid.r)
    R, S = initial_riemann(setup, grid.r)
    return GridState(t=0.0, u=np.asarray(u), R=np.asarray(R), S=np.asarray(S))


class Stepper:
    """Owns grid-derived caches and advances states by one time step.

    Node updates read a fixed stencil of the previous state only, so the
    update loops are plain vectorized array expressions.
    """

    def __init__(self, setup: ProblemSetup, grid: Grid, cfg: SchemeConfig):
        self.setup = setup
        self.grid = grid
        self.cfg = cfg
        self.speed: WaveSpeedModel = setup.speed
        self.alpha = setup.alpha
        self.h = grid.h
        # r^alpha via exp(alpha*ln r), cached once; alpha is non-integer for even d
        self.ralpha = np.exp(self.alpha * np.log(grid.r)) if self.alpha else np.ones_like(grid.r)
        self.inv_r = 1.0 / grid.r
        self.base_dt = cfg.cfl * grid.h / setup.speed.c1

    def _tendencies(self, u, R, S):
        c = self.speed.c(u)
        quad = self.speed.c_prime(u) / (4.0 * c * self.ralpha)
        geom = self.alpha * c * self.inv_r
        f_R = quad * (R * R - S * S) - geom * S
        f_S = quad * (S * S - R * R) + geom * R

        h = self.h
        dR = np.zeros_like(R)
        dS = np.zeros_like(S)
        if self.cfg.scheme == "upwind1":
            dR[:-1] = (R[1:] - R[:-1]) / h
            dS[1:] = (S[1:] - S[:-1]) / h
        else:
            sR = self._minmod_slopes(R)
            sS = self._minmod_slopes(S)
            # R winds from the right, S from the left
            face_R = R[1:] - 0.5 * h * sR[1:]
            face_S = S[:-1] + 0.5 * h * sS[:-1]
            dR[1:-1] = (face_R[1:] - face_R[:-1]) / h
            dS[1:-1] = (face_S[1:] - face_S[:-1]) / h

        du_dt = (R + S) / (2.0 * self.ralpha)
        return c * dR + f_R, -c * dS + f_S, du_dt

    def _minmod_slopes(self, q):
        dq = np.diff(q) / self.h
        s = np.zeros_like(q)
        a, b = dq[:-1], dq[1:]
        keep = a * b > 0.0
        s[1:-1] = np.where(keep, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)
        return s

    def _clamp_boundary(self, u, R, S):
        u[0] = u[-1] = self.setup.u0
        R[0] = R[-1] = 0.0
        S[0] = S[-1] = 0.0

    def step(self, state: GridState, dt: float | None = None) -> GridState:
        """One explicit step; raises NonFiniteState if the result overflows."""
        if dt is None:
            dt = self.base_dt
        u, R, S = state.u, state.R, state.S
        # overflow in intermediates is caught by the finite check below
        with np.errstate(over="ignore", invalid="ignore"):
            fR, fS, fu = self._tendencies(u, R, S)
            R1 = R + dt * fR
            S1 = S + dt * fS
            u1 = u + dt * fu
            self._clamp_boundary(u1, R1, S1)
            if self.cfg.scheme == "muscl2":
                fR1, fS1, fu1 = self._tendencies(u1, R1, S1)
                R1 = 0.5 * (R + R1 + dt * fR1)
                S1 = 0.5 * (S + S1 + dt * fS1)
                u1 = 0.5 * (u + u1 + dt * fu1)
                self._clamp_boundary(u1, R1, S1)
        new = GridState(t=state.t + dt, u=u1, R=R1, S=S1)
        if not new.is_finite():
            raise NonFiniteState(
                f"non-finite values after step to t={new.t}", last_state=state
            )
        return new

    def gradient_max(self, state: GridState) -> tuple[float, int]:
        """max_i |S_i|/r_i^alpha and its node index."""
        g = np.abs(state.S) / self.ralpha
        i = int(np.argmax(g))
        return float(g[i]), i


def step(
    state: GridState, setup: ProblemSetup, grid: Grid, cfg: SchemeConfig
) -> GridState:
    """Single-step convenience wrapper around Stepper."""
    return Stepper(setup, grid, cfg).step(state)


def run(
    setup: ProblemSetup,
    grid: Grid,
    cfg: SchemeConfig,
    observers: tuple = (),
) -> RunResult:
    """March from t=0 until t_final, a gradient-ceiling crossing or max_steps.

    Observers are callables invoked with the state once at t=0 and after
    every step, in list order.  NonFiniteState propagates with the last
    finite state attached.
    """
    stepper = Stepper(setup, grid, cfg)
    state = init_state(setup, grid)

    g0, _ = stepper.gradient_max(state)
    if cfg.gradient_ceiling is not None:
        ceiling = cfg.gradient_ceiling
    else:
        ceiling = DEFAULT_CEILING_FACTOR * g0 if g0 > 0 else np.inf

    for obs in observers:
        obs(state)

    t_final = setup.t_final
    steps = 0
    detected = False
    t_detect = None
    r_detect = None
    reason = "max_steps"
    while True:
        if state.t >= t_final - 1e-14 * t_final:
            reason = "t_final"
            break
        if steps >= cfg.max_steps:
            reason = "max_steps"
            break
        dt = min(stepper.base_dt, t_final - state.t)
        state = stepper.step(state, dt)
        steps += 1
        for obs in observers:
            obs(state)
        gmax, i = stepper.gradient_max(state)
        if gmax >= ceiling:
            detected = True
            t_detect = state.t
            r_detect = float(grid.r[i])
            reason = "gradient_ceiling"
            break

    return RunResult(
        state=state,
        steps=steps,
        reason=reason,
        detected=detected,
        t_detect=t_detect,
        r_detect=r_detect,
        gradient_ceiling=ceiling,
        observers=list(observers),
    )
