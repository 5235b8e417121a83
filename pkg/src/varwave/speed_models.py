"""Wave-speed models c(u) with derivatives and verified two-sided bounds.

Every model declares a lower speed bound ``c0`` and an upper bound ``c1``
that caps both the speed and its derivative:

    0 < c0 <= c(u) <= c1   and   |c'(u)| <= c1.

The declared constants are inputs, not inferred quantities: downstream
blow-up constants are built from the declared values, so ``validate_bounds``
checks them by dense sampling instead of silently replacing them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import BoundsViolation

_REL_TOL = 1e-12


@dataclass(frozen=True)
class SpeedBoundsReport:
    """Sampled extrema of c and |c'| against the declared bounds."""

    c_min: float
    c_max: float
    c_prime_max: float
    declared_c0: float
    declared_c1: float
    probe_count: int
    ok: bool


@dataclass(frozen=True)
class WaveSpeedModel:
    """Base for all speed models; subclasses implement c and c_prime."""

    c0: float
    c1: float

    def __post_init__(self):
        if not (0.0 < self.c0 <= self.c1):
            raise BoundsViolation(
                f"need 0 < c0 <= c1, got c0={self.c0}, c1={self.c1}"
            )

    def c(self, u):
        raise NotImplementedError

    def c_prime(self, u):
        raise NotImplementedError

    def probe_interval(self) -> tuple[float, float]:
        """Interval over which bounds are sampled (one period by default)."""
        return (0.0, 2.0 * np.pi)


@dataclass(frozen=True)
class OseenFrankSpeed(WaveSpeedModel):
    """Planar-director speed c(u)^2 = k1*sin(u)^2 + k3*cos(u)^2.

    k1 and k3 are the splay and bend elastic constants; the speed is
    2*pi-periodic (with fundamental period pi) and smooth.
    """

    k1: float = 1.0
    k3: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.k1 <= 0.0 or self.k3 <= 0.0:
            raise BoundsViolation("elastic constants k1, k3 must be positive")

    def c(self, u):
        u = np.asarray(u, dtype=float)
        out = np.sqrt(self.k1 * np.sin(u) ** 2 + self.k3 * np.cos(u) ** 2)
        return out if out.ndim else float(out)

    def c_prime(self, u):
        u = np.asarray(u, dtype=float)
        out = (self.k1 - self.k3) * np.sin(u) * np.cos(u) / self.c(u)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class ConstantSpeed(WaveSpeedModel):
    """Fixed speed; the d=1 linear-transport regression case."""

    value: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not (self.c0 <= self.value <= self.c1):
            raise BoundsViolation(
                f"constant speed {self.value} outside declared [{self.c0}, {self.c1}]"
            )

    @classmethod
    def of(cls, value: float) -> "ConstantSpeed":
        return cls(c0=value, c1=value, value=value)

    def c(self, u):
        u = np.asarray(u, dtype=float)
        out = np.full_like(u, self.value, dtype=float)
        return out if out.ndim else float(out)

    def c_prime(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u, dtype=float)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class TabulatedSpeed(WaveSpeedModel):
    """Speed interpolated from (knot, value) tables.

    Monotone cubic (PCHIP) interpolation keeps c within the hull of the
    table values, so the declared bounds survive interpolation.  The
    interpolant is C1 at the knots; callers needing more smoothness should
    use an analytic model.  ``derivative_values``, when given, are
    cross-checked against the interpolant's own knot derivatives.
    """

    knots: tuple = ()
    values: tuple = ()
    derivative_values: tuple | None = None
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)
    _interp_d: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        super().__post_init__()
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if knots.size < 2:
            raise BoundsViolation("tabulated speed needs at least two knots")
        if np.any(np.diff(knots) <= 0):
            raise BoundsViolation("knots must be strictly increasing")
        if np.any(values <= 0):
            raise BoundsViolation("tabulated speeds must be positive")
        interp = PchipInterpolator(knots, values, extrapolate=False)
        object.__setattr__(self, "_interp", interp)
        object.__setattr__(self, "_interp_d", interp.derivative())
        if self.derivative_values is not None:
            dv = np.asarray(self.derivative_values, dtype=float)
            got = self._interp_d(knots)
            if not np.allclose(dv, got, rtol=1e-8, atol=1e-10):
                raise BoundsViolation(
                    "supplied derivative values disagree with the monotone "
                    "cubic interpolant at the knots"
                )

    def probe_interval(self) -> tuple[float, float]:
        return (float(self.knots[0]), float(self.knots[-1]))

    def c(self, u):
        u = np.asarray(u, dtype=float)
        out = self._interp(u)
        return out if out.ndim else float(out)

    def c_prime(self, u):
        u = np.asarray(u, dtype=float)
        out = self._interp_d(u)
        return out if out.ndim else float(out)


def eval_c(model: WaveSpeedModel, u):
    """Speed c(u); total on any validated model."""
    return model.c(u)


def eval_c_prime(model: WaveSpeedModel, u):
    """Derivative c'(u) of the wave speed."""
    return model.c_prime(u)


def validate_bounds(model: WaveSpeedModel, probe_count: int = 100_000) -> SpeedBoundsReport:
    """Sample c and c' on a dense probe grid and check the declared bounds.

    Raises BoundsViolation if min c < c0, max c > c1 or max |c'| > c1
    beyond a relative tolerance of 1e-12.
    """
    if probe_count < 2:
        raise ValueError("probe_count must be at least 2")
    lo, hi = model.probe_interval()
    u = np.linspace(lo, hi, probe_count)
    c = np.asarray(model.c(u))
    cp = np.asarray(model.c_prime(u))
    c_min = float(np.min(c))
    c_max = float(np.max(c))
    cp_max = float(np.max(np.abs(cp)))
    slack0 = _REL_TOL * abs(model.c0)
    slack1 = _REL_TOL * abs(model.c1)
    ok = (
        c_min >= model.c0 - slack0
        and c_max <= model.c1 + slack1
        and cp_max <= model.c1 + slack1
    )
    report = SpeedBoundsReport(
        c_min=c_min,
        c_max=c_max,
        c_prime_max=cp_max,
        declared_c0=model.c0,
        declared_c1=model.c1,
        probe_count=probe_count,
        ok=ok,
    )
    if not ok:
        raise BoundsViolation(
            f"declared bounds c0={model.c0}, c1={model.c1} violated: "
            f"sampled min c={c_min}, max c={c_max}, max |c'|={cp_max}"
        )
    return report
