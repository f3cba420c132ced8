"""
Picard iteration to the fixed point, and the delta thresholds below which it is guaranteed.

Each operator is a contraction in the sup norm when ``delta`` is below the unit
root of its gap function:

    Robin       g_gamma(x) = x p (1+x)^{3/2} [(2+x)(1+(1+x)^{3/2}) + 2(1+x)/(gamma sqrt(pi))]
    Dirichlet   g_star(x)  = x p (1+x)^{3/2} (2+x)(1+(1+x)^{3/2})
    Neumann     g(x)       = x (p/sqrt(pi)) [(1+x)(sqrt(1+x) e^{-1/4} + sqrt(pi)) + sqrt(pi)]

``C(x) = 2 x p (1+x)^3 (2+x)`` plays the same role for the rate at which the
Robin solution approaches the Dirichlet one as ``gamma`` grows.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import special

from .core import (
    SQRT_PI,
    Dirichlet,
    GridFunction,
    Neumann,
    ProblemSpec,
    QuadratureConfig,
    Robin,
)
from .operators import analytic_derivative, apply

log = logging.getLogger(__name__)


class ThresholdViolation(ValueError):
    """delta is at or above the contraction threshold of the operator."""

    def __init__(self, spec: ProblemSpec, threshold: float):
        self.spec = spec
        self.threshold = threshold
        super().__init__(
            f"delta = {spec.delta!r} >= threshold {threshold!r} for the {spec.kind} problem "
            f"with p = {spec.p!r}; disable threshold enforcement to iterate anyway"
        )


class NoConvergence(RuntimeError):
    """Picard iteration hit max_iter with the residual still above tolerance."""

    def __init__(self, iterations: int, residual: float, last_iterate: GridFunction):
        self.iterations = iterations
        self.residual = residual
        self.last_iterate = last_iterate
        super().__init__(
            f"no convergence after {iterations} iterations, residual {residual:.3e}"
        )


# ============================================================================
# Gap functions and thresholds
# ============================================================================


def gap_robin(x, gamma, p):
    x = np.asarray(x, dtype=float)
    s = (1 + x) ** 1.5
    return x * p * s * ((2 + x) * (1 + s) + 2 * (1 + x) / (gamma * SQRT_PI))


def gap_dirichlet(x, p):
    x = np.asarray(x, dtype=float)
    s = (1 + x) ** 1.5
    return x * p * s * (2 + x) * (1 + s)


def gap_chat(x, p):
    x = np.asarray(x, dtype=float)
    return 2 * x * p * (1 + x) ** 3 * (2 + x)


def gap_neumann(x, p):
    x = np.asarray(x, dtype=float)
    return x * (p / SQRT_PI) * ((1 + x) * (np.sqrt(1 + x) * math.exp(-0.25) + SQRT_PI) + SQRT_PI)


THRESHOLD_KINDS = ("robin", "dirichlet", "chat", "neumann")


def gap_function(kind: str, p: float, gamma: Optional[float] = None) -> Callable[[float], float]:
    """The gap function of ``kind`` as a scalar callable of delta."""
    if kind == "robin":
        if gamma is None or not gamma > 0:
            raise ValueError("the robin gap function needs gamma > 0")
        return lambda x: float(gap_robin(x, gamma, p))
    if kind == "dirichlet":
        return lambda x: float(gap_dirichlet(x, p))
    if kind == "chat":
        return lambda x: float(gap_chat(x, p))
    if kind == "neumann":
        return lambda x: float(gap_neumann(x, p))
    raise ValueError(f"unknown threshold kind {kind!r}; expected one of {THRESHOLD_KINDS}")


@dataclass(frozen=True)
class ThresholdResult:
    kind: str
    p: float
    gamma: Optional[float]
    delta_root: float
    bracket: tuple
    gap_value: float


def threshold(kind: str, p: float, gamma: Optional[float] = None) -> ThresholdResult:
    """Unit root of an increasing gap function by bisection.

    The bracket starts at ``[0, 1]`` and doubles until it straddles the root;
    bisection then runs until the midpoint no longer moves in double precision.
    """
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p!r}")
    g = gap_function(kind, p, gamma)
    lo, hi = 0.0, 1.0
    while g(hi) < 1.0:
        lo, hi = hi, 2.0 * hi
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    root = lo if abs(g(lo) - 1.0) <= abs(g(hi) - 1.0) else hi
    return ThresholdResult(kind, p, gamma, root, (lo, hi), g(root))


def threshold_for(spec: ProblemSpec) -> ThresholdResult:
    """Contraction threshold of the operator that solves ``spec``."""
    if isinstance(spec.bc, Robin):
        return threshold("robin", spec.p, spec.bc.gamma)
    if isinstance(spec.bc, Dirichlet):
        return threshold("dirichlet", spec.p)
    return threshold("neumann", spec.p)


def contraction_bound(spec: ProblemSpec) -> float:
    """Gap function of the operator for ``spec``, evaluated at ``spec.delta``."""
    if isinstance(spec.bc, Robin):
        return float(gap_robin(spec.delta, spec.bc.gamma, spec.p))
    if isinstance(spec.bc, Dirichlet):
        return float(gap_dirichlet(spec.delta, spec.p))
    return float(gap_neumann(spec.delta, spec.p))


# ============================================================================
# Picard iteration
# ============================================================================


@dataclass(frozen=True)
class SolverConfig:
    """
    initial_guess is ``"erf"``, ``"one"`` or a GridFunction on the solver grid.
    """

    tol_fixed_point: float = 1e-12
    max_iter: int = 200
    initial_guess: Union[str, GridFunction] = "erf"
    enforce_threshold: bool = True

    def __post_init__(self):
        if not self.tol_fixed_point > 0:
            raise ValueError("tol_fixed_point must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if isinstance(self.initial_guess, str) and self.initial_guess not in ("erf", "one"):
            raise ValueError(f"unknown initial guess {self.initial_guess!r}")


@dataclass(eq=False)
class SolveResult:
    spec: ProblemSpec
    solution: GridFunction
    iterations: int
    residual: float
    contraction_estimate: float
    y0: float
    yprime0: float
    derivative: np.ndarray
    complement: np.ndarray
    steps: list = field(default_factory=list)
    outside_theory: bool = False

    @property
    def x(self) -> np.ndarray:
        return self.solution.grid

    @property
    def y(self) -> np.ndarray:
        return self.solution.values


def initial_guess(x: np.ndarray, scfg: SolverConfig) -> GridFunction:
    guess = scfg.initial_guess
    if isinstance(guess, GridFunction):
        if not np.array_equal(guess.grid, x):
            raise ValueError("user-supplied initial guess must live on the solver grid")
        return guess
    if guess == "erf":
        return GridFunction(x, special.erf(x))
    return GridFunction.constant(x, 1.0)


# ratios of steps below this are roundoff, not contraction
_STEP_FLOOR = 1e-14


def picard_solve(
    spec: ProblemSpec,
    qcfg: Optional[QuadratureConfig] = None,
    scfg: Optional[SolverConfig] = None,
) -> SolveResult:
    """Iterate ``y <- T(y)`` until ``||T(y) - y||_inf <= tol_fixed_point``.

    The returned solution ``y`` satisfies the tolerance itself: its residual is
    measured by one more application of the operator, whose kernel also
    supplies ``y' = c0 f_y``.

    Raises
    ------
    ThresholdViolation
        ``delta`` is not below the threshold and ``enforce_threshold`` is set.
    NoConvergence
        ``max_iter`` operator applications did not reach the tolerance.
    """
    qcfg = qcfg or QuadratureConfig()
    scfg = scfg or SolverConfig()
    thr = threshold_for(spec).delta_root
    outside = spec.delta >= thr
    if outside and scfg.enforce_threshold:
        raise ThresholdViolation(spec, thr)
    if outside:
        log.warning("delta = %g >= threshold %g: convergence is not guaranteed", spec.delta, thr)

    x = qcfg.grid(spec.delta)
    h = initial_guess(x, scfg)
    out = apply(h, spec)
    steps = [h.sup_distance(out.image)]
    y, y_out = out.image, out
    for it in range(2, scfg.max_iter + 1):
        out = apply(y, spec)
        step = y.sup_distance(out.image)
        steps.append(step)
        if step <= scfg.tol_fixed_point:
            break
        y, y_out = out.image, out
    else:
        raise NoConvergence(scfg.max_iter, steps[-1], y)

    ratios = [b / a for a, b in zip(steps, steps[1:]) if a > _STEP_FLOOR]
    dy = analytic_derivative(out).values
    log.debug("%s p=%g delta=%g: %d iterations, residual %.3e", spec.kind, spec.p, spec.delta, it, steps[-1])
    return SolveResult(
        spec=spec,
        solution=y,
        iterations=it,
        residual=steps[-1],
        contraction_estimate=max(ratios, default=0.0),
        y0=float(y.values[0]) if isinstance(spec.bc, Dirichlet) else y_out.y0,
        yprime0=float(dy[0]),
        derivative=dy,
        complement=y_out.complement,
        steps=steps,
        outside_theory=outside,
    )
