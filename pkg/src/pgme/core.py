"""
Candidate functions, the conductivity kernel and the quadrature used by every operator.

A candidate ``h`` lives on a finite grid ``0 = x_0 < ... < x_N = x_max`` and is
frozen at ``h = 1`` beyond ``x_max``.  With that closure the conductivity factor
is the constant ``1 + delta`` in the tail, so every integral out to infinity has
an analytic erfc remainder.

Two quadrature rules are used:

* the inner integral ``I(x) = int_0^x xi / Psi_h(xi) dxi`` is a plain composite
  trapezoid (second order, exact whenever ``Psi_h`` is constant);
* integrals of the kernel ``f_h`` use the end-corrected (Hermite) trapezoid,
  ``h/2 (f_i + f_{i+1}) + h^2/12 (f'_i - f'_{i+1})`` per panel, with ``f'``
  estimated by second-order finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import special

SQRT_PI = math.sqrt(math.pi)


# ============================================================================
# Problem description
# ============================================================================


@dataclass(frozen=True)
class Robin:
    """Convective condition ``Psi(y(0)) y'(0) = gamma y(0)``."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"Robin coefficient gamma must be > 0, got {self.gamma!r}")


@dataclass(frozen=True)
class Dirichlet:
    """Prescribed value ``y(0) = 0``."""


@dataclass(frozen=True)
class Neumann:
    """Prescribed flux ``Psi(y(0)) y'(0) = gamma_star``."""

    gamma_star: float

    def __post_init__(self):
        if not self.gamma_star > 0:
            raise ValueError(
                f"Neumann coefficient gamma_star must be > 0, got {self.gamma_star!r}"
            )


BoundaryCondition = Union[Robin, Dirichlet, Neumann]


def neumann_gamma_max(delta: float) -> float:
    """Largest admissible flux coefficient, ``2 / sqrt(pi (1 + delta))``."""
    return 2.0 / math.sqrt(math.pi * (1.0 + delta))


@dataclass(frozen=True)
class ProblemSpec:
    """One of the three boundary value problems.

    ``[(1 + delta y^p) y']' + 2 x y' = 0`` on ``(0, inf)`` with ``y(inf) = 1``
    and the boundary condition ``bc`` at ``x = 0``.
    """

    p: float
    delta: float
    bc: BoundaryCondition

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"exponent p must be >= 1, got {self.p!r}")
        if not self.delta >= 0:
            raise ValueError(f"delta must be >= 0, got {self.delta!r}")
        if not isinstance(self.bc, (Robin, Dirichlet, Neumann)):
            raise TypeError(f"unknown boundary condition {self.bc!r}")
        if isinstance(self.bc, Neumann):
            gmax = neumann_gamma_max(self.delta)
            # one ulp of slack so that gamma_star = neumann_gamma_max(delta) is accepted
            if self.bc.gamma_star > gmax * (1 + 4 * np.finfo(float).eps):
                raise ValueError(
                    f"gamma_star = {self.bc.gamma_star!r} exceeds 2/sqrt(pi(1+delta)) = {gmax!r}"
                )

    @property
    def kind(self) -> str:
        return type(self.bc).__name__.lower()

    @property
    def coefficient(self) -> float:
        """gamma for Robin, gamma_star for Neumann, 0 for Dirichlet."""
        if isinstance(self.bc, Robin):
            return self.bc.gamma
        if isinstance(self.bc, Neumann):
            return self.bc.gamma_star
        return 0.0

    @classmethod
    def robin(cls, p, delta, gamma):
        return cls(p, delta, Robin(gamma))

    @classmethod
    def dirichlet(cls, p, delta):
        return cls(p, delta, Dirichlet())

    @classmethod
    def neumann(cls, p, delta, gamma_star):
        return cls(p, delta, Neumann(gamma_star))


# ============================================================================
# Grid functions
# ============================================================================


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function on ``[0, x_max]`` plus its constant value beyond."""

    grid: np.ndarray
    values: np.ndarray
    tail_value: float = 1.0

    def __post_init__(self):
        grid = _frozen(self.grid)
        values = _frozen(self.values)
        if grid.ndim != 1 or grid.size < 3:
            raise ValueError("grid must be one-dimensional with at least 3 nodes")
        if grid[0] != 0.0:
            raise ValueError("grid must start at x = 0")
        if not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if values.shape != grid.shape:
            raise ValueError(f"values shape {values.shape} does not match grid {grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.grid.size

    @property
    def x_max(self) -> float:
        return float(self.grid[-1])

    def in_K(self, star: bool = False) -> bool:
        """Membership in K (``0 <= h <= 1``, ``h(inf) = 1``), or K* when ``star``."""
        ok = (
            self.tail_value == 1.0
            and bool(np.all(self.values >= 0.0))
            and bool(np.all(self.values <= 1.0))
        )
        if star:
            ok = ok and self.values[0] == 0.0
        return ok

    def require_K(self, star: bool = False) -> None:
        if not self.in_K(star):
            name = "K*" if star else "K"
            lo, hi = float(self.values.min()), float(self.values.max())
            raise ValueError(
                f"candidate is not in {name}: values span [{lo!r}, {hi!r}], "
                f"h(0) = {float(self.values[0])!r}, tail_value = {self.tail_value!r}"
            )

    def with_values(self, values, tail_value: Optional[float] = None) -> "GridFunction":
        tv = self.tail_value if tail_value is None else tail_value
        return GridFunction(self.grid, values, tv)

    def sup_distance(self, other: "GridFunction") -> float:
        """Discrete sup-norm of the difference; tails are assumed equal."""
        if other.grid.shape != self.grid.shape or not np.array_equal(other.grid, self.grid):
            raise ValueError("grid functions live on different grids")
        return float(np.max(np.abs(self.values - other.values)))

    @classmethod
    def constant(cls, grid, value: float) -> "GridFunction":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.full_like(grid, value))

    @classmethod
    def from_callable(cls, grid, func, tail_value: float = 1.0) -> "GridFunction":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, func(grid), tail_value)


# ============================================================================
# Quadrature configuration
# ============================================================================


@dataclass(frozen=True)
class QuadratureConfig:
    """Uniform grid on ``[0, x_max]``.

    ``x_max`` defaults to ``6 sqrt(1 + delta)``; the neglected Gaussian mass
    beyond it must stay below ``10 * tail_tol``.
    """

    n_points: int = 2001
    x_max: Optional[float] = None
    tail_tol: float = 1e-14

    def __post_init__(self):
        if self.n_points < 3:
            raise ValueError("n_points must be >= 3")
        if self.x_max is not None and not self.x_max > 0:
            raise ValueError("x_max must be > 0")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be > 0")

    def resolve_x_max(self, delta: float) -> float:
        x_max = 6.0 * math.sqrt(1.0 + delta) if self.x_max is None else float(self.x_max)
        s = math.sqrt(1.0 + delta)
        neglected = s * SQRT_PI / 2 * math.erfc(x_max / s)
        if neglected > 10 * self.tail_tol:
            raise ValueError(
                f"x_max = {x_max} too small for delta = {delta}: neglected tail mass "
                f"{neglected:.3e} exceeds 10*tail_tol = {10 * self.tail_tol:.3e}"
            )
        return x_max

    def grid(self, delta: float) -> np.ndarray:
        return np.linspace(0.0, self.resolve_x_max(delta), self.n_points)


# ============================================================================
# Kernel and quadrature
# ============================================================================


def psi(h: GridFunction, spec: ProblemSpec, i: Optional[int] = None):
    """Conductivity factor ``1 + delta h^p`` at node ``i`` (all nodes if ``i`` is None)."""
    v = h.values if i is None else h.values[i]
    return 1.0 + spec.delta * np.power(v, spec.p)


def trapezoid_panels(f, x) -> np.ndarray:
    """Per-panel trapezoid integrals of samples ``f`` over ``x``."""
    f = np.asarray(f, dtype=float)
    return 0.5 * np.diff(x) * (f[1:] + f[:-1])


def corrected_panels(f, x) -> np.ndarray:
    """Per-panel end-corrected trapezoid integrals.

    Exact for cubics on each panel when the derivative estimates are exact;
    with second-order finite-difference slopes the cumulative error is O(dx^4)
    because the corrections telescope.
    """
    f = np.asarray(f, dtype=float)
    dx = np.diff(x)
    df = np.gradient(f, x, edge_order=2)
    return 0.5 * dx * (f[1:] + f[:-1]) + dx**2 / 12.0 * (df[:-1] - df[1:])


def _cumulative(panels) -> np.ndarray:
    out = np.empty(panels.size + 1)
    out[0] = 0.0
    np.cumsum(panels, out=out[1:])
    return out


def _reverse_cumulative(panels, start: float) -> np.ndarray:
    out = np.empty(panels.size + 1)
    out[-1] = start
    out[:-1] = start + np.cumsum(panels[::-1])[::-1]
    return out


def integral_0_to_x(f, x=None, end_correction: bool = False) -> np.ndarray:
    """Running integral ``int_0^{x_i} f`` at every node; 0 at the first node.

    ``f`` is a GridFunction or an array sampled on ``x``.  The plain trapezoid
    is monotone for non-negative integrands; ``end_correction=True`` trades that
    for fourth-order accuracy on smooth integrands.
    """
    if isinstance(f, GridFunction):
        x, f = f.grid, f.values
    if x is None:
        raise ValueError("x is required when f is a plain array")
    panels = corrected_panels(f, x) if end_correction else trapezoid_panels(f, x)
    return _cumulative(panels)


def inner_integral(h: GridFunction, spec: ProblemSpec) -> np.ndarray:
    """``I(x) = int_0^x xi / Psi_h(xi) dxi`` by composite trapezoid."""
    return _cumulative(trapezoid_panels(h.grid / psi(h, spec), h.grid))


def tail_closure(inner_at_xmax: float, x_max: float, delta: float) -> float:
    """``int_{x_max}^inf f_h`` assuming ``h = 1`` (so ``Psi = 1 + delta``) beyond ``x_max``."""
    a = 1.0 + delta
    s = math.sqrt(a)
    # exp(x_max^2/a) erfc(x_max/s) == erfcx(x_max/s); avoids overflow times underflow
    return math.exp(-2.0 * inner_at_xmax) * s * SQRT_PI / 2 * float(special.erfcx(x_max / s)) / a


def kernel_f(h: GridFunction, spec: ProblemSpec) -> GridFunction:
    """``f_h(x) = exp(-2 I(x)) / Psi_h(x)`` on the grid of ``h``; decays to 0."""
    return h.with_values(np.exp(-2.0 * inner_integral(h, spec)) / psi(h, spec), 0.0)


@dataclass(frozen=True, eq=False)
class KernelIntegrals:
    """Kernel samples with their running integrals from 0 and to infinity."""

    f: np.ndarray
    inner: np.ndarray
    head: np.ndarray  # int_0^x f
    tail: np.ndarray  # int_x^inf f
    total: float


def kernel_integrals(h: GridFunction, spec: ProblemSpec) -> KernelIntegrals:
    """Everything the operators need from one candidate, in a single sweep.

    Both running integrals accumulate the same corrected panels; the tail one is
    summed from the right so that ``int_x^inf f`` keeps full relative precision
    where it is tiny.
    """
    inner = inner_integral(h, spec)
    f = np.exp(-2.0 * inner) / psi(h, spec)
    panels = corrected_panels(f, h.grid)
    closure = tail_closure(float(inner[-1]), h.x_max, spec.delta)
    tail = _reverse_cumulative(panels, closure)
    head = _cumulative(panels)
    return KernelIntegrals(f=f, inner=inner, head=head, tail=tail, total=float(tail[0]))


def integral_0_to_inf(h: GridFunction, spec: ProblemSpec) -> float:
    """``int_0^inf f_h`` including the analytic tail beyond ``x_max``."""
    return kernel_integrals(h, spec).total


def kernel_envelope(x, delta: float):
    """Lower and upper Gaussian envelopes of ``f_h`` valid for every ``h`` in K."""
    x = np.asarray(x, dtype=float)
    return np.exp(-x**2) / (1.0 + delta), np.exp(-x**2 / (1.0 + delta))
