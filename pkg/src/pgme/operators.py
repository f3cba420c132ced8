"""
Integral operators whose fixed points solve the Robin, Dirichlet and Neumann problems.

All three share the kernel ``f_h`` and differ only in how its integrals are
normalised:

    Robin      T(h)(x) = (1 + gamma int_0^x f_h) / (1 + gamma int_0^inf f_h)
    Dirichlet  T(h)(x) = int_0^x f_h / int_0^inf f_h
    Neumann    T(h)(x) = 1 - gamma_star int_x^inf f_h

Each image is assembled as ``1 - complement`` with the complement proportional
to ``int_x^inf f_h``, which is what keeps differences of ``1 - y`` meaningful
far out in the tail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Dirichlet,
    GridFunction,
    Neumann,
    ProblemSpec,
    Robin,
    kernel_integrals,
    neumann_gamma_max,
)


@dataclass(frozen=True, eq=False)
class OperatorOutput:
    image: GridFunction
    y0: float
    c0: float  # y' = c0 * f_h
    complement: np.ndarray  # 1 - image at full relative precision
    kernel: np.ndarray  # f_h on the grid


def _image(h: GridFunction, complement: np.ndarray) -> GridFunction:
    # clipping only removes roundoff; the exact image is in [0, 1]
    return h.with_values(np.clip(1.0 - complement, 0.0, 1.0), 1.0)


def apply_robin(h: GridFunction, spec: ProblemSpec) -> OperatorOutput:
    if not isinstance(spec.bc, Robin):
        raise TypeError("apply_robin needs a Robin problem")
    h.require_K()
    gamma = spec.bc.gamma
    k = kernel_integrals(h, spec)
    denom = 1.0 + gamma * k.total
    complement = gamma * k.tail / denom
    y0 = 1.0 / denom
    return OperatorOutput(_image(h, complement), y0, gamma * y0, complement, k.f)


def apply_dirichlet(h: GridFunction, spec: ProblemSpec) -> OperatorOutput:
    """Dirichlet operator; an input with ``h(0) != 0`` is projected onto K* first."""
    if not isinstance(spec.bc, Dirichlet):
        raise TypeError("apply_dirichlet needs a Dirichlet problem")
    if h.values[0] != 0.0:
        v = h.values.copy()
        v[0] = 0.0
        h = h.with_values(v)
    h.require_K(star=True)
    k = kernel_integrals(h, spec)
    complement = k.tail / k.total
    return OperatorOutput(_image(h, complement), 0.0, 1.0 / k.total, complement, k.f)


def apply_neumann(h: GridFunction, spec: ProblemSpec) -> OperatorOutput:
    if not isinstance(spec.bc, Neumann):
        raise TypeError("apply_neumann needs a Neumann problem")
    gs = spec.bc.gamma_star
    gmax = neumann_gamma_max(spec.delta)
    if not 0 < gs <= gmax * (1 + 4 * np.finfo(float).eps):
        raise ValueError(f"gamma_star = {gs!r} outside (0, {gmax!r}]")
    h.require_K()
    k = kernel_integrals(h, spec)
    complement = gs * k.tail
    return OperatorOutput(_image(h, complement), 1.0 - gs * k.total, gs, complement, k.f)


_APPLY = {Robin: apply_robin, Dirichlet: apply_dirichlet, Neumann: apply_neumann}


def apply(h: GridFunction, spec: ProblemSpec) -> OperatorOutput:
    """Apply the operator matching ``spec.bc``."""
    return _APPLY[type(spec.bc)](h, spec)


def analytic_derivative(out: OperatorOutput) -> GridFunction:
    """``y' = c0 f_h``, read off the integral representation of the image."""
    return out.image.with_values(out.c0 * out.kernel, 0.0)


# ============================================================================
# Residual checks at a computed fixed point
# ============================================================================


def boundary_residual(spec: ProblemSpec, y0: float, dy0: float) -> float:
    """Signed residual of the condition at ``x = 0``."""
    flux0 = (1.0 + spec.delta * y0**spec.p) * dy0
    if isinstance(spec.bc, Robin):
        return flux0 - spec.bc.gamma * y0
    if isinstance(spec.bc, Neumann):
        return flux0 - spec.bc.gamma_star
    return y0


def ode_residual(x, y, dy, spec: ProblemSpec) -> np.ndarray:
    """``(Psi_y y')' + 2 x y'`` at interior nodes, flux derivative by centred differences."""
    x, y, dy = (np.asarray(a, dtype=float) for a in (x, y, dy))
    flux = (1.0 + spec.delta * np.power(y, spec.p)) * dy
    dflux = (flux[2:] - flux[:-2]) / (x[2:] - x[:-2])
    return dflux + 2.0 * x[1:-1] * dy[1:-1]


def second_difference(x, complement) -> np.ndarray:
    """Centred second difference of ``y = 1 - complement`` at interior nodes."""
    x = np.asarray(x, dtype=float)
    c = np.asarray(complement, dtype=float)
    hl = x[1:-1] - x[:-2]
    hr = x[2:] - x[1:-1]
    d2c = 2.0 * ((c[2:] - c[1:-1]) / hr - (c[1:-1] - c[:-2]) / hl) / (hl + hr)
    return -d2c
