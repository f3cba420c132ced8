"""Map dimensional Stefan-problem data to the dimensionless boundary coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional


class NonPositiveParameter(ValueError):
    pass


@dataclass(frozen=True)
class PhysicalParams:
    """SI material and boundary data.

    k0 [W/(m K)], rho [kg/m^3], c [J/(kg K)], h_coef [W s^1/2/(m^2 K)],
    q0 [W s^1/2/m^2], Tf and T0 [K].  Only the fields needed by the requested
    coefficient have to be set.
    """

    k0: float
    rho: float
    c: float
    h_coef: Optional[float] = None
    q0: Optional[float] = None
    Tf: Optional[float] = None
    T0: Optional[float] = None

    def __post_init__(self):
        for name in ("k0", "rho", "c", "h_coef", "q0", "Tf", "T0"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise NonPositiveParameter(f"{name} must be > 0, got {v!r}")
        if self.T0 is not None and self.Tf is not None and not self.T0 > self.Tf:
            raise ValueError(f"melting setup needs T0 > Tf, got T0={self.T0!r}, Tf={self.Tf!r}")

    @property
    def diffusivity(self) -> float:
        return self.k0 / (self.rho * self.c)


def biot(params: PhysicalParams) -> float:
    """Generalized Biot number ``h sqrt(alpha0) / k0``."""
    if params.h_coef is None:
        raise NonPositiveParameter("h_coef is required for the Robin coefficient")
    return params.h_coef * math.sqrt(params.diffusivity) / params.k0


def biot_flux(params: PhysicalParams) -> float:
    """``q0 sqrt(alpha0) / (k0 Tf)``."""
    if params.q0 is None or params.Tf is None:
        raise NonPositiveParameter("q0 and Tf are required for the Neumann coefficient")
    return params.q0 * math.sqrt(params.diffusivity) / (params.k0 * params.Tf)


def physical_to_gamma(params: PhysicalParams, which: str) -> float:
    """``gamma = 2 Bi`` for ``which="robin"``, ``gamma_star = 2 Bi*`` for ``"neumann"``."""
    if which == "robin":
        return 2.0 * biot(params)
    if which == "neumann":
        return 2.0 * biot_flux(params)
    raise ValueError(f"which must be 'robin' or 'neumann', got {which!r}")
