"""
Checks of the quantitative statements around the fixed-point construction.

* closed forms at ``delta = 0`` (erf-based) for all three problems;
* random elements of K and K* for stress-testing the kernel estimates;
* the pointwise and integral estimates behind the contraction constants;
* the ``1/gamma`` approach of the Robin solution to the Dirichlet one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .core import (
    SQRT_PI,
    Dirichlet,
    GridFunction,
    ProblemSpec,
    QuadratureConfig,
    Robin,
    integral_0_to_x,
    kernel_envelope,
    kernel_integrals,
    psi,
)
from .operators import apply, second_difference
from .solver import (
    SolveResult,
    SolverConfig,
    ThresholdViolation,
    contraction_bound,
    gap_chat,
    picard_solve,
    threshold,
)


class BoundViolation(AssertionError):
    """A kernel estimate failed beyond the quadrature tolerance."""

    def __init__(self, item: str, slack: float, details: dict):
        self.item = item
        self.slack = slack
        self.details = details
        super().__init__(f"estimate {item!r} violated: slack {slack:.3e} ({details})")


# ============================================================================
# delta = 0 closed forms
# ============================================================================


def closed_form_delta0(spec: ProblemSpec, x) -> GridFunction:
    """Exact solution for ``delta = 0`` sampled on ``x``."""
    if spec.delta != 0:
        raise ValueError(f"closed forms exist only for delta = 0, got {spec.delta!r}")
    x = np.asarray(x, dtype=float)
    if isinstance(spec.bc, Robin):
        g = spec.bc.gamma * SQRT_PI / 2
        y = (1 + g * special.erf(x)) / (1 + g)
    elif isinstance(spec.bc, Dirichlet):
        y = special.erf(x)
    else:
        y = 1 - spec.bc.gamma_star * SQRT_PI / 2 * special.erfc(x)
    return GridFunction(x, y)


# ============================================================================
# Random candidates
# ============================================================================


def random_K(rng: np.random.Generator, x, star: bool = False, max_bumps: int = 4) -> GridFunction:
    """Smooth non-decreasing element of K (of K* when ``star``).

    Normalised cumulative integral of a random mixture of Gaussian bumps, lifted
    by a random offset at x = 0 unless ``star``.
    """
    x = np.asarray(x, dtype=float)
    x_max = x[-1]
    k = rng.integers(1, max_bumps + 1)
    centers = rng.uniform(0.0, 0.6 * x_max, k)
    widths = rng.uniform(0.05, 0.3 * x_max, k)
    weights = rng.uniform(0.1, 1.0, k)
    density = np.sum(weights[:, None] * np.exp(-(((x[None, :] - centers[:, None]) / widths[:, None]) ** 2)), axis=0)
    F = integral_0_to_x(density, x)
    F = F / F[-1]
    offset = 0.0 if star else rng.uniform(0.0, 1.0) * rng.integers(0, 2)
    h = np.clip(offset + (1.0 - offset) * F, 0.0, 1.0)
    h[-1] = 1.0
    if star:
        h[0] = 0.0
    gf = GridFunction(x, h)
    gf.require_K(star)
    return gf


# ============================================================================
# Estimates on pairs of candidates
# ============================================================================


@dataclass
class LemmaReport:
    p: float
    delta: float
    trials: int
    slacks: dict = field(default_factory=dict)  # item -> smallest (bound - lhs) seen

    @property
    def ok(self) -> bool:
        return all(s >= 0 for s in self.slacks.values())


def _record(report: LemmaReport, item: str, slack: float, tol: float, details: dict):
    report.slacks[item] = min(report.slacks.get(item, math.inf), slack)
    if slack < -tol:
        raise BoundViolation(item, slack, details)


def verify_lemma_bounds(
    p: float,
    delta: float,
    trials: int,
    gammas: Sequence[float] = (0.5, 1.0, 5.0, 50.0),
    seed: int = 0,
    qcfg: Optional[QuadratureConfig] = None,
    tol: float = 1e-9,
) -> LemmaReport:
    """Draw ``trials`` random pairs in K (and in K*) and check every kernel estimate.

    Items, each recorded as the smallest ``bound - lhs`` over nodes and trials:

    ``kernel_envelope``
        ``exp(-x^2)/(1+d) <= f_h(x) <= exp(-x^2/(1+d))``
    ``total_mass``
        ``sqrt(pi)/(2(1+d)) <= int_0^inf f_h <= sqrt(1+d) sqrt(pi)/2``
    ``robin_denominator``
        ``gamma sqrt(pi)/(2(1+d)) < 1 + gamma int_0^inf f_h <= 1 + gamma sqrt(1+d) sqrt(pi)/2``
    ``inverse_conductivity``
        ``|1/Psi_1 - 1/Psi_2| <= d p ||y1 - y2||``
    ``exponential_factor``
        ``|exp(-2 I_1) - exp(-2 I_2)| <= 2 d p x^2 exp(-x^2/(1+d)) ||y1 - y2||``
    ``kernel_difference``
        ``int_0^x |f_1 - f_2| <= (sqrt(pi)/2) d p sqrt(1+d) (2+d) ||y1 - y2||``
    ``robin_normalizer``
        ``|1/(1+g A_1) - 1/(1+g A_2)| <= 2 (1+d)^{5/2} d p (2+d) ||y1 - y2|| / (g sqrt(pi))``
    ``dirichlet_normalizer``
        ``|1/A_1 - 1/A_2| <= 2 (1+d)^{5/2} d p (2+d) ||y1 - y2|| / sqrt(pi)`` on K*

    Raises BoundViolation as soon as a slack drops below ``-tol``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    qcfg = qcfg or QuadratureConfig()
    rng = np.random.default_rng(seed)
    report = LemmaReport(p, delta, trials)
    spec = ProblemSpec.dirichlet(p, delta)  # only p and delta enter the kernel
    x = qcfg.grid(delta)
    lo_env, hi_env = kernel_envelope(x, delta)
    a = 1.0 + delta
    mass_lo, mass_hi = SQRT_PI / (2 * a), math.sqrt(a) * SQRT_PI / 2
    d_const = SQRT_PI / 2 * delta * p * math.sqrt(a) * (2 + delta)
    n_const = 2 * a**2.5 * delta * p * (2 + delta) / SQRT_PI

    for t in range(trials):
        for star in (False, True):
            y1 = random_K(rng, x, star)
            y2 = random_K(rng, x, star)
            k1, k2 = kernel_integrals(y1, spec), kernel_integrals(y2, spec)
            norm = y1.sup_distance(y2)
            info = {"trial": t, "star": star, "norm": norm}

            for k in (k1, k2):
                _record(report, "kernel_envelope", float(np.min(k.f - lo_env)), tol, info)
                _record(report, "kernel_envelope", float(np.min(hi_env - k.f)), tol, info)
                _record(report, "total_mass", k.total - mass_lo, tol, info)
                _record(report, "total_mass", mass_hi - k.total, tol, info)
                for g in gammas:
                    den = 1 + g * k.total
                    _record(report, "robin_denominator", den - g * SQRT_PI / (2 * a), tol, info)
                    _record(report, "robin_denominator", 1 + g * mass_hi - den, tol, info)

            if star:
                lhs = abs(1 / k1.total - 1 / k2.total)
                _record(report, "dirichlet_normalizer", n_const * norm - lhs, tol, info)
                continue

            lhs = np.abs(1 / psi(y1, spec) - 1 / psi(y2, spec))
            _record(report, "inverse_conductivity", float(np.min(delta * p * norm - lhs)), tol, info)

            lhs = np.abs(np.exp(-2 * k1.inner) - np.exp(-2 * k2.inner))
            rhs = 2 * delta * p * x**2 * np.exp(-x**2 / a) * norm
            _record(report, "exponential_factor", float(np.min(rhs - lhs)), tol, info)

            lhs = integral_0_to_x(np.abs(k1.f - k2.f), x)
            _record(report, "kernel_difference", float(np.min(d_const * norm - lhs)), tol, info)

            for g in gammas:
                lhs = abs(1 / (1 + g * k1.total) - 1 / (1 + g * k2.total))
                _record(report, "robin_normalizer", n_const * norm / g - lhs, tol, {**info, "gamma": g})
    return report


def empirical_contraction(
    spec: ProblemSpec,
    trials: int,
    seed: int = 0,
    qcfg: Optional[QuadratureConfig] = None,
) -> float:
    """Largest ``||T h1 - T h2|| / ||h1 - h2||`` over random pairs."""
    qcfg = qcfg or QuadratureConfig()
    rng = np.random.default_rng(seed)
    x = qcfg.grid(spec.delta)
    star = isinstance(spec.bc, Dirichlet)
    worst = 0.0
    for _ in range(trials):
        h1, h2 = random_K(rng, x, star), random_K(rng, x, star)
        norm = h1.sup_distance(h2)
        if norm == 0:
            continue
        worst = max(worst, apply(h1, spec).image.sup_distance(apply(h2, spec).image) / norm)
    return worst


def contraction_margin(spec: ProblemSpec, trials: int, seed: int = 0, qcfg=None) -> float:
    """Gap function value minus the empirical contraction ratio (non-negative when consistent)."""
    return contraction_bound(spec) - empirical_contraction(spec, trials, seed, qcfg)


# ============================================================================
# Robin -> Dirichlet as gamma grows
# ============================================================================


def convergence_bound(gamma, p: float, delta: float):
    """``2 (1+d)^{5/2} / (gamma sqrt(pi) (1 - C(d)))``, the explicit 1/gamma rate."""
    c = float(gap_chat(delta, p))
    if c >= 1:
        return np.full_like(np.asarray(gamma, dtype=float), np.inf)
    return 2 * (1 + delta) ** 2.5 / (np.asarray(gamma, dtype=float) * SQRT_PI * (1 - c))


def fit_order(gammas, errors, skip_first: bool = True) -> float:
    """Least-squares slope of log(error) against log(gamma)."""
    g = np.log(np.asarray(gammas, dtype=float))
    e = np.log(np.asarray(errors, dtype=float))
    if skip_first and g.size > 2:
        g, e = g[1:], e[1:]
    return float(np.polyfit(g, e, 1)[0])


@dataclass
class ConvergenceReport:
    p: float
    delta: float
    gammas: list
    errors: list
    fitted_order: float
    bound_values: list
    dirichlet: Optional[SolveResult] = None

    @property
    def within_bound(self) -> bool:
        return all(e <= b for e, b in zip(self.errors, self.bound_values))


def convergence_study(
    p: float,
    delta: float,
    gammas: Sequence[float],
    qcfg: Optional[QuadratureConfig] = None,
    scfg: Optional[SolverConfig] = None,
) -> ConvergenceReport:
    """Sup-norm distance between Robin solutions and the Dirichlet solution per gamma."""
    gammas = [float(g) for g in gammas]
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise ValueError("gammas must be strictly increasing")
    chat = threshold("chat", p).delta_root
    if delta >= chat:
        raise ThresholdViolation(ProblemSpec.dirichlet(p, delta), chat)
    star = picard_solve(ProblemSpec.dirichlet(p, delta), qcfg, scfg)
    errors = []
    for g in gammas:
        res = picard_solve(ProblemSpec.robin(p, delta, g), qcfg, scfg)
        errors.append(res.solution.sup_distance(star.solution))
    return ConvergenceReport(
        p=p,
        delta=delta,
        gammas=gammas,
        errors=errors,
        fitted_order=fit_order(gammas, errors),
        bound_values=[float(b) for b in convergence_bound(gammas, p, delta)],
        dirichlet=star,
    )


# ============================================================================
# Sign structure of a computed solution
# ============================================================================


def sign_profile(result: SolveResult):
    """Smallest ``y'`` over all nodes and largest centred ``y''`` over interior nodes."""
    d2 = second_difference(result.x, result.complement)
    return float(np.min(result.derivative)), float(np.max(d2))
