"""Solve the similarity problem for each kind of boundary condition.

Run with ``python3 demos/solve_boundary_conditions.py``.
"""
import math

import numpy as np

from pgme import ProblemSpec, SolverConfig, ThresholdViolation, picard_solve, threshold
from pgme.analysis import closed_form_delta0

# With delta = 0 the conductivity is constant and every problem has an
# erf/erfc closed form. The iteration reproduces it after one step.
for spec in (
    ProblemSpec.robin(1.0, 0.0, 1.0),
    ProblemSpec.dirichlet(1.0, 0.0),
    ProblemSpec.neumann(1.0, 0.0, 1 / math.sqrt(math.pi)),
):
    res = picard_solve(spec)
    err = res.solution.sup_distance(closed_form_delta0(spec, res.x))
    print(f"{spec.kind:9s} delta=0   y(0)={res.y0:.12f}  |y - exact| = {err:.1e}")

# A temperature dependent conductivity 1 + delta*y^p. Stay at half the
# admissible delta so the map is a contraction.
p = 2.0
delta = 0.5 * threshold("robin", p, 1.0).delta_root
res = picard_solve(ProblemSpec.robin(p, delta, 1.0))
print(f"\nrobin p=2 delta={delta:.4f}: {res.iterations} applications, residual {res.residual:.1e}")
print("step sizes:", " ".join(f"{s:.1e}" for s in res.steps))

# The profile on a few nodes.
for xi in (0.0, 0.5, 1.0, 2.0, 3.0):
    i = int(np.searchsorted(res.x, xi))
    print(f"  x={res.x[i]:.3f}  y={res.y[i]:.10f}  y'={res.derivative[i]:.10f}")

# Outside the proven range the solver refuses unless told otherwise.
try:
    picard_solve(ProblemSpec.dirichlet(1.0, 0.3))
except ThresholdViolation as exc:
    print("\nrefused:", exc)
forced = picard_solve(ProblemSpec.dirichlet(1.0, 0.3), scfg=SolverConfig(enforce_threshold=False))
print(f"forced run: residual {forced.residual:.1e}, outside_theory={forced.outside_theory}")
