"""Robin solutions approach the Dirichlet one at rate 1/gamma."""
import numpy as np

from pgme.analysis import convergence_study

gammas = 10 * 2.0 ** np.arange(8)
rep = convergence_study(1.0, 0.05, gammas)
print(" gamma       error         bound")
for g, e, b in zip(rep.gammas, rep.errors, rep.bound_values):
    print(f"{g:6.0f}  {e:.6e}  {b:.6e}")
print(f"fitted order {rep.fitted_order:.4f}, every error under its bound: {rep.within_bound}")

# Larger p converges at the same order but with a different constant.
for p in (2.0, 3.0):
    print(f"p={p:g}: order {convergence_study(p, 0.03, gammas).fitted_order:.4f}")
