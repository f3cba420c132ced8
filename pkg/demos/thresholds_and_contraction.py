"""Admissible delta for each operator, and how the contraction factor compares with measurement."""
from pgme import ProblemSpec, threshold
from pgme.analysis import empirical_contraction
from pgme.core import neumann_gamma_max
from pgme.solver import contraction_bound

for p in (1.0, 2.0, 3.0):
    star = threshold("dirichlet", p).delta_root
    chat = threshold("chat", p).delta_root
    neu = threshold("neumann", p).delta_root
    print(f"p={p:g}: dirichlet {star:.6f}  rate constant {chat:.6f}  neumann {neu:.6f}")

# The Robin limit rises towards the Dirichlet one as gamma grows.
print()
for g in (0.1, 1, 10, 100, 1000):
    print(f"gamma={g:<6g} robin limit {threshold('robin', 1.0, g).delta_root:.8f}")
print(f"{'':13s}dirichlet  {threshold('dirichlet', 1.0).delta_root:.8f}")

# The gap function is a worst case. On random pairs the observed ratio is far smaller.
print()
for p in (1.0, 2.0):
    d = 0.9 * threshold("neumann", p).delta_root
    spec = ProblemSpec.neumann(p, d, neumann_gamma_max(d))
    ratio = empirical_contraction(spec, 50, seed=1)
    print(f"neumann p={p:g} delta={d:.4f}: measured {ratio:.3f}, bound {contraction_bound(spec):.3f}")
