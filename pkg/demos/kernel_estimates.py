"""Check every kernel estimate on random monotone candidates, then map physical data to gamma."""
from pgme.analysis import verify_lemma_bounds
from pgme.physical import PhysicalParams, physical_to_gamma

for p, delta in ((1.0, 0.1), (2.0, 0.5), (3.0, 1.0)):
    rep = verify_lemma_bounds(p, delta, 25, seed=7)
    worst = min(rep.slacks, key=rep.slacks.get)
    print(f"p={p:g} delta={delta:g}: tightest item {worst} (slack {rep.slacks[worst]:.2e})")

# Paraffin-like data in SI units. Convective cooling gives gamma, an imposed
# flux gives gamma*.
wax = PhysicalParams(k0=0.2, rho=800.0, c=2900.0, h_coef=15.0, q0=400.0, Tf=310.0, T0=330.0)
print(f"\nalpha0 = {wax.diffusivity:.3e} m^2/s")
print(f"gamma  = {physical_to_gamma(wax, 'robin'):.5f}")
print(f"gamma* = {physical_to_gamma(wax, 'neumann'):.5f}")
