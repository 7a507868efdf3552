"""Holonomy on the loop algebra of su(2) and the 2-form mu.

hol: Lg -> G solves h^-1 h' = xi; it intertwines the gauge action with
conjugation and pulls Omega back to an exact form, -hol*Omega = d mu.
The same mu corrects the difference of the loop-groupoid form and the
pulled-back conjugation-groupoid form.
Run:  python3 demos/loop_holonomy.py
"""
import numpy as np

from equivgerbe import model_registry
from equivgerbe.loopspace import LoopSpace, delta_mu_residuals, richardson_order

G = model_registry("su2")
L = LoopSpace(G, N=64, M=1024)
rng = np.random.default_rng(3)
xi = L.random_algebra_loop(rng)

print("observed order of the midpoint scheme:", round(richardson_order(L, xi, 256), 4))
for M in (128, 256, 512, 1024):
    err = np.max(np.abs(L.holonomy(xi, M) - L.holonomy(xi, 8192)))
    print(f"  M = {M:5d}  error {err:.2e}")

g = L.random_group_loop(rng)
lhs = L.holonomy(L.gauge_action(g, xi))
rhs = g[0] @ L.holonomy(xi) @ G.inv(g[0])
print("equivariance residual:", f"{np.max(np.abs(lhs - rhs)):.2e}")

res = delta_mu_residuals(L, 3, rng)
print("delta mu residuals by sign:")
for comp in ("i", "ii"):
    print(f"  {comp:>2}: s=+1 {res[(comp, 1)]:.2e}   s=-1 {res[(comp, -1)]:.2e}")
