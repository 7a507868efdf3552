"""Integral of Omega over SU(2): bi-invariance versus direct quadrature.

Omega is bi-invariant, so its integral is the density kappa at the identity
(on an orthonormal basis) times the Riemannian volume of the 3-sphere.  A
Gauss-Legendre rule in Hopf coordinates gives an independent value.
Run:  python3 demos/period_su2.py
"""
import numpy as np

from equivgerbe import amm, model_registry

G = model_registry("su2")
kappa = amm.omega_density_at_identity(G)
vol = amm.su2_volume(G)
print(f"kappa = {kappa:.12f}, Vol = {vol:.12f}")
print(f"kappa * Vol        = {kappa * vol:.12f}")
for n in (4, 8, 16, 24):
    print(f"quadrature n = {n:2d}  = {amm.integrate_omega_quadrature(G, n):.12f}")
print(f"4 pi^2             = {4 * np.pi ** 2:.12f}")
