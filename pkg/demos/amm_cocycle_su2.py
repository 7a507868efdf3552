"""The quasi-Hamiltonian pair (Omega, omega) on the conjugation groupoid of SU(2).

Omega is the bi-invariant Cartan 3-form, omega the 2-form on arrows (g, x).
Together they form a cocycle in the total complex: d Omega = 0,
d omega = t*Omega - s*Omega and del omega = 0.  The normalizing constant of
Omega is not assumed; it is picked from a short list by the equations.
Run:  python3 demos/amm_cocycle_su2.py
"""
import numpy as np

from equivgerbe import amm, model_registry
from equivgerbe.harness import perturbation_study

G = model_registry("su2")
print("admissible c_Omega:", [str(c) for c in amm.admissible_c_omega(G)])

rep = amm.verify_amm_cocycle(G, samples=100, seed=0)
print("\n".join(rep.lines()))

# residuals scale linearly when omega is perturbed: the checks are sensitive
print("\nperturbation  eps -> residual")
for eps, res in perturbation_study(G, samples=3):
    print(f"  {eps:7.0e} -> {res:.3e}  (ratio {res / eps:.2f})")
