"""Prequantizing the affine Poisson structure of the Heisenberg cocycle.

The 2-cocycle lambda(x, y) = x^T J y on R^2 shifts the coadjoint action by a
translation.  The extension group R -> Heis -> R^2 carries the 1-form theta_R
whose differential is the pulled-back symplectic form of G x g* => g*.
Run:  python3 demos/prequantization_heisenberg.py
"""
import numpy as np

from equivgerbe import central_ext as ce

model = ce.ExtensionModel.heisenberg_full(2)
G = model.group
rng = np.random.default_rng(1)

# the gauge action is a translation by -lambda(x, .)
x, xi = np.array([0.5, -1.0]), np.array([0.2, 0.3])
print("g . xi        =", ce.gauge_action(model, G.exp(x), xi))
print("xi - J^T x    =", xi - model.cocycle.flat(x))

# affine Poisson bracket of the coordinate functions is the constant lambda(e1, e2)
l1, l2 = ce.AffineFunction([1.0, 0.0]), ce.AffineFunction([0.0, 1.0])
print("{l1, l2}(xi)  =", ce.affine_poisson(model, l1, l2, xi))

report = ce.verify_prequantization(model, samples=50, seed=7)
print()
print("\n".join(report.lines()))
print("all pass:", report.passed)
