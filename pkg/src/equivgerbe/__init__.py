"""Numerical verification of equivariant 3-cocycles on Lie groupoids.

Modules: ``lie`` (matrix Lie groups), ``geometry`` (forms and finite differences),
``simplicial`` (nerves and the total complex), ``central_ext`` (prequantization of
affine Poisson structures), ``amm`` (the conjugation-groupoid cocycle), ``loopspace``
and ``morita`` (loop groupoid and the bimodule), ``harness`` and ``cli``.
"""
from .conventions import CALIBRATED, Conventions
from .lie import model_registry

__all__ = ["CALIBRATED", "Conventions", "model_registry"]
__version__ = "0.1.0"
