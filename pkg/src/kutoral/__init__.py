"""Exact computations in F (x)_{ku_*} ku_*(Z/p^n).

The package models the tensor module generated by symbols [i, j] over the
p-local ring Z_(p)[v], its boundary maps, and the annihilator of the
bottom class, and checks a family of identities and differentials on
finite grids.
"""

__version__ = "0.1.0"

from .scalars import local, valuation
from .series import UsageError, m_series
from .tensor import ModuleContext, TensorElement, apply_boundary, canonical_form, normal_form
from .solver import annihilator_staircase, elementary_divisors, membership

__all__ = [
    "__version__",
    "local",
    "valuation",
    "UsageError",
    "m_series",
    "ModuleContext",
    "TensorElement",
    "apply_boundary",
    "canonical_form",
    "normal_form",
    "annihilator_staircase",
    "elementary_divisors",
    "membership",
]
