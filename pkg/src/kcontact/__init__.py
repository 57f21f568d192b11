"""Exact invariants of Seifert bundles over cyclic 4-orbifolds."""

from .cyclic import CyclicSingularity, HJChain, LocalAction, dual, hj_eval, hj_expand
from .errors import KContactError
from .lattice import DivisorClass, FiniteAbelianGroup, IntMatrix, SymmetricForm, cokernel, smith_normal_form
from .seifert import OrbifoldModel, SeifertBundle

__version__ = "0.1.0"

__all__ = [
    "CyclicSingularity", "DivisorClass", "FiniteAbelianGroup", "HJChain", "IntMatrix", "KContactError",
    "LocalAction", "OrbifoldModel", "SeifertBundle", "SymmetricForm", "cokernel", "dual", "hj_eval",
    "hj_expand", "smith_normal_form",
]
