"""Tensor absolute value equations ``A x^{p-1} + B |x|^{q-1} = b``.

Submodules:

``tensor_core``
    dense tensors, contractions, norms, symmetrization, products
``solver``
    generalized Newton iteration
``analysis``
    existence test, norm bounds, lambda estimation, structure falsifiers
``bench``
    randomized planted-solution campaigns and result tables
``cli``
    command-line front end (``tave solve | check | bench | gen``)
"""

from .solver import SolverConfig, SolveReport, Status, TaveProblem, solve
from .tensor_core import DenseTensor, contract_to_matrix, contract_to_vector, unit_tensor

__all__ = [
    "DenseTensor",
    "SolveReport",
    "SolverConfig",
    "Status",
    "TaveProblem",
    "contract_to_matrix",
    "contract_to_vector",
    "solve",
    "unit_tensor",
]

__version__ = "0.1.0"
