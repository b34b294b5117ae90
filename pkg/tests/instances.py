"""Seeded instance builders shared by the analysis and acceptance tests."""

import numpy as np

from tave import analysis
from tave.bench import make_m_tensor
from tave.solver import TaveProblem
from tave.tensor_core import (
    DenseTensor,
    contract_to_vector,
    frob_norm,
    inf_norm,
    semi_symmetrize,
    shao_product,
    unit_tensor,
)


def fixed_point_instance(seed, n=4, p=4, g_target=0.5):
    """Row-diagonal A = Q . I with ||Q^{-1} . B||_inf == g_target.

    Returns ``(problem, restart_radius)``; the radius bounds every solution's
    inf-norm: ``x^{[p-1]} = Q^{-1} b - (Q^{-1} . B)|x|^{p-1}`` gives
    ``||x||_inf^{p-1} <= ||Q^{-1} b||_inf / (1 - g)``.
    """
    rng = np.random.default_rng(seed)
    Q = rng.uniform(-1, 1, (n, n))
    Q += np.diag(np.abs(Q).sum(axis=1) + 0.5)
    A = shao_product(Q, unit_tensor(p, n))
    B = semi_symmetrize(rng.uniform(-1, 1, (n,) * p))
    Q_inv = np.linalg.inv(Q)
    B = B * (g_target / inf_norm(shao_product(DenseTensor(Q_inv), B)))
    b = rng.uniform(-1, 1, n)
    h = np.max(np.abs(Q_inv @ b))
    radius = (h / (1 - g_target)) ** (1 / (p - 1))
    return TaveProblem(A, B, b), radius


def bounds_instance(seed, n=3, p=3, b_fraction=0.5):
    """p == q M-tensor instance with ||B||_F = b_fraction * sqrt(lambda(A)).

    Returns ``(problem, x_star, lam)`` with ``lam`` from the sphere grid.
    """
    rng = np.random.default_rng(seed)
    A = semi_symmetrize(make_m_tensor(p, n, 0.0, 1.0, 0.1, rng))
    lam, _ = analysis.lambda_on_grid(A)
    B = semi_symmetrize(rng.uniform(-1, 1, (n,) * p))
    B = B * (b_fraction * np.sqrt(lam) / frob_norm(B))
    x_star = rng.uniform(-1, 1, n)
    b = contract_to_vector(A, x_star) + contract_to_vector(B, np.abs(x_star))
    return TaveProblem(A, B, b, symmetrize=False), x_star, lam


def example_matrix():
    """2x2 matrix that is not strictly copositive: value -32 at (0, 4)."""
    return np.array([[1.0, 4.0], [1.0, -2.0]])


def example_h_plus():
    """Order-3, dim-2 tensor that is H+ but not a P-tensor."""
    A = np.zeros((2, 2, 2))
    A[0, 0, 0] = A[0, 0, 1] = A[1, 0, 0] = A[1, 0, 1] = A[1, 1, 1] = 1.0
    A[1, 1, 0] = -1.0
    return A


def example_pair_b():
    """Order-3, dim-2 tensor with zero diagonal and ones elsewhere."""
    B = np.ones((2, 2, 2))
    B[0, 0, 0] = B[1, 1, 1] = 0.0
    return B
