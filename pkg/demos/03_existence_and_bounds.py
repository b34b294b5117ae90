# Existence checks and solution norm bounds
#
# Two analyses need no solve at all:
#   * for even p = q, a row-diagonal A with invertible M(A) and
#     ||M(A)^{-1} . B||_inf < 1 guarantees a solution for every b;
#   * when ||B||_F < sqrt(lambda(A)), every approximate solution has a norm
#     inside [lower, upper].

import numpy as np

from tave import TaveProblem, solve
from tave.analysis import condition_report, estimate_lambda, lambda_on_grid, solution_bounds
from tave.bench import make_m_tensor
from tave.solver import solve_multistart
from tave.tensor_core import (DenseTensor, contract_to_vector, frob_norm, inf_norm,
                              semi_symmetrize, shao_product, unit_tensor)

rng = np.random.default_rng(0)

# Row-diagonal A = Q . I, with B scaled so the contraction factor is 0.5.

n, p = 4, 4
Q = rng.uniform(-1, 1, (n, n))
Q += np.diag(np.abs(Q).sum(axis=1) + 0.5)
A = shao_product(Q, unit_tensor(p, n))
B = semi_symmetrize(rng.uniform(-1, 1, (n,) * p))
B = B * (0.5 / inf_norm(shao_product(DenseTensor(np.linalg.inv(Q)), B)))
b = rng.uniform(-1, 1, n)

report = condition_report(A, B, b, budget=5)
print("fixed-point condition holds:", report.fixed_point_condition_holds,
      "with g =", round(report.g_inf_norm, 6))
result, restarts = solve_multistart(TaveProblem(A, B, b), restarts=10, radius=2.0)
print(result.status.value, "after", restarts, "restarts")

# lambda(A) = min ||A x^(p-1)||^2 on the unit sphere.  For n <= 3 a dense
# grid cross-checks the multistart descent.

A3 = semi_symmetrize(make_m_tensor(3, 3, 0.0, 1.0, 0.1, rng))
lam_ms, _ = estimate_lambda(A3)
lam_grid, _ = lambda_on_grid(A3)
print(f"lambda: multistart {lam_ms:.6f}, grid {lam_grid:.6f}")

# Both are sampled minima and can only overestimate lambda; the smaller one
# gives the safer upper bound.

lam = min(lam_ms, lam_grid)

B3 = semi_symmetrize(rng.uniform(-1, 1, (3, 3, 3)))
B3 = B3 * (0.5 * np.sqrt(lam) / frob_norm(B3))
x_star = rng.uniform(-1, 1, 3)
b3 = contract_to_vector(A3, x_star) + contract_to_vector(B3, np.abs(x_star))
sol = solve(TaveProblem(A3, B3, b3))
upper, lower = solution_bounds(A3, B3, b3, sigma=1e-5, lam=lam)
print(f"{lower:.4f} <= ||x|| = {np.linalg.norm(sol.x_final):.4f} <= {upper:.4f}")
