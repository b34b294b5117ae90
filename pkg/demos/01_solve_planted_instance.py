# Solving a tensor absolute value equation
#
# We look for x with  A x^(p-1) + B |x|^(q-1) = b,  where A has order p and
# B has order q.  The benchmark generator gives us an instance with a known
# ("planted") solution, so we can see how the Newton iteration behaves.

import numpy as np

from tave import SolverConfig, solve
from tave.bench import ScenarioSpec, generate_instance
from tave.solver import generalized_jacobian, residual

# Both tensors are M-tensors here (scenario "MM"); p = q = 3 and n = 6.

spec = ScenarioSpec("MM", p=3, q=3, n=6, seed=42)
P, x_star = generate_instance(spec, trial_index=0)
print(P)
print("planted x*:", np.round(x_star, 4))
print("||F(x*)|| =", np.linalg.norm(residual(P, x_star)))

# The default start is the all-ones vector and the tolerance is 1e-5.

report = solve(P)
print(report.status.value, "after", report.iterations, "iterations")
for k, err in enumerate(report.residual_history):
    print(f"  k={k:2d}  Err={err:.3e}")

# The iterate we land on need not be x*: the equation can have several roots.

print("x_final:", np.round(report.x_final, 4))
print("distance to x*:", np.linalg.norm(report.x_final - x_star))

# Each step solves V(x) d = F(x) with the generalized Jacobian
# V(x) = (p-1) A x^(p-2) + (q-1) B |x|^(q-2) diag(sign x).

V = generalized_jacobian(P, report.x_final)
print("cond(V(x_final)) =", np.linalg.cond(V))

# A starved budget shows the failure report instead of an exception.

short = solve(P, SolverConfig(max_iter=1))
print(short.status.value, short.final_residual)
