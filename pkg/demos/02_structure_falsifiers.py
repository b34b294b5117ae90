# Looking for counterexamples to tensor properties
#
# Copositivity, the P-tensor property and the H+ family quantify over every
# vector, so sampling can refute them but never prove them.  A verdict of
# NotFalsified only reports that the search came back empty.

import numpy as np

from tave.analysis import copositivity_value, falsify_structure, zero_residual

# A 2x2 matrix (an order-2 tensor) that is not strictly copositive.

A = np.array([[1.0, 4.0], [1.0, -2.0]])
v = falsify_structure(A, "copositive")
print(v.verdict.value, "witness", v.witness_x, "value", v.value)
print("value at (0, 4):", copositivity_value(A, [0.0, 4.0]))

# The H+ search looks for a unit x and t >= 0 with (A + tI) x = 0.  Here
# t = 3 works because -3 is an eigenvalue of A.

h = falsify_structure(A, "HPlus", samples=20)
print(h.verdict.value, "x =", np.round(h.witness_x, 4), "t =", round(h.witness_t, 6))
print("residual:", np.linalg.norm(zero_residual(A, h.witness_x, h.witness_t)))

# With x restricted to the nonnegative orthant there is no such root.

print(falsify_structure(A, "WHPlus", samples=20).verdict.value)

# An order-3 tensor in dimension 2 that is H+ but, being of odd order,
# cannot be a P-tensor.

T = np.zeros((2, 2, 2))
T[0, 0, 0] = T[0, 0, 1] = T[1, 0, 0] = T[1, 0, 1] = T[1, 1, 1] = 1.0
T[1, 1, 0] = -1.0
for prop in ("HPlus", "PTensor"):
    r = falsify_structure(T, prop, samples=100)
    print(prop, r.verdict.value, "best value", round(r.value, 4))
