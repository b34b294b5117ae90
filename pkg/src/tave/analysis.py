"""Checkable existence conditions, solution-norm bounds, and structure falsifiers.

Nothing here certifies a universally quantified tensor property.  The
falsifiers search for counterexamples and answer ``NotFalsified`` when the
budget runs out; the ``lambda`` estimates come from local or grid search and
are upper estimates of the true minimum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .solver import SingularMatrixError, linear_solve
from .tensor_core import (
    DenseTensor,
    contract_to_matrix,
    contract_to_vector,
    frob_norm,
    inf_norm,
    is_row_diagonal,
    majorization_matrix,
    semi_symmetrize,
    shao_product,
)

__all__ = [
    "ConditionReport",
    "FalsifierVerdict",
    "FixedPointCheck",
    "Property",
    "Verdict",
    "condition_report",
    "copositivity_value",
    "estimate_lambda",
    "falsify_structure",
    "fixed_point_condition",
    "lambda_on_grid",
    "p_tensor_value",
    "phi",
    "solution_bounds",
    "sphere_grid",
    "zero_residual",
]

T_GRID = np.concatenate([[0.0], np.logspace(-3, 3, 25)])


def _tensor(A) -> DenseTensor:
    return A if isinstance(A, DenseTensor) else DenseTensor(A)


# -- existence via the order-2 left inverse ---------------------------------


@dataclass(frozen=True)
class FixedPointCheck:
    applicable: bool
    left_inverse_exists: bool
    g_inf_norm: float | None
    holds: bool
    reason: str = ""


def fixed_point_condition(A, B, tol: float = 0.0,
                          pivot_threshold: float = 1e-12) -> FixedPointCheck:
    """Test ``||M(A)^{-1} . B||_inf < 1`` for even ``p == q``.

    ``A`` has the order-2 left inverse ``M(A)^{-1}`` exactly when its
    majorization matrix is nonsingular and ``A`` is row diagonal (off-diagonal
    entries within ``tol``).  When the inequality holds, the equation has a
    solution for every right-hand side.
    """
    A, B = _tensor(A), _tensor(B)
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: A dim {A.dim}, B dim {B.dim}")
    p = A.order
    if B.order != p or p % 2 != 0:
        return FixedPointCheck(False, False, None, False,
                               f"needs equal even orders, got p={p}, q={B.order}")
    M = majorization_matrix(A)
    if not is_row_diagonal(A, tol):
        return FixedPointCheck(True, False, None, False, "A is not row diagonal")
    try:
        M_inv = linear_solve(M, np.eye(A.dim), pivot_threshold)
    except SingularMatrixError:
        return FixedPointCheck(True, False, None, False, "M(A) is singular")
    g = inf_norm(shao_product(DenseTensor(M_inv), B))
    return FixedPointCheck(True, True, g, g < 1.0)


# -- lambda(A) = min ||A x^{p-1}||^2 over the unit sphere --------------------


def phi(A, x) -> float:
    """``||A x^{p-1}||^2``."""
    y = contract_to_vector(A, x)
    return float(y @ y)


def _sphere_descent(A: DenseTensor, x: np.ndarray, max_iter: int, gtol: float):
    """Projected gradient descent with Armijo backtracking on ``||x|| = 1``.

    ``A`` must be semi-symmetric so that the gradient of ``phi`` is
    ``2 (p-1) (A x^{p-2})^T A x^{p-1}``.
    """
    p = A.order
    x = x / np.linalg.norm(x)
    y = contract_to_vector(A, x)
    f = float(y @ y)
    step = 1.0
    for _ in range(max_iter):
        grad = 2 * (p - 1) * contract_to_matrix(A, x).T @ y
        g = grad - (grad @ x) * x
        gnorm = float(np.linalg.norm(g))
        if gnorm <= gtol * max(1.0, f):
            break
        while True:
            cand = x - step * g
            cand /= np.linalg.norm(cand)
            y_c = contract_to_vector(A, cand)
            f_c = float(y_c @ y_c)
            if f_c <= f - 1e-4 * step * gnorm**2 or step < 1e-16:
                break
            step *= 0.5
        if step < 1e-16:
            break
        decrease = f - f_c
        x, y, f = cand, y_c, f_c
        step *= 2.0
        if decrease <= 1e-15 * max(1.0, f):
            break
    return f, x


def estimate_lambda(A, budget: int = 20, seed: int = 0, max_iter: int = 1000,
                    gtol: float = 1e-10) -> tuple[float, np.ndarray]:
    """Multistart projected-gradient estimate of ``min_{||x||=1} ||A x^{p-1}||^2``.

    Every restart returns a feasible point, so the result is an upper bound on
    the true minimum, and equal to it only when some restart lands in the
    global basin.  Restart ``k`` starts from a Gaussian direction drawn from
    ``numpy.random.default_rng([seed, k])``, so results do not depend on the
    order restarts run in.

    Returns ``(value, argmin)``.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    A = semi_symmetrize(_tensor(A))
    best_f, best_x = math.inf, None
    for k in range(budget):
        rng = np.random.default_rng([seed, k])
        f, x = _sphere_descent(A, rng.standard_normal(A.dim), max_iter, gtol)
        if f < best_f:
            best_f, best_x = f, x
    return best_f, best_x


def sphere_grid(n: int, points: int = 10_000) -> np.ndarray:
    """Quasi-uniform unit vectors in dimension ``n <= 3`` (one per antipodal pair for n >= 2).

    ``n == 2`` uses equally spaced angles on ``[0, pi)``; ``n == 3`` uses a
    Fibonacci lattice on the upper hemisphere.
    """
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        theta = np.pi * np.arange(points) / points
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if n == 3:
        k = np.arange(points) + 0.5
        z = k / points
        r = np.sqrt(1 - z**2)
        ang = np.pi * (1 + 5**0.5) * k
        return np.stack([r * np.cos(ang), r * np.sin(ang), z], axis=1)
    raise ValueError(f"grid search is only provided for n <= 3, got n={n}")


def _batched_contract(A: DenseTensor, X: np.ndarray) -> np.ndarray:
    # X has shape (N, n); returns rows A x^{p-1} for each row x of X
    T = np.tensordot(A.array, X, axes=([-1], [1]))
    for _ in range(A.order - 2):
        T = np.einsum("...jk,kj->...k", T, X)
    return T.T


def lambda_on_grid(A, points: int = 10_000) -> tuple[float, np.ndarray]:
    """Minimum of ``||A x^{p-1}||^2`` over :func:`sphere_grid` (``n <= 3``).

    ``phi(-x) == phi(x)``, so half the sphere suffices.  Like any sampled
    minimum, the result is an upper bound on the true value; its error
    shrinks with the grid spacing.
    """
    A = _tensor(A)
    X = sphere_grid(A.dim, points)
    Y = _batched_contract(A, X)
    vals = np.einsum("ij,ij->i", Y, Y)
    i = int(np.argmin(vals))
    return float(vals[i]), X[i]


def solution_bounds(A, B, b, sigma: float, lam: float) -> tuple[float | None, float]:
    """Norm bounds for points with ``||F(x)|| <= sigma`` when ``p == q``.

    upper = ``(sigma + ||b||)^{1/(p-1)} / (lam^{1/(2(p-1))} - ||B||_F^{1/(p-1)})``,
    valid for ``A`` nonsingular and only reported when ``||B||_F < sqrt(lam)``;
    ``lam`` must not exceed the true minimum of ``||A x^{p-1}||^2`` on the
    sphere for the bound to be guaranteed.

    lower = ``(||b|| / (||A||_F + ||B||_F))^{1/(p-1)}`` holds for exact
    solutions.
    """
    A, B = _tensor(A), _tensor(B)
    if A.order != B.order:
        raise ValueError(f"bounds need p == q, got p={A.order}, q={B.order}")
    e = 1.0 / (A.order - 1)
    b_norm = float(np.linalg.norm(b))
    fa, fb = frob_norm(A), frob_norm(B)
    lower = (b_norm / (fa + fb)) ** e if fa + fb > 0 else math.inf
    upper = None
    if lam > 0 and fb < math.sqrt(lam):
        upper = (sigma + b_norm) ** e / (lam ** (e / 2) - fb**e)
    return upper, lower


@dataclass(frozen=True)
class ConditionReport:
    left_inverse_exists: bool
    g_inf_norm: float | None
    fixed_point_condition_holds: bool
    lambda_A: float
    lambda_method: str
    upper_bound: float | None
    lower_bound: float | None
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "left_inverse_exists": self.left_inverse_exists,
            "g_inf_norm": self.g_inf_norm,
            "fixed_point_condition_holds": self.fixed_point_condition_holds,
            "lambda_A": self.lambda_A,
            "lambda_method": self.lambda_method,
            "upper_bound": self.upper_bound,
            "lower_bound": self.lower_bound,
            "notes": list(self.notes),
        }


def condition_report(A, B, b=None, sigma: float = 1e-5, budget: int = 20,
                     seed: int = 0, grid_points: int = 10_000) -> ConditionReport:
    """Run every checkable analysis on the pair ``(A, B)`` and optional ``b``.

    ``lambda`` comes from a sphere grid for ``n <= 3`` (method ``"grid"``),
    taking the smaller of grid and multistart values, and from multistart
    descent alone otherwise (method ``"multistart"``, bound labeled heuristic).
    """
    A, B = _tensor(A), _tensor(B)
    notes = []
    fp = fixed_point_condition(A, B)
    if not fp.applicable or not fp.left_inverse_exists:
        notes.append(f"fixed-point test: {fp.reason}")
    lam, _ = estimate_lambda(A, budget=budget, seed=seed)
    method = "multistart"
    if A.dim <= 3:
        lam_grid, _ = lambda_on_grid(A, grid_points)
        lam = min(lam, lam_grid)
        method = "grid"
    upper = lower = None
    if b is not None and A.order == B.order:
        upper, lower = solution_bounds(A, B, b, sigma, lam)
        if upper is None:
            notes.append("upper bound absent: ||B||_F >= sqrt(lambda)")
        elif method == "multistart":
            notes.append("upper bound is heuristic: lambda is a local-search estimate")
    elif b is not None:
        notes.append("norm bounds need p == q")
    return ConditionReport(fp.left_inverse_exists, fp.g_inf_norm, fp.holds, lam, method,
                           upper, lower, tuple(notes))


# -- falsifiers --------------------------------------------------------------


class Property(str, enum.Enum):
    STRICTLY_COPOSITIVE = "StrictlyCopositive"
    P_TENSOR = "PTensor"
    H_PLUS = "HPlus"
    WH_PLUS = "WHPlus"
    NONSINGULAR = "Nonsingular"
    PAIR_H_PLUS = "PairHPlus"  # (A + tI) x^{p-1} + B |x|^{p-1} = 0 has no nontrivial root

    @classmethod
    def parse(cls, name) -> Property:
        if isinstance(name, cls):
            return name
        key = str(name).replace("-", "").replace("_", "").replace("+", "plus").lower()
        for prop in cls:
            if prop.value.lower() == key:
                return prop
        aliases = {"copositive": cls.STRICTLY_COPOSITIVE, "p": cls.P_TENSOR,
                   "h": cls.H_PLUS, "wh": cls.WH_PLUS, "pairhplus": cls.PAIR_H_PLUS}
        if key in aliases:
            return aliases[key]
        raise ValueError(f"unknown property {name!r}; expected one of "
                         + ", ".join(p.value for p in cls))


class Verdict(str, enum.Enum):
    FALSIFIED = "Falsified"
    NOT_FALSIFIED = "NotFalsified"


@dataclass(frozen=True)
class FalsifierVerdict:
    """Outcome of a counterexample search.

    ``NotFalsified`` only means no witness was found within ``samples_used``
    tries.  ``value`` is the defining quantity at the best point found: the
    form value for copositivity/P-tensor checks (negative or zero violates),
    the residual norm for the equation-type checks (near zero violates).
    """

    property: Property
    verdict: Verdict
    witness_x: np.ndarray | None
    witness_t: float | None
    value: float
    samples_used: int

    @property
    def falsified(self) -> bool:
        return self.verdict is Verdict.FALSIFIED

    def to_dict(self) -> dict:
        return {
            "property": self.property.value,
            "verdict": self.verdict.value,
            "witness": None if self.witness_x is None else {
                "x": self.witness_x.tolist(), "t": self.witness_t},
            "value": self.value,
            "samples_used": self.samples_used,
            "certificate": False,
        }


def copositivity_value(A, x) -> float:
    """``A x^p = x^T (A x^{p-1})``."""
    x = np.asarray(x, dtype=float)
    return float(x @ contract_to_vector(A, x))


def p_tensor_value(A, x) -> float:
    """``max_i x_i (A x^{p-1})_i``."""
    x = np.asarray(x, dtype=float)
    return float(np.max(x * contract_to_vector(A, x)))


def zero_residual(A, x, t: float = 0.0, B=None) -> np.ndarray:
    """``(A + t I) x^{p-1} + B |x|^{p-1}`` (the last term only when ``B`` is given)."""
    x = np.asarray(x, dtype=float)
    r = contract_to_vector(A, x) + t * x ** (_tensor(A).order - 1)
    if B is not None:
        r = r + contract_to_vector(B, np.abs(x))
    return r


def _search_form(A, prop, samples, rng, tol):
    n = A.dim
    if prop is Property.STRICTLY_COPOSITIVE:
        fixed = np.eye(n)
        random = rng.dirichlet(np.ones(n), size=max(samples - n, 0))
        evaluate = copositivity_value
    else:
        fixed = np.concatenate([np.eye(n), -np.eye(n)])
        g = rng.standard_normal((max(samples - 2 * n, 0), n))
        random = g / np.linalg.norm(g, axis=1, keepdims=True)
        evaluate = p_tensor_value
    X = np.concatenate([fixed, random])[:max(samples, 1)]
    best_v, best_x = math.inf, None
    for x in X:
        v = evaluate(A, x)
        if v < best_v:
            best_v, best_x = v, x
    verdict = Verdict.FALSIFIED if best_v <= -tol else Verdict.NOT_FALSIFIED
    witness = best_x if verdict is Verdict.FALSIFIED else None
    return FalsifierVerdict(prop, verdict, witness, None, best_v, len(X))


def _search_zero(A, prop, samples, rng, tol, B):
    n, m = A.dim, A.order
    nonneg = prop is Property.WH_PLUS
    free_t = prop is not Property.NONSINGULAR
    A_sym = semi_symmetrize(A)
    B_sym = semi_symmetrize(B) if B is not None else None

    def unpack(z):
        y = z[:n]
        norm = np.linalg.norm(y)
        x = y / norm if norm > 0 else y
        t = z[n] if free_t else 0.0
        return x, t, norm

    def fun(z):
        x, t, _ = unpack(z)
        return zero_residual(A, x, t, B)

    def jac(z):
        x, t, norm = unpack(z)
        dx = (m - 1) * (contract_to_matrix(A_sym, x) + np.diag(t * x ** (m - 2)))
        if B_sym is not None:
            dx += (m - 1) * contract_to_matrix(B_sym, np.abs(x)) * np.sign(x)
        # chain rule through x = y / ||y||
        dy = dx @ (np.eye(n) - np.outer(x, x)) / max(norm, 1e-300)
        if not free_t:
            return dy
        return np.column_stack([dy, x ** (m - 1)])

    lo = np.full(n + free_t, -np.inf)
    if nonneg:
        lo[:n] = 0.0
    if free_t:
        lo[n] = 0.0
    best_r, best = math.inf, (None, None)
    for k in range(max(samples, 1)):
        y0 = rng.standard_normal(n)
        if nonneg:
            y0 = np.abs(y0)
        y0 /= np.linalg.norm(y0)
        z0 = np.concatenate([y0, [T_GRID[k % len(T_GRID)]]]) if free_t else y0
        res = scipy.optimize.least_squares(fun, z0, jac=jac, bounds=(lo, np.inf), xtol=1e-15,
                                           ftol=1e-15, gtol=1e-15, max_nfev=200 * (n + 1))
        x, t, _ = unpack(res.x)
        if not np.linalg.norm(x) > 0:
            continue
        r = float(np.linalg.norm(zero_residual(A, x, t, B)))
        if r < best_r:
            best_r, best = r, (x, float(t))
        if best_r <= tol:
            break
    used = k + 1
    x, t = best
    if best_r <= tol:
        return FalsifierVerdict(prop, Verdict.FALSIFIED, x, t if free_t else None, best_r, used)
    return FalsifierVerdict(prop, Verdict.NOT_FALSIFIED, None, None, best_r, used)


def falsify_structure(A, prop, samples: int = 200, seed: int = 0, tol: float | None = None,
                      B=None) -> FalsifierVerdict:
    """Search for a counterexample to a structured-tensor property of ``A``.

    ``StrictlyCopositive`` samples the simplex (vertices first) and fails when
    ``A x^p <= -tol``.  ``PTensor`` samples the sphere (signed coordinate
    vectors first) and fails when ``max_i x_i (A x^{p-1})_i <= -tol``.
    ``HPlus``, ``WHPlus``, ``Nonsingular`` and ``PairHPlus`` look for a unit
    ``x`` (nonnegative for ``WHPlus``) and ``t >= 0`` (``t = 0`` for
    ``Nonsingular``) with ``||(A + tI) x^{p-1} [+ B |x|^{p-1}]|| <= tol``:
    each of ``samples`` random starts, paired with ``t`` from a 26-point grid
    (0 and 25 log-spaced values in ``[1e-3, 1e3]``), is refined by bounded
    least squares over ``(x, t)``.  ``PairHPlus`` needs ``B`` of the same order.

    Default ``tol`` is 0 for the form checks and ``1e-8`` for the rest.
    """
    A = _tensor(A)
    prop = Property.parse(prop)
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    if prop in (Property.STRICTLY_COPOSITIVE, Property.P_TENSOR):
        return _search_form(A, prop, samples, rng, 0.0 if tol is None else tol)
    if prop is Property.PAIR_H_PLUS:
        if B is None:
            raise ValueError("PairHPlus needs the second tensor B")
        B = _tensor(B)
        if B.order != A.order or B.dim != A.dim:
            raise ValueError("PairHPlus needs A and B of equal order and dimension")
    else:
        B = None
    return _search_zero(A, prop, samples, rng, 1e-8 if tol is None else tol, B)
