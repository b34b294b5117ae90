"""Generalized Newton iteration for ``A x^{p-1} + B |x|^{q-1} = b``.

The iteration is the plain nonsmooth Newton scheme

    x_{k+1} = x_k - V(x_k)^{-1} F(x_k),
    V(x) = (p-1) A x^{p-2} + (q-1) B |x|^{q-2} D(x),  D(x) = diag(sign(x)),

with ``sign(0) = 0``.  There is no line search.  Each step is one LU solve.
"""

from __future__ import annotations

import enum
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .tensor_core import (
    DenseTensor,
    contract_to_matrix,
    contract_to_vector,
    semi_symmetrize,
)

__all__ = [
    "InvertibilityReport",
    "SingularMatrixError",
    "SolveReport",
    "SolverConfig",
    "Status",
    "TaveProblem",
    "check_invertibility_condition",
    "generalized_jacobian",
    "linear_solve",
    "min_singular_value_ratio",
    "newton_step",
    "newton_step_affine",
    "newton_step_equal_orders",
    "residual",
    "sign_diag",
    "solve",
    "solve_multistart",
]


class SingularMatrixError(np.linalg.LinAlgError):
    """A pivot of the LU factorization fell at or below the threshold."""


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    SINGULAR_JACOBIAN = "SingularJacobian"
    DIVERGED = "Diverged"


class TaveProblem:
    """The triple ``(A, B, b)`` with ``A`` of order ``p`` and ``B`` of order ``q``.

    Both tensors are semi-symmetrized on construction unless
    ``symmetrize=False``; the Jacobian formula assumes semi-symmetry.
    """

    __slots__ = ("A", "B", "b")

    def __init__(self, A, B, b, symmetrize: bool = True):
        A = A if isinstance(A, DenseTensor) else DenseTensor(A)
        B = B if isinstance(B, DenseTensor) else DenseTensor(B)
        b = np.array(b, dtype=float)
        if A.order < 2 or B.order < 2:
            raise ValueError(f"tensor orders must be >= 2, got p={A.order}, q={B.order}")
        if b.ndim != 1:
            raise ValueError(f"right-hand side must be a vector, got shape {b.shape}")
        if not (A.dim == B.dim == b.shape[0]):
            raise ValueError(
                f"dimension mismatch: A dim {A.dim}, B dim {B.dim}, b dim {b.shape[0]}")
        if not np.all(np.isfinite(b)):
            raise ValueError("right-hand side must be finite")
        if symmetrize:
            A, B = semi_symmetrize(A), semi_symmetrize(B)
        b.flags.writeable = False
        self.A, self.B, self.b = A, B, b

    @property
    def p(self) -> int:
        return self.A.order

    @property
    def q(self) -> int:
        return self.B.order

    @property
    def n(self) -> int:
        return self.A.dim

    def __repr__(self) -> str:
        return f"TaveProblem(p={self.p}, q={self.q}, n={self.n})"


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-5
    max_iter: int = 2000
    x0: np.ndarray | None = None  # None means all ones
    pivot_threshold: float = 1e-12
    divergence_cap: float = 1e12

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")

    def start_point(self, n: int) -> np.ndarray:
        if self.x0 is None:
            return np.ones(n)
        x0 = np.array(self.x0, dtype=float)
        if x0.shape != (n,):
            raise ValueError(f"x0 has shape {x0.shape}, problem dimension is {n}")
        return x0


def _finite_or_none(v):
    v = float(v)
    return v if math.isfinite(v) else None


@dataclass(eq=False)
class SolveReport:
    status: Status
    x_final: np.ndarray
    iterations: int
    residual_history: np.ndarray
    elapsed_seconds: float = field(default=0.0, compare=False)

    def __eq__(self, other) -> bool:
        # wall-clock time is not part of the result
        if not isinstance(other, SolveReport):
            return NotImplemented
        return (self.status is other.status and self.iterations == other.iterations
                and np.array_equal(self.x_final, other.x_final)
                and np.array_equal(self.residual_history, other.residual_history))

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def final_residual(self) -> float:
        return float(self.residual_history[-1])

    def to_dict(self) -> dict:
        # JSON has no NaN/inf; a diverged run reports them as null
        return {
            "status": self.status.value,
            "iterations": self.iterations,
            "err": _finite_or_none(self.final_residual),
            "x_final": [_finite_or_none(v) for v in self.x_final],
            "residual_history": [_finite_or_none(v) for v in self.residual_history],
            "elapsed_seconds": self.elapsed_seconds,
        }


def residual(P: TaveProblem, x) -> np.ndarray:
    """``F(x) = A x^{p-1} + B |x|^{q-1} - b``."""
    x = np.asarray(x, dtype=float)
    return contract_to_vector(P.A, x) + contract_to_vector(P.B, np.abs(x)) - P.b


def sign_diag(x) -> np.ndarray:
    """``D(x) = diag(sign(x))`` with ``sign(0) = 0``."""
    return np.diag(np.sign(np.asarray(x, dtype=float)))


def generalized_jacobian(P: TaveProblem, x) -> np.ndarray:
    """``V(x) = (p-1) A x^{p-2} + (q-1) B |x|^{q-2} D(x)``."""
    x = np.asarray(x, dtype=float)
    smooth = (P.p - 1) * contract_to_matrix(P.A, x)
    # right-multiplying by D scales column j by sign(x_j)
    kink = (P.q - 1) * contract_to_matrix(P.B, np.abs(x)) * np.sign(x)
    return smooth + kink


def _lu(M: np.ndarray, pivot_threshold: float):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if not np.all(pivots > pivot_threshold):
        raise SingularMatrixError(
            f"pivot {pivots.min():.3e} at or below threshold {pivot_threshold:.1e}")
    return lu, piv


def linear_solve(M, rhs, pivot_threshold: float = 1e-12) -> np.ndarray:
    """Solve ``M d = rhs`` by LU with partial (row) pivoting.

    Raises :class:`SingularMatrixError` if any pivot magnitude is
    ``<= pivot_threshold`` or the matrix has non-finite entries.
    """
    M = np.asarray(M, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != rhs.shape[0]:
        raise ValueError(f"incompatible shapes {M.shape} and {rhs.shape}")
    if not np.all(np.isfinite(M)):
        raise SingularMatrixError("matrix has non-finite entries")
    lu_piv = _lu(M, pivot_threshold)
    return scipy.linalg.lu_solve(lu_piv, rhs, check_finite=False)


def newton_step(P: TaveProblem, x, cfg: SolverConfig | None = None) -> np.ndarray:
    """One step ``x - V(x)^{-1} F(x)``."""
    cfg = cfg or SolverConfig()
    x = np.asarray(x, dtype=float)
    d = linear_solve(generalized_jacobian(P, x), residual(P, x), cfg.pivot_threshold)
    return x - d


def newton_step_affine(P: TaveProblem, x, cfg: SolverConfig | None = None) -> np.ndarray:
    """The same step written as ``V(x)^{-1} [(p-2) A x^{p-1} + (q-2) B |x|^{q-1} + b]``.

    Algebraically equal to :func:`newton_step` because ``V(x) x`` equals
    ``(p-1) A x^{p-1} + (q-1) B |x|^{q-1}`` for semi-symmetric tensors.
    """
    cfg = cfg or SolverConfig()
    x = np.asarray(x, dtype=float)
    rhs = ((P.p - 2) * contract_to_vector(P.A, x)
           + (P.q - 2) * contract_to_vector(P.B, np.abs(x)) + P.b)
    return linear_solve(generalized_jacobian(P, x), rhs, cfg.pivot_threshold)


def newton_step_equal_orders(P: TaveProblem, x, cfg: SolverConfig | None = None) -> np.ndarray:
    """Closed form for ``p == q``: ``(p-2)/(p-1) x + 1/(p-1) W^{-1} b``.

    Here ``W = A x^{p-2} + B |x|^{p-2} D(x)``, i.e. ``V(x) / (p-1)``.
    """
    if P.p != P.q:
        raise ValueError(f"needs p == q, got p={P.p}, q={P.q}")
    cfg = cfg or SolverConfig()
    x = np.asarray(x, dtype=float)
    p = P.p
    W = contract_to_matrix(P.A, x) + contract_to_matrix(P.B, np.abs(x)) * np.sign(x)
    return (p - 2) / (p - 1) * x + linear_solve(W, P.b, cfg.pivot_threshold) / (p - 1)


def solve(P: TaveProblem, cfg: SolverConfig | None = None) -> SolveReport:
    """Run the generalized Newton iteration from ``cfg.x0``.

    Stops with ``Converged`` once ``||F(x_k)|| <= tol``, ``MaxIterations``
    after ``max_iter`` steps, ``SingularJacobian`` when the LU pivot test
    fails, and ``Diverged`` when ``||x_k|| > divergence_cap`` or the residual
    stops being finite.  Numerical failure is reported, never raised.
    """
    cfg = cfg or SolverConfig()
    start = time.perf_counter()
    x = cfg.start_point(P.n)
    history = [float(np.linalg.norm(residual(P, x)))]
    k = 0
    while True:
        err = history[-1]
        if not (np.isfinite(err) and np.all(np.isfinite(x))):
            status = Status.DIVERGED
            break
        if err <= cfg.tol:
            status = Status.CONVERGED
            break
        if np.linalg.norm(x) > cfg.divergence_cap:
            status = Status.DIVERGED
            break
        if k >= cfg.max_iter:
            status = Status.MAX_ITERATIONS
            break
        try:
            x = newton_step(P, x, cfg)
        except SingularMatrixError:
            status = Status.SINGULAR_JACOBIAN
            break
        k += 1
        with np.errstate(over="ignore", invalid="ignore"):
            history.append(float(np.linalg.norm(residual(P, x))))
    return SolveReport(
        status=status,
        x_final=x,
        iterations=k,
        residual_history=np.asarray(history),
        elapsed_seconds=time.perf_counter() - start,
    )


def solve_multistart(P: TaveProblem, cfg: SolverConfig | None = None, restarts: int = 10,
                     radius: float = 1.0, seed: int = 0) -> tuple[SolveReport, int]:
    """Try ``cfg.x0`` first, then up to ``restarts`` uniform starts in ``[-radius, radius]^n``.

    Returns the first converged report (or the last attempt) and the number of
    restarts used.  Starts are drawn from ``numpy.random.default_rng(seed)``.
    """
    cfg = cfg or SolverConfig()
    report = solve(P, cfg)
    rng = np.random.default_rng(seed)
    used = 0
    while not report.converged and used < restarts:
        used += 1
        x0 = rng.uniform(-radius, radius, size=P.n)
        report = solve(P, SolverConfig(cfg.tol, cfg.max_iter, x0,
                                       cfg.pivot_threshold, cfg.divergence_cap))
    return report, used


@dataclass(frozen=True)
class InvertibilityReport:
    b_part_invertible: bool
    min_singular_value_ratio: float  # nan when the B-part is singular
    certified: bool

    def to_dict(self) -> dict:
        return {
            "b_part_invertible": self.b_part_invertible,
            "min_singular_value_ratio": (None if np.isnan(self.min_singular_value_ratio)
                                         else self.min_singular_value_ratio),
            "certified": self.certified,
        }


def check_invertibility_condition(P: TaveProblem, x, pivot_threshold: float = 1e-12
                                  ) -> InvertibilityReport:
    """Sufficient test for invertibility of the Newton matrix at ``x``.

    With ``Bm = B |x|^{q-2}`` and ``Am = A x^{p-2}``: if ``Bm`` is invertible and
    every singular value of ``Bm^{-1} Am`` exceeds 1, then ``Am + Bm D`` is
    invertible for every diagonal ``D`` with entries in ``{-1, 0, 1}``.  The
    smallest singular value comes from :func:`min_singular_value_ratio`.
    ``Bm`` is evaluated at ``|x|``, so for mixed-sign ``x`` the test can fail
    even when ``A`` is a multiple of ``B``.

    ``certified`` applies the test to ``V(x)`` itself, so the ratio is scaled
    by ``(p-1)/(q-1)``; for ``p == q`` this is the plain ratio test.
    """
    x = np.asarray(x, dtype=float)
    Am = contract_to_matrix(P.A, x)
    Bm = contract_to_matrix(P.B, np.abs(x))
    ratio = min_singular_value_ratio(Am, Bm, pivot_threshold)
    if np.isnan(ratio):
        return InvertibilityReport(False, ratio, False)
    scaled = ratio * (P.p - 1) / (P.q - 1)
    return InvertibilityReport(True, ratio, scaled > 1.0)


def min_singular_value_ratio(Am, Bm, pivot_threshold: float = 1e-12) -> float:
    """Smallest singular value of ``Bm^{-1} Am``, or nan if ``Bm`` is singular.

    Computed as the square root of the smallest eigenvalue of ``G^T G``.
    """
    try:
        G = linear_solve(Bm, Am, pivot_threshold)
    except SingularMatrixError:
        return float("nan")
    smallest = max(float(np.linalg.eigvalsh(G.T @ G)[0]), 0.0)
    return float(np.sqrt(smallest))
