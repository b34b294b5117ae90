"""Dense square tensors and the multilinear products used throughout the package.

A tensor of order ``m`` and dimension ``n`` holds ``n**m`` real entries.  Public
documentation writes indices 1-based, ``a[i1, ..., im]`` with ``1 <= ik <= n``;
storage is 0-based and row-major, so the entry ``(i1, ..., im)`` lives at flat
offset ``sum((ik - 1) * n**(m - k))``.  That is exactly numpy's C order for an
array of shape ``(n,) * m``.

Memory is ``8 * n**m`` bytes per tensor.  Construction refuses anything above
``MAX_ELEMENTS`` entries unless a larger ``max_elements`` is passed.

Vectors and matrices are plain 1-D / 2-D float arrays.
"""

from __future__ import annotations

import json
import math
from itertools import permutations
from pathlib import Path
from typing import Union

import numpy as np

__all__ = [
    "MAX_ELEMENTS",
    "DenseTensor",
    "abs_vector",
    "contract_to_matrix",
    "contract_to_vector",
    "elementwise_power",
    "frob_norm",
    "inf_norm",
    "is_row_diagonal",
    "load_tensor",
    "load_vector",
    "majorization_matrix",
    "save_tensor",
    "save_vector",
    "semi_symmetrize",
    "shao_product",
    "symmetrize",
    "unit_tensor",
]

MAX_ELEMENTS = 10**8


class DenseTensor:
    """Immutable real tensor of order ``m`` and dimension ``n``.

    Parameters
    ----------
    data : array_like
        Either an array of shape ``(n,) * m`` or a flat array of length
        ``n**m`` in row-major order (then ``order`` and ``dim`` are required).
    order, dim : int, optional
        Needed only when ``data`` is flat.
    max_elements : int
        Refuse tensors with more entries than this.
    """

    __slots__ = ("_array",)

    def __init__(self, data, order: int | None = None, dim: int | None = None,
                 max_elements: int = MAX_ELEMENTS):
        arr = np.array(data, dtype=float)
        if order is not None or dim is not None:
            if order is None or dim is None:
                raise ValueError("order and dim must be given together")
            order, dim = int(order), int(dim)
            if order < 1 or dim < 1:
                raise ValueError(f"order and dim must be >= 1, got order={order}, dim={dim}")
            if dim**order > max_elements:
                raise ValueError(
                    f"tensor with {dim}**{order} entries exceeds the cap of {max_elements}")
            if arr.size != dim**order:
                raise ValueError(
                    f"data has {arr.size} entries, expected dim**order = {dim**order}")
            arr = arr.reshape((dim,) * order)
        else:
            if arr.ndim < 1:
                raise ValueError("a tensor needs order >= 1")
            n = arr.shape[0]
            if n < 1 or any(s != n for s in arr.shape):
                raise ValueError(f"tensor must be square, got shape {arr.shape}")
            if arr.size > max_elements:
                raise ValueError(
                    f"tensor with {arr.size} entries exceeds the cap of {max_elements}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor entries must be finite")
        arr.flags.writeable = False
        self._array = arr

    @property
    def order(self) -> int:
        return self._array.ndim

    @property
    def dim(self) -> int:
        return self._array.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of shape ``(dim,) * order``."""
        return self._array

    @property
    def data(self) -> np.ndarray:
        """Read-only flat row-major view of length ``dim**order``."""
        return self._array.reshape(-1)

    def __getitem__(self, index):
        return self._array[index]

    def __add__(self, other: DenseTensor) -> DenseTensor:
        _check_same_shape(self, other)
        return DenseTensor(self._array + other._array)

    def __sub__(self, other: DenseTensor) -> DenseTensor:
        _check_same_shape(self, other)
        return DenseTensor(self._array - other._array)

    def __mul__(self, scalar: float) -> DenseTensor:
        return DenseTensor(float(scalar) * self._array)

    __rmul__ = __mul__

    def __neg__(self) -> DenseTensor:
        return DenseTensor(-self._array)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self._array.shape == other._array.shape and bool(
            np.array_equal(self._array, other._array))

    __hash__ = None

    def __repr__(self) -> str:
        return f"DenseTensor(order={self.order}, dim={self.dim})"

    def to_dict(self) -> dict:
        return {"order": self.order, "dim": self.dim, "data": self.data.tolist()}

    @classmethod
    def from_dict(cls, obj: dict) -> DenseTensor:
        for key in ("order", "dim", "data"):
            if key not in obj:
                raise ValueError(f"tensor object is missing field '{key}'")
        if not isinstance(obj["data"], list):
            raise ValueError("tensor field 'data' must be a list of numbers")
        return cls(obj["data"], order=obj["order"], dim=obj["dim"])


TensorLike = Union[DenseTensor, np.ndarray]


def _as_tensor(A) -> DenseTensor:
    return A if isinstance(A, DenseTensor) else DenseTensor(A)


def _as_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {x.shape}")
    return x


def _check_same_shape(A: DenseTensor, B: DenseTensor) -> None:
    if A.order != B.order or A.dim != B.dim:
        raise ValueError(
            f"shape mismatch: order {A.order} dim {A.dim} vs order {B.order} dim {B.dim}")


def _check_dims(A: DenseTensor, x: np.ndarray) -> None:
    if A.dim != x.shape[0]:
        raise ValueError(f"dimension mismatch: tensor dim {A.dim} vs vector dim {x.shape[0]}")


def _contract_trailing(arr: np.ndarray, x: np.ndarray, times: int) -> np.ndarray:
    # contracts the last axis first: i_m, then i_{m-1}, ...
    for _ in range(times):
        arr = arr @ x
    return arr


def contract_to_vector(A: TensorLike, x) -> np.ndarray:
    """Tensor-vector product ``A x^{m-1}``.

    ``y[i] = sum over i2..im of a[i, i2, ..., im] * x[i2] * ... * x[im]``.
    """
    A, x = _as_tensor(A), _as_vector(x)
    if A.order < 2:
        raise ValueError(f"contract_to_vector needs order >= 2, got {A.order}")
    _check_dims(A, x)
    return _contract_trailing(A.array, x, A.order - 1)


def contract_to_matrix(A: TensorLike, x) -> np.ndarray:
    """The ``n x n`` matrix ``A x^{m-2}``; for ``m == 2`` this is ``A`` itself."""
    A, x = _as_tensor(A), _as_vector(x)
    if A.order < 2:
        raise ValueError(f"contract_to_matrix needs order >= 2, got {A.order}")
    _check_dims(A, x)
    return np.array(_contract_trailing(A.array, x, A.order - 2))


def _perm_average(arr: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    if len(axes) < 2:
        return arr.copy()
    orders = []
    for perm in permutations(axes):
        order = list(range(arr.ndim))
        for src, dst in zip(axes, perm):
            order[src] = dst
        orders.append(order)
    # exact fixed point for inputs that are already symmetric in these axes
    if all(np.array_equal(arr, np.transpose(arr, order)) for order in orders):
        return arr.copy()
    total = np.zeros_like(arr)
    for order in orders:
        total += np.transpose(arr, order)
    total /= len(orders)
    # rounding differs between permuted entries; copy each one from its
    # sorted-index representative so the result is exactly symmetric
    idx = np.indices(arr.shape)
    ax = list(axes)
    idx[ax] = np.sort(idx[ax], axis=0)
    return total[tuple(idx)]


def semi_symmetrize(A: TensorLike) -> DenseTensor:
    """Average each slice ``a[i, :, ..., :]`` over all permutations of its indices.

    The result is semi-symmetric and has the same ``A x^{m-1}`` for every ``x``.
    Cost is ``(m-1)! * n**m`` flops.
    """
    A = _as_tensor(A)
    if A.order < 2:
        raise ValueError(f"semi_symmetrize needs order >= 2, got {A.order}")
    return DenseTensor(_perm_average(A.array, tuple(range(1, A.order))))


def symmetrize(A: TensorLike) -> DenseTensor:
    """Average over all permutations of all ``m`` indices (full symmetrization)."""
    A = _as_tensor(A)
    return DenseTensor(_perm_average(A.array, tuple(range(A.order))))


def elementwise_power(x, s: float) -> np.ndarray:
    """``x^{[s]} = (x_1**s, ..., x_n**s)``.

    Integer ``s`` keeps signs (odd powers of negatives stay negative).  A
    fractional ``s`` requires ``x >= 0``.
    """
    x = _as_vector(x)
    if s <= 0:
        raise ValueError(f"power must be positive, got {s}")
    if float(s).is_integer():
        return x ** int(s)
    if np.any(x < 0):
        raise ValueError(f"fractional power {s} of a vector with negative entries")
    return x**s


def abs_vector(x) -> np.ndarray:
    return np.abs(_as_vector(x))


def inf_norm(A: TensorLike) -> float:
    """``max_i sum_{i2..im} |a[i, i2, ..., im]|``."""
    A = _as_tensor(A)
    return float(np.abs(A.array).reshape(A.dim, -1).sum(axis=1).max())


def frob_norm(A: TensorLike) -> float:
    return float(np.linalg.norm(_as_tensor(A).data))


def unit_tensor(m: int, n: int) -> DenseTensor:
    """Kronecker delta tensor: 1 where all ``m`` indices coincide, 0 elsewhere."""
    if m < 1 or n < 1:
        raise ValueError(f"order and dim must be >= 1, got m={m}, n={n}")
    arr = np.zeros((n,) * m)
    idx = np.arange(n)
    arr[(idx,) * m] = 1.0
    return DenseTensor(arr)


def shao_product(A: TensorLike, B) -> DenseTensor | np.ndarray:
    """General tensor product ``A . B`` of an order-``p`` and an order-``q`` tensor.

    ``C[i, j1, ..., j_{p-1}] = sum a[i, i2, ..., ip] * b[i2, j1] * ... * b[ip, j_{p-1}]``
    where each ``jk`` is a multi-index of length ``q - 1``.  The result has order
    ``(p-1)(q-1) + 1``.  ``B`` may be a vector (``q == 1``), in which case the
    result is the vector ``A x^{p-1}``.
    """
    A = _as_tensor(A)
    if A.order < 2:
        raise ValueError(f"left factor needs order >= 2, got {A.order}")
    if isinstance(B, DenseTensor):
        b_arr = B.array
    else:
        b_arr = np.asarray(B, dtype=float)
    n = A.dim
    if b_arr.shape[0] != n:
        raise ValueError(f"dimension mismatch: {n} vs {b_arr.shape[0]}")
    p, q = A.order, b_arr.ndim
    out_order = (p - 1) * (q - 1) + 1
    if n**out_order > MAX_ELEMENTS:
        raise ValueError(f"product would have {n}**{out_order} entries")
    b_mat = b_arr.reshape(n, -1)
    C = A.array
    for _ in range(p - 1):
        # contract axis 1; the new (q-1)-block is appended at the end
        C = np.tensordot(C, b_mat, axes=([1], [0]))
    C = C.reshape((n,) * out_order)
    if out_order == 1:
        return np.array(C)
    return DenseTensor(C)


def majorization_matrix(A: TensorLike) -> np.ndarray:
    """``M[i, j] = a[i, j, j, ..., j]``."""
    A = _as_tensor(A)
    if A.order < 2:
        raise ValueError(f"majorization matrix needs order >= 2, got {A.order}")
    idx = np.arange(A.dim)
    return np.array(A.array[(slice(None),) + (idx,) * (A.order - 1)])


def is_row_diagonal(A: TensorLike, tol: float = 0.0) -> bool:
    """True iff ``|a[i, i2, ..., ip]| <= tol`` whenever ``i2..ip`` are not all equal."""
    A = _as_tensor(A)
    off = np.abs(A.array).copy()
    idx = np.arange(A.dim)
    off[(slice(None),) + (idx,) * (A.order - 1)] = 0.0
    return bool(np.all(off <= tol))


# json writes floats via repr(), the shortest string that round-trips exactly


def save_tensor(A: DenseTensor, path) -> None:
    obj = {"order": A.order, "dim": A.dim, "data": A.data.tolist()}
    Path(path).write_text(json.dumps(obj) + "\n", encoding="utf-8")


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc.msg}, line {exc.lineno})") from None


def load_tensor(path) -> DenseTensor:
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a JSON object")
    try:
        return DenseTensor.from_dict(obj)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def save_vector(x, path) -> None:
    x = _as_vector(x)
    obj = {"dim": int(x.shape[0]), "data": x.tolist()}
    Path(path).write_text(json.dumps(obj) + "\n", encoding="utf-8")


def load_vector(path) -> np.ndarray:
    obj = _read_json(path)
    if not isinstance(obj, dict) or "data" not in obj or "dim" not in obj:
        raise ValueError(f"{path}: vector object needs fields 'dim' and 'data'")
    x = np.asarray(obj["data"], dtype=float)
    if x.ndim != 1 or x.shape[0] != obj["dim"]:
        raise ValueError(f"{path}: field 'data' must hold exactly 'dim' = {obj['dim']} numbers")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{path}: field 'data' has non-finite entries")
    return x


def power_norm_constant(n: int, m: int) -> float:
    """``n**((m-2)/2)``, the constant in ``||x||^{m-1} <= c * ||x^{[m-1]}||``."""
    return math.pow(n, (m - 2) / 2)
