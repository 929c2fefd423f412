"""Kraus-form channels, the QFT family of unitaries and channel algebra.

Register ordering is big-endian: the first tensor factor is the most
significant qubit, so ``|j>`` with ``j = sum_m j_m 2^(n-m)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from ..exceptions import (
    DimensionMismatchError,
    InvalidChannelError,
    InvalidParameterError,
    NotUnitaryError,
)
from .numerics import (
    TOL_PSD,
    TOL_UNITARY,
    CMatrix,
    DensityOp,
    PureState,
    as_cmatrix,
    herm_eig,
    is_unitary,
    unitary,
)

logger = logging.getLogger(__name__)

MAX_QUBITS = 10
CHANNEL_EQ_TOL = 1e-9


@dataclass(frozen=True)
class ShiftSpec:
    """Index arithmetic on an n-qubit register; every index is taken mod N."""

    n: int

    def __post_init__(self):
        check_qubits(self.n)

    @property
    def N(self) -> int:
        return 2 ** self.n

    def mod(self, k: int) -> int:
        return k % self.N

    def neg(self, k: int) -> int:
        return (-k) % self.N

    def shift(self, k: int, l: int) -> int:
        return (k + l) % self.N


def check_qubits(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise InvalidParameterError(f"qubit count must be in [1, {MAX_QUBITS}], got {n!r}")
    return int(n)


def qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2 ** n != dim:
        raise DimensionMismatchError(f"dimension {dim} is not a power of 2")
    return n


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A CPTP map given by Kraus operators stacked into an ``(r, dim, dim)`` array."""

    kraus_ops: np.ndarray

    def __post_init__(self):
        ops = np.asarray(self.kraus_ops, dtype=np.complex128)
        if ops.ndim == 2:
            ops = ops[np.newaxis]
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] < 1:
            raise InvalidChannelError(f"Kraus stack must have shape (r, d, d), got {ops.shape}")
        dim = ops.shape[1]
        if ops.shape[0] > dim * dim:
            raise InvalidChannelError(
                f"{ops.shape[0]} Kraus operators exceed the rank bound {dim * dim}; reduce first"
            )
        completeness = np.einsum("kji,kjl->il", ops.conj(), ops)
        residual = np.max(np.abs(completeness - np.eye(dim)))
        # Allow for rounding accumulated over r terms.
        if residual > TOL_UNITARY * max(1, ops.shape[0]):
            raise InvalidChannelError(f"sum of A^dagger A differs from I by {residual:.3e}")
        ops = ops.copy()
        ops.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim(self) -> int:
        return self.kraus_ops.shape[1]

    @property
    def rank(self) -> int:
        return self.kraus_ops.shape[0]

    @property
    def is_unitary(self) -> bool:
        return self.rank == 1

    def __call__(self, x: CMatrix) -> CMatrix:
        """Apply the map to an arbitrary (not necessarily Hermitian) operator."""
        x = np.asarray(x, dtype=np.complex128)
        if x.shape[-2:] != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"operator shape {x.shape} does not match channel dimension {self.dim}"
            )
        ops = self.kraus_ops
        if x.ndim == 2:
            return np.einsum("kab,bc,kdc->ad", ops, x, ops.conj(), optimize=True)
        return np.einsum("kab,nbc,kdc->nad", ops, x, ops.conj(), optimize=True)


def unitary_of(c: KrausChannel) -> CMatrix:
    if not c.is_unitary:
        raise NotUnitaryError(f"channel has Kraus rank {c.rank}, not a unitary channel")
    return c.kraus_ops[0]


def qft_matrix(n: int) -> CMatrix:
    n = check_qubits(n)
    size = 2 ** n
    j = np.arange(size)
    return np.exp(2j * np.pi * np.outer(j, j) / size) / np.sqrt(size)


def fourier_basis_state(k: int, n: int) -> PureState:
    n = check_qubits(n)
    size = 2 ** n
    l = np.arange(size)
    return PureState(np.exp(2j * np.pi * (k % size) * l / size) / np.sqrt(size))


def phase_unitary(k: int, n: int) -> CMatrix:
    n = check_qubits(n)
    factors = [
        np.diag([1.0, np.exp(2j * np.pi * k / 2 ** l)]).astype(np.complex128)
        for l in range(1, n + 1)
    ]
    return reduce(np.kron, factors)


def unitary_channel(u: CMatrix) -> KrausChannel:
    return KrausChannel(unitary(u)[np.newaxis])


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel(np.eye(dim, dtype=np.complex128)[np.newaxis])


def reflection_channel(n: int) -> KrausChannel:
    n = check_qubits(n)
    size = 2 ** n
    perm = np.zeros((size, size), dtype=np.complex128)
    k = np.arange(size)
    perm[(-k) % size, k] = 1.0
    return unitary_channel(perm)


def qft_channel(n: int) -> KrausChannel:
    return unitary_channel(qft_matrix(n))


def inverse_qft_channel(n: int) -> KrausChannel:
    return unitary_channel(qft_matrix(n).conj().T)


def apply(c: KrausChannel, rho: DensityOp) -> DensityOp:
    if rho.dim != c.dim:
        raise DimensionMismatchError(f"state dim {rho.dim} does not match channel dim {c.dim}")
    return DensityOp(c(rho.matrix))


def choi_matrix(c: KrausChannel) -> CMatrix:
    """``J = sum_k |A_k>><<A_k|`` with row-major vectorization of each Kraus operator."""
    vecs = c.kraus_ops.reshape(c.rank, -1)
    return vecs.T @ vecs.conj()


def reduce_rank(ops: Sequence[CMatrix] | np.ndarray) -> np.ndarray:
    """Canonical Kraus family from the eigen-decomposition of the Choi matrix."""
    ops = np.asarray(ops, dtype=np.complex128)
    rank, dim = ops.shape[0], ops.shape[1]
    vecs = ops.reshape(rank, -1)
    choi = vecs.T @ vecs.conj()
    w, v = herm_eig(choi)
    keep = w > TOL_PSD
    reduced = (v[:, keep] * np.sqrt(w[keep])).T.reshape(-1, dim, dim)
    logger.debug("Kraus rank reduced from %d to %d", rank, reduced.shape[0])
    return reduced


def from_kraus(ops: Iterable[CMatrix] | np.ndarray, reduce: bool = False) -> KrausChannel:
    ops = np.asarray(list(ops) if not isinstance(ops, np.ndarray) else ops, dtype=np.complex128)
    dim = ops.shape[-1]
    if reduce or ops.shape[0] > dim * dim:
        ops = reduce_rank(ops)
    return KrausChannel(ops)


def superoperator(c: KrausChannel) -> CMatrix:
    """``S = sum_k A_k (x) conj(A_k)``, so that ``vec(C(X)) = S vec(X)`` (row-major vec)."""
    d = c.dim
    return np.einsum("kab,kcd->acbd", c.kraus_ops, c.kraus_ops.conj()).reshape(d * d, d * d)


def _kraus_from_superoperator(s: CMatrix, dim: int) -> np.ndarray:
    choi = s.reshape(dim, dim, dim, dim).transpose(0, 2, 1, 3).reshape(dim * dim, dim * dim)
    w, v = herm_eig((choi + choi.conj().T) / 2)
    keep = w > TOL_PSD
    return (v[:, keep] * np.sqrt(w[keep])).T.reshape(-1, dim, dim)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """The channel ``outer o inner`` (inner acts first).

    Products of single-Kraus channels stay single products; every other
    composition is canonicalized through the Choi matrix, formed from the
    product of superoperators.
    """
    if outer.dim != inner.dim:
        raise DimensionMismatchError(f"cannot compose dims {outer.dim} and {inner.dim}")
    if outer.rank == 1 and inner.rank == 1:
        return KrausChannel(outer.kraus_ops[0] @ inner.kraus_ops[0])
    s = superoperator(outer) @ superoperator(inner)
    ops = _kraus_from_superoperator(s, outer.dim)
    logger.debug("Composed ranks %d and %d into rank %d", outer.rank, inner.rank, ops.shape[0])
    return KrausChannel(ops)


def channel_power(c: KrausChannel, p: int) -> KrausChannel:
    if not isinstance(p, (int, np.integer)) or not 1 <= p <= 3:
        raise InvalidParameterError(f"channel powers 1..3 are supported, got {p!r}")
    result = c
    for _ in range(p - 1):
        result = compose(c, result)
    return result


def lift_left(c: KrausChannel, right_dim: int) -> KrausChannel:
    """``c (x) id`` on a right factor of dimension ``right_dim``."""
    if right_dim < 1:
        raise InvalidParameterError(f"right_dim must be positive, got {right_dim}")
    eye = np.eye(right_dim, dtype=np.complex128)
    lifted = np.einsum("kab,cd->kacbd", c.kraus_ops, eye).reshape(
        c.rank, c.dim * right_dim, c.dim * right_dim
    )
    return KrausChannel(lifted)


def apply_left(c: KrausChannel, x: CMatrix, right_dim: int) -> CMatrix:
    """Same action as ``lift_left(c, right_dim)(x)`` without forming the lifted Kraus stack."""
    x = np.asarray(x, dtype=np.complex128)
    total = c.dim * right_dim
    if x.shape != (total, total):
        raise DimensionMismatchError(f"operator shape {x.shape} does not match {c.dim} x {right_dim}")
    blocks = x.reshape(c.dim, right_dim, c.dim, right_dim)
    ops = c.kraus_ops
    out = np.einsum("kab,bxcy,kdc->axdy", ops, blocks, ops.conj(), optimize=True)
    return out.reshape(total, total)


def inverse_unitary_channel(c: KrausChannel) -> KrausChannel:
    return KrausChannel(unitary_of(c).conj().T[np.newaxis])


def matrix_units(dim: int) -> np.ndarray:
    units = np.zeros((dim * dim, dim, dim), dtype=np.complex128)
    idx = np.arange(dim * dim)
    units[idx, idx // dim, idx % dim] = 1.0
    return units


def channels_equal(a: KrausChannel, b: KrausChannel, tol: float = CHANNEL_EQ_TOL) -> bool:
    """Action equality on all matrix units; Kraus lists themselves are not unique."""
    if a.dim != b.dim:
        return False
    units = matrix_units(a.dim)
    return bool(np.max(np.abs(a(units) - b(units))) <= tol)


__all__ = [
    "ShiftSpec",
    "KrausChannel",
    "check_qubits",
    "qubits_for",
    "qft_matrix",
    "fourier_basis_state",
    "phase_unitary",
    "unitary_channel",
    "identity_channel",
    "reflection_channel",
    "qft_channel",
    "inverse_qft_channel",
    "apply",
    "choi_matrix",
    "reduce_rank",
    "superoperator",
    "from_kraus",
    "compose",
    "channel_power",
    "lift_left",
    "apply_left",
    "inverse_unitary_channel",
    "unitary_of",
    "matrix_units",
    "channels_equal",
    "is_unitary",
]
