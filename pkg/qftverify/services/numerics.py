"""Dense complex linear algebra and state-distance functions.

Matrices are plain ``numpy`` complex arrays. ``PureState`` and ``DensityOp``
wrap a read-only array and validate it on construction.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from ..exceptions import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidStateError,
    NotHermitianError,
    NotUnitaryError,
)

logger = logging.getLogger(__name__)

CMatrix = NDArray[np.complex128]

TOL_UNITARY = 1e-10
TOL_HERM = 1e-10
TOL_EIG = 1e-10
TOL_NORM = 1e-12
TOL_PSD = 1e-9
TOL_IMAG = 1e-9

# Norm and trace checks are scaled by dimension; TOL_NORM alone is below the
# rounding floor of a 256-term sum.
_NORM_SLACK = 64


def as_cmatrix(m) -> CMatrix:
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-d matrix, got shape {arr.shape}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def is_hermitian(h: CMatrix, tol: float = TOL_HERM) -> bool:
    h = as_cmatrix(h)
    if h.shape[0] != h.shape[1]:
        return False
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol)


def is_unitary(u: CMatrix, tol: float = TOL_UNITARY) -> bool:
    u = as_cmatrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])), initial=0.0) <= tol)


def unitary(m, tol: float = TOL_UNITARY) -> CMatrix:
    u = as_cmatrix(m)
    if not is_unitary(u, tol):
        raise NotUnitaryError(f"matrix of shape {u.shape} is not unitary within {tol:g}")
    return u


def hermitian(m, tol: float = TOL_HERM) -> CMatrix:
    h = as_cmatrix(m)
    if not is_hermitian(h, tol):
        raise NotHermitianError(f"matrix of shape {h.shape} is not Hermitian within {tol:g}")
    return h


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > TOL_NORM * _NORM_SLACK:
            raise InvalidStateError(f"state norm {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, vec) -> "PureState":
        vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise InvalidStateError("cannot normalize the zero vector")
        return cls(vec / norm)

    @classmethod
    def basis(cls, index: int, dim: int) -> "PureState":
        vec = np.zeros(dim, dtype=np.complex128)
        vec[index % dim] = 1.0
        return cls(vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> "DensityOp":
        return DensityOp(np.outer(self.amplitudes, self.amplitudes.conj()))

    def overlap(self, other: "PureState") -> complex:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"state dims differ: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityOp:
    matrix: np.ndarray

    def __post_init__(self):
        m = as_cmatrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"density operator must be square, got {m.shape}")
        dim = m.shape[0]
        if not is_hermitian(m, TOL_HERM * max(1, dim)):
            raise InvalidStateError("density operator is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TOL_NORM * _NORM_SLACK * max(1, dim):
            raise InvalidStateError(f"density operator trace {tr!r} differs from 1")
        m = (m + m.conj().T) / 2
        if np.linalg.eigvalsh(m)[0] < -TOL_PSD:
            raise InvalidStateError("density operator has a negative eigenvalue")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def diagonal(self) -> np.ndarray:
        """Measurement distribution in the computational basis, clamped to be nonnegative."""
        diag = np.clip(self.matrix.diagonal().real, 0.0, None)
        return diag / diag.sum()


def tensor(a: CMatrix, b: CMatrix) -> CMatrix:
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def partial_trace(rho: DensityOp, dim_a: int, dim_b: int, keep: str = "first") -> DensityOp:
    if rho.dim != dim_a * dim_b:
        raise DimensionMismatchError(
            f"cannot split dimension {rho.dim} into {dim_a} x {dim_b}"
        )
    blocks = rho.matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "first":
        reduced = np.einsum("ajbj->ab", blocks)
    elif keep == "second":
        reduced = np.einsum("iaib->ab", blocks)
    else:
        raise InvalidParameterError(f"keep must be 'first' or 'second', got {keep!r}")
    return DensityOp(reduced)


def herm_eig(h: CMatrix) -> Tuple[np.ndarray, CMatrix]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns:
        Eigenvalues in descending order and the matching orthonormal
        eigenvectors as columns, so that ``h = V diag(w) V^dagger``.
    """
    h = hermitian(h)
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return w[::-1].copy(), v[:, ::-1].copy()


def operator_norm(m: CMatrix) -> float:
    m = as_cmatrix(m)
    w, _ = herm_eig(m.conj().T @ m)
    return float(np.sqrt(max(w[0], 0.0)))


def fidelity_pure(rho: DensityOp, psi: PureState) -> float:
    if rho.dim != psi.dim:
        raise DimensionMismatchError(f"state dims differ: {rho.dim} vs {psi.dim}")
    value = np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes)
    if abs(value.imag) > TOL_IMAG:
        raise InvalidStateError(f"<psi|rho|psi> has imaginary part {value.imag!r}")
    return float(min(1.0, max(0.0, value.real)))


def trace_distance(rho: DensityOp, sigma: DensityOp) -> float:
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(f"state dims differ: {rho.dim} vs {sigma.dim}")
    diff = rho.matrix - sigma.matrix
    eigs = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(min(1.0, 0.5 * np.sum(np.abs(eigs))))


def pure_trace_distance(psi: PureState, phi: PureState) -> float:
    overlap_sq = abs(psi.overlap(phi)) ** 2
    return float(np.sqrt(max(0.0, 1.0 - overlap_sq)))


def fidelity_chain_bound(f_ab: float, f_bc: float) -> float:
    """Lower bound on F(rho, psi) given F(rho, sigma) and F(sigma, psi); may be negative."""
    for name, value in (("f_ab", f_ab), ("f_bc", f_bc)):
        if not 0.0 <= value <= 1.0:
            raise InvalidParameterError(f"{name} must lie in [0, 1], got {value!r}")
    return 1.0 - np.sqrt(1.0 - f_ab) - np.sqrt(1.0 - f_bc)


def hadamard_transform(n: int) -> CMatrix:
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    return reduce(np.kron, [h] * n) if n > 0 else np.eye(1, dtype=np.complex128)


def random_unitary(dim: int, rng: np.random.Generator) -> CMatrix:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_pure_state(dim: int, rng: np.random.Generator) -> PureState:
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState.normalized(vec)


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityOp:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return DensityOp(m / np.trace(m).real)


def random_hermitian(dim: int, rng: np.random.Generator) -> CMatrix:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


__all__ = [
    "CMatrix",
    "PureState",
    "DensityOp",
    "TOL_UNITARY",
    "TOL_HERM",
    "TOL_EIG",
    "TOL_NORM",
    "TOL_PSD",
    "TOL_IMAG",
    "tensor",
    "partial_trace",
    "herm_eig",
    "operator_norm",
    "fidelity_pure",
    "trace_distance",
    "pure_trace_distance",
    "fidelity_chain_bound",
    "hadamard_transform",
    "random_unitary",
    "random_pure_state",
    "random_density",
    "random_hermitian",
    "is_unitary",
    "is_hermitian",
    "unitary",
    "hermitian",
]
