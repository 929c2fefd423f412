"""Exact closeness functionals of a channel to the inverse QFT (S side) or the QFT (T side).

Every value is computed by full enumeration over the basis; nothing here samples.
"""
from __future__ import annotations

import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np

from ..exceptions import (
    ChannelConstructionError,
    InternalConsistencyError,
    InvalidParameterError,
)
from ..models.results import ClosenessReport
from .channel import KrausChannel, compose, qft_channel, qft_matrix, qubits_for, unitary_of
from .numerics import TOL_IMAG, TOL_PSD, CMatrix, unitary

logger = logging.getLogger(__name__)

DUAL_ROUTE_TOL = 1e-9
MAGNITUDE_SLACK = 1e-12


def _fourier(c: KrausChannel) -> Tuple[int, CMatrix]:
    n = qubits_for(c.dim)
    return n, qft_matrix(n)


def _projectors(vectors: CMatrix) -> np.ndarray:
    """Stack of ``|v_k><v_k|`` for the columns of ``vectors``."""
    return np.einsum("ak,bk->kab", vectors, vectors.conj())


def _clip(value: float) -> float:
    return float(min(1.0, max(0.0, value)))


def _real_nonnegative(value: complex, what: str) -> float:
    if abs(value.imag) > TOL_IMAG:
        raise ChannelConstructionError(f"{what} has imaginary part {value.imag:.3e}")
    if value.real < -TOL_PSD:
        raise ChannelConstructionError(f"{what} is negative: {value.real:.3e}")
    return float(value.real)


def _double_average(c: KrausChannel, left: CMatrix, right: CMatrix) -> complex:
    """``E_{k,l} <left_k| C(|right_k><right_l|) |left_l>`` over all N^2 pairs, one k-row at a time."""
    size = c.dim
    total = 0j
    for k in range(size):
        inputs = np.einsum("a,bl->lab", right[:, k], right.conj())
        outputs = c(inputs)
        total += np.einsum("a,lab,bl->", left[:, k].conj(), outputs, left)
    return complex(total / (size * size))


def _kraus_trace_route(ops: np.ndarray, m: CMatrix) -> float:
    size = m.shape[0]
    traces = np.einsum("kab,ba->k", ops, m) / size
    return float(np.sum(np.abs(traces) ** 2))


def _check_routes(kraus_value: float, direct_value: float, what: str) -> None:
    if abs(kraus_value - direct_value) > DUAL_ROUTE_TOL:
        raise InternalConsistencyError(
            f"{what}: Kraus-trace route {kraus_value!r} and double-average route "
            f"{direct_value!r} disagree"
        )


def s1_measure(c: KrausChannel) -> float:
    """``E_k <k| C(|k^><k^|) |k>``."""
    _, f = _fourier(c)
    out = c(_projectors(f))
    idx = np.arange(c.dim)
    return _clip(out[idx, idx, idx].real.mean())


def s2_measure(c: KrausChannel) -> float:
    """``E_k <-k^| C(|k><k|) |-k^>``."""
    _, f = _fourier(c)
    size = c.dim
    out = c(_projectors(np.eye(size, dtype=np.complex128)))
    targets = f[:, (-np.arange(size)) % size]
    values = np.einsum("ak,kab,bk->k", targets.conj(), out, targets)
    return _clip(values.real.mean())


def s3_direct(c: KrausChannel) -> float:
    _, f = _fourier(c)
    eye = np.eye(c.dim, dtype=np.complex128)
    return _real_nonnegative(_double_average(c, eye, f), "S3 double average")


def s3_measure(c: KrausChannel) -> float:
    """``sum_i |Tr(A_i F)/N|^2``, cross-checked against the N^2-term double average."""
    _, f = _fourier(c)
    kraus_value = _kraus_trace_route(c.kraus_ops, f)
    _check_routes(kraus_value, s3_direct(c), "S3")
    return _clip(kraus_value)


def t1_measure(p: KrausChannel) -> float:
    """``E_k <-k| P(|k^><k^|) |-k>``."""
    _, f = _fourier(p)
    size = p.dim
    out = p(_projectors(f))
    k = np.arange(size)
    neg = (-k) % size
    return _clip(out[k, neg, neg].real.mean())


def t2_measure(p: KrausChannel) -> float:
    """``E_k <k^| P(|k><k|) |k^>``."""
    _, f = _fourier(p)
    out = p(_projectors(np.eye(p.dim, dtype=np.complex128)))
    values = np.einsum("ak,kab,bk->k", f.conj(), out, f)
    return _clip(values.real.mean())


def t3_direct(p: KrausChannel) -> float:
    _, f = _fourier(p)
    eye = np.eye(p.dim, dtype=np.complex128)
    return _real_nonnegative(_double_average(p, f, eye), "T3 double average")


def t3_measure(p: KrausChannel) -> float:
    _, f = _fourier(p)
    kraus_value = _kraus_trace_route(p.kraus_ops, f.conj().T)
    _check_routes(kraus_value, t3_direct(p), "T3")
    return _clip(kraus_value)


def s1_from_unitary_fidelity(c: KrausChannel) -> float:
    """``E_k T(U|k^>, |k>)^2`` for a unitary channel; equals ``1 - s1``."""
    u = unitary_of(c)
    _, f = _fourier(c)
    overlaps = np.diagonal(u @ f)
    return _clip(float(np.mean(1.0 - np.abs(overlaps) ** 2)))


def cp_trace_measure(c: KrausChannel, p: KrausChannel) -> float:
    """``|Tr(U_C U_P)/N|`` for two unitary channels."""
    u_c, u_p = unitary_of(c), unitary_of(p)
    if u_c.shape != u_p.shape:
        raise InvalidParameterError(f"channel dims differ: {c.dim} vs {p.dim}")
    return _clip(abs(np.trace(u_c @ u_p)) / c.dim)


def offdiag_leakage(c: KrausChannel, k: int) -> float:
    """``E_l <k+l| C(|l^><l^|) |k+l>``: weight a Fourier input leaks to a shifted output."""
    _, f = _fourier(c)
    size = c.dim
    if k % size == 0:
        raise InvalidParameterError("leakage is defined for nonzero shifts only")
    out = c(_projectors(f))
    l = np.arange(size)
    shifted = (l + k) % size
    return _clip(out[l, shifted, shifted].real.mean())


def max_offdiag_leakage(c: KrausChannel) -> float:
    _, f = _fourier(c)
    size = c.dim
    diag = np.einsum("laa->la", c(_projectors(f))).real
    l = np.arange(size)
    return _clip(max(diag[l, (l + k) % size].mean() for k in range(1, size)))


def orthobasis_measure(c: KrausChannel, basis: CMatrix) -> float:
    """``E_{k,l} <u_k| C o F(|u_k><u_l|) |u_l>`` for the columns ``u_k`` of ``basis``."""
    basis = unitary(basis)
    if basis.shape[0] != c.dim:
        raise InvalidParameterError(f"basis dim {basis.shape[0]} does not match channel dim {c.dim}")
    n = qubits_for(c.dim)
    cf = compose(c, qft_channel(n))
    return _real_nonnegative(_double_average(cf, basis, basis), "orthogonal-basis average")


def phase_coherence(xs) -> Tuple[float, float]:
    """Return ``(|E_p x_p|^2, E_{p,q} cos(theta_p - theta_q))``.

    Entries of zero magnitude count with phase 0.
    """
    xs = np.asarray(xs, dtype=np.complex128).reshape(-1)
    if xs.size == 0:
        raise InvalidParameterError("phase_coherence needs at least one entry")
    mags = np.abs(xs)
    if np.any(mags > 1.0 + MAGNITUDE_SLACK):
        raise InvalidParameterError(f"entries must have magnitude at most 1, got {mags.max()!r}")
    thetas = np.where(mags > 0, np.angle(xs), 0.0)
    mean_sq = float(abs(xs.mean()) ** 2)
    cos_avg = float(np.cos(thetas[:, np.newaxis] - thetas[np.newaxis, :]).mean())
    return mean_sq, cos_avg


def derived_channel_bounds(eta1: float, eta2: float, eta: Optional[float] = None) -> Dict[str, float]:
    """Upper bounds on the T-side etas of ``C^3`` from the S-side etas of ``C``.

    Args:
        eta1: eta_s1 of C.
        eta2: eta_s2 of C.
        eta: eta_s3 of C, when known.

    Returns:
        ``t1_c3`` and ``t2_c3`` bounds, plus ``t3_c3`` when ``eta`` is given.
    """
    for name, value in (("eta1", eta1), ("eta2", eta2), ("eta", eta)):
        if value is not None and value < 0:
            raise InvalidParameterError(f"{name} must be nonnegative, got {value!r}")
    shared = math.sqrt(math.sqrt(eta1) + math.sqrt(eta2))
    bounds = {
        "t1_c3": math.sqrt(eta1) + shared,
        "t2_c3": math.sqrt(eta2) + shared,
    }
    if eta is not None:
        bounds["t3_c3"] = 2 * math.sqrt(eta) + 2 * math.sqrt(2) * eta ** 0.25
    return bounds


def closeness_report(
        c: Optional[KrausChannel],
        p: Optional[KrausChannel] = None,
        leakage: bool = True,
) -> ClosenessReport:
    if c is None and p is None:
        raise InvalidParameterError("closeness_report needs at least one channel")
    if c is not None and p is not None and c.dim != p.dim:
        raise InvalidParameterError(f"channel dims differ: {c.dim} vs {p.dim}")
    n = qubits_for((c if c is not None else p).dim)
    fields: Dict[str, float] = {}
    if c is not None:
        fields.update(s1=s1_measure(c), s2=s2_measure(c), s3=s3_measure(c))
        if leakage and c.dim > 1:
            fields["max_leakage"] = max_offdiag_leakage(c)
    if p is not None:
        fields.update(t1=t1_measure(p), t2=t2_measure(p), t3=t3_measure(p))
    for name in ("s1", "s2", "s3", "t1", "t2", "t3"):
        if name in fields:
            fields[f"eta_{name}"] = 1.0 - fields[name]
    if c is not None and p is not None and c.is_unitary and p.is_unitary:
        fields["cp_trace"] = cp_trace_measure(c, p)
    logger.debug("Closeness report at n=%d: %s", n, fields)
    return ClosenessReport(n=n, **fields)


__all__ = [
    "DUAL_ROUTE_TOL",
    "s1_measure",
    "s2_measure",
    "s3_measure",
    "s3_direct",
    "t1_measure",
    "t2_measure",
    "t3_measure",
    "t3_direct",
    "s1_from_unitary_fidelity",
    "cp_trace_measure",
    "offdiag_leakage",
    "max_offdiag_leakage",
    "orthobasis_measure",
    "phase_coherence",
    "derived_channel_bounds",
    "closeness_report",
]
