"""Factories for imperfect QFT and inverse-QFT channels with known deviations.

Every random draw comes from a ``numpy`` Philox generator keyed by the spec's
seed, so a spec fully determines its channel.
"""
from __future__ import annotations

import logging
import math
from typing import Optional, Sequence

import numpy as np

from ..exceptions import DimensionMismatchError, InvalidParameterError
from ..models.specs import NoiseSpec
from .channel import KrausChannel, check_qubits, from_kraus, qft_matrix, qubits_for, unitary_channel
from .numerics import CMatrix, herm_eig, random_hermitian

logger = logging.getLogger(__name__)

ADVERSARIAL_THETAS = (0.0, math.pi, 0.0, math.pi)


def seeded_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _target(n: int, target: str) -> CMatrix:
    f = qft_matrix(n)
    if target == "inverse":
        return f.conj().T
    if target == "forward":
        return f
    raise InvalidParameterError(f"unknown target {target!r}")


def _diag(thetas: Sequence[float], n: int) -> CMatrix:
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (2 ** n,):
        raise DimensionMismatchError(f"expected {2 ** n} phases, got shape {thetas.shape}")
    return np.diag(np.exp(1j * thetas))


def random_thetas(n: int, scale: float, seed: int) -> np.ndarray:
    return seeded_rng(seed).uniform(-scale, scale, size=2 ** check_qubits(n))


def unit_norm_hermitian(dim: int, seed: int) -> CMatrix:
    h = random_hermitian(dim, seeded_rng(seed))
    w, _ = herm_eig(h)
    return h / max(abs(w[0]), abs(w[-1]))


def _expi(h: CMatrix, eps: float) -> CMatrix:
    w, v = herm_eig(h)
    return (v * np.exp(1j * eps * w)) @ v.conj().T


def make_exact(n: int, target: str = "inverse") -> KrausChannel:
    return unitary_channel(_target(n, target))


def make_diag_after(thetas: Sequence[float], n: int, target: str = "inverse") -> KrausChannel:
    """``D . F^-1`` (or ``D . F``): phases applied after the transform."""
    return unitary_channel(_diag(thetas, n) @ _target(n, target))


def make_diag_before(thetas: Sequence[float], n: int, target: str = "inverse") -> KrausChannel:
    return unitary_channel(_target(n, target) @ _diag(thetas, n))


def make_depolarized(p: float, n: int, target: str = "inverse") -> KrausChannel:
    """``(1-p) F^-1 rho F + p I/N``.

    Kraus form: ``sqrt(1-p) F^-1`` plus the N^2 matrix units scaled by
    ``sqrt(p/N)``; the family is reduced to at most N^2 operators.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"depolarizing strength must lie in [0, 1], got {p!r}")
    n = check_qubits(n)
    size = 2 ** n
    u = _target(n, target)
    if p == 0.0:
        return unitary_channel(u)
    units = np.zeros((size * size, size, size), dtype=np.complex128)
    idx = np.arange(size * size)
    units[idx, idx // size, idx % size] = math.sqrt(p / size)
    if p == 1.0:
        return from_kraus(units)
    ops = np.concatenate([math.sqrt(1.0 - p) * u[np.newaxis], units])
    return from_kraus(ops, reduce=True)


def make_perturbed_unitary(eps: float, n: int, seed: int, target: str = "inverse") -> KrausChannel:
    """``exp(i eps H) F^-1`` with ``H`` a seeded Hermitian matrix of unit operator norm."""
    if not 0.0 <= eps <= 1.0:
        raise InvalidParameterError(f"eps must lie in [0, 1], got {eps!r}")
    n = check_qubits(n)
    h = unit_norm_hermitian(2 ** n, seed)
    return unitary_channel(_expi(h, eps) @ _target(n, target))


def make_mixed_unitary(
        eps: float,
        n: int,
        seed: int,
        terms: int = 2,
        target: str = "inverse",
) -> KrausChannel:
    """Uniform mixture of ``terms`` independent coherent perturbations of the target."""
    if not 0.0 <= eps <= 1.0:
        raise InvalidParameterError(f"eps must lie in [0, 1], got {eps!r}")
    if terms < 1:
        raise InvalidParameterError(f"terms must be positive, got {terms}")
    n = check_qubits(n)
    u = _target(n, target)
    rng = seeded_rng(seed)
    sub_seeds = rng.integers(0, 2 ** 63, size=terms)
    ops = [
        math.sqrt(1.0 / terms) * _expi(unit_norm_hermitian(2 ** n, int(s)), eps) @ u
        for s in sub_seeds
    ]
    return from_kraus(ops, reduce=terms > 1)


def _require_seed(spec: NoiseSpec) -> int:
    if spec.seed is None:
        raise InvalidParameterError(f"noise kind {spec.kind!r} needs an explicit seed")
    return spec.seed


def _build(spec: NoiseSpec, target: str) -> KrausChannel:
    logger.debug("Building %s channel (n=%d, target=%s)", spec.kind, spec.n, target)
    if spec.kind == "exact":
        return make_exact(spec.n, target)
    if spec.kind in ("diag_after", "diag_before"):
        thetas = spec.thetas
        if thetas is None:
            thetas = random_thetas(spec.n, spec.theta_scale, _require_seed(spec))
        maker = make_diag_after if spec.kind == "diag_after" else make_diag_before
        return maker(thetas, spec.n, target)
    if spec.kind == "depolarized":
        return make_depolarized(spec.p, spec.n, target)
    if spec.kind == "perturbed_unitary":
        return make_perturbed_unitary(spec.eps, spec.n, _require_seed(spec), target)
    if spec.kind == "mixed_unitary":
        return make_mixed_unitary(spec.eps, spec.n, _require_seed(spec), spec.terms, target)
    raise InvalidParameterError(f"unknown noise kind {spec.kind!r}")


def make_c_channel(spec: NoiseSpec) -> KrausChannel:
    """Channel meant to stand in for the inverse QFT."""
    return _build(spec, "inverse")


def make_p_channel(spec: NoiseSpec) -> KrausChannel:
    """Same family, targeted at the forward QFT (``D F``, ``F D``, depolarized ``F``...)."""
    return _build(spec, "forward")


def build_channel(spec: NoiseSpec) -> KrausChannel:
    return make_p_channel(spec) if spec.target == "forward" else make_c_channel(spec)


def adversarial_preset(thetas: Optional[Sequence[float]] = None) -> NoiseSpec:
    """Unknown diagonal phases after an exact inverse QFT (n=2 by default).

    It passes the Fourier-basis test with certainty while its phases scramble
    any superposition of outputs unless they agree.
    """
    values = list(thetas if thetas is not None else ADVERSARIAL_THETAS)
    return NoiseSpec(id="adversarial", kind="diag_after", n=qubits_for(len(values)), thetas=values)


__all__ = [
    "ADVERSARIAL_THETAS",
    "seeded_rng",
    "random_thetas",
    "unit_norm_hermitian",
    "make_exact",
    "make_diag_after",
    "make_diag_before",
    "make_depolarized",
    "make_perturbed_unitary",
    "make_mixed_unitary",
    "make_c_channel",
    "make_p_channel",
    "build_channel",
    "adversarial_preset",
]
