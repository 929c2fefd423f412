"""Shot-based verification protocols and their accept/reject logic.

Randomness: shot ``s`` of a run with seed ``seed`` consumes exactly two
uniform draws, taken from position ``2s`` of the Philox stream keyed by
``seed``. Any split of the shots across workers therefore sees the same draws.
"""
from __future__ import annotations

import hashlib
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..config.settings import get_settings
from ..exceptions import InvalidParameterError
from ..models.results import ProtocolName, ProtocolResult
from .channel import KrausChannel, compose, qft_matrix, qubits_for, unitary_of
from .closeness import cp_trace_measure
from .numerics import hadamard_transform

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-15
DRAWS_PER_SHOT = 2
# Philox emits four 64-bit words per counter step, i.e. two shots.
SHOTS_PER_BLOCK = 2
MIN_SHOTS_PER_WORKER = 256

PROTOCOLS: Tuple[str, ...] = ("TA1", "TA2", "TP1", "TP2", "CP")


def shots_needed(epsilon: float, delta: float) -> int:
    """Two-sided Hoeffding count: ``ceil(ln(2/delta) / (2 epsilon^2))``."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta!r}")
    return math.ceil(math.log(2.0 / delta) / (2.0 * epsilon * epsilon))


@dataclass(frozen=True)
class ShotPlan:
    epsilon: float
    delta: float
    shots: int = 0

    def __post_init__(self):
        needed = shots_needed(self.epsilon, self.delta)
        if self.shots == 0:
            object.__setattr__(self, "shots", needed)
        elif self.shots < needed:
            raise InvalidParameterError(
                f"{self.shots} shots cannot reach epsilon={self.epsilon} at delta={self.delta}; "
                f"need {needed}"
            )


def derive_seed(root: int, *names: object) -> int:
    """Named 64-bit substream seed, e.g. ``derive_seed(seed, "case", case_id, "shot")``."""
    label = "/".join([str(int(root))] + [str(name) for name in names])
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def shot_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform draws for shots ``start .. start+count-1`` as a ``(count, 2)`` array."""
    if start < 0 or count < 0:
        raise InvalidParameterError(f"invalid shot window start={start}, count={count}")
    bit_gen = np.random.Philox(key=int(seed))
    skip = start % SHOTS_PER_BLOCK
    bit_gen.advance(start // SHOTS_PER_BLOCK)
    draws = np.random.Generator(bit_gen).random(DRAWS_PER_SHOT * (count + skip))
    return draws[DRAWS_PER_SHOT * skip:].reshape(count, DRAWS_PER_SHOT)


@dataclass(frozen=True)
class _Setup:
    """Outcome distributions ``probs[k]`` per prepared label and the winning outcome per label."""

    protocol: str
    cdfs: np.ndarray
    targets: np.ndarray
    exact: float


def _outcome_distribution(states: np.ndarray) -> np.ndarray:
    diag = np.einsum("kaa->ka", states).real.copy()
    diag[diag < PROB_FLOOR] = 0.0
    return diag / diag.sum(axis=1, keepdims=True)


def _undo_phase(n: int, sign: int) -> np.ndarray:
    """Stack over k of ``H^n U_{sign*k}``."""
    size = 2 ** n
    h = hadamard_transform(n)
    j = np.arange(size)
    # U_k is diagonal with entries exp(2 pi i k j / N).
    phases = np.exp(2j * np.pi * sign * np.outer(np.arange(size), j) / size)
    return np.einsum("ab,kb->kab", h, phases)


def _setup(protocol: str, c: KrausChannel, p: Optional[KrausChannel] = None) -> _Setup:
    if protocol not in PROTOCOLS:
        raise InvalidParameterError(f"unknown protocol {protocol!r}")
    n = qubits_for(c.dim)
    size = c.dim
    f = qft_matrix(n)
    eye = np.eye(size, dtype=np.complex128)
    k = np.arange(size)
    fourier_inputs = np.einsum("ak,bk->kab", f, f.conj())
    basis_inputs = np.einsum("ak,bk->kab", eye, eye)

    if protocol == "TA1":
        states, targets = c(fourier_inputs), k
    elif protocol == "TP1":
        states, targets = c(fourier_inputs), (-k) % size
    elif protocol in ("TA2", "TP2"):
        v = _undo_phase(n, 1 if protocol == "TA2" else -1)
        out = c(basis_inputs)
        states = np.einsum("kab,kbc,kdc->kad", v, out, v.conj())
        targets = np.zeros(size, dtype=int)
    else:
        if p is None:
            raise InvalidParameterError("the CP test needs both C and P")
        unitary_of(c)
        unitary_of(p)
        states, targets = compose(c, p)(basis_inputs), k

    probs = _outcome_distribution(states)
    exact = float(probs[k, targets].mean())
    cdfs = np.cumsum(probs, axis=1)
    cdfs[:, -1] = 1.0
    return _Setup(protocol=protocol, cdfs=cdfs, targets=np.asarray(targets), exact=exact)


def success_probability(protocol: str, c: KrausChannel, p: Optional[KrausChannel] = None) -> float:
    """Exact per-shot success probability averaged over the uniformly drawn label."""
    return _setup(protocol, c, p).exact


def _count_successes(setup: _Setup, seed: int, start: int, count: int) -> int:
    if count == 0:
        return 0
    u = shot_uniforms(seed, start, count)
    size = setup.cdfs.shape[0]
    labels = np.minimum((u[:, 0] * size).astype(int), size - 1)
    # Row-wise searchsorted(cdf, draw, side="right").
    outcomes = np.sum(setup.cdfs[labels] <= u[:, 1:2], axis=1)
    outcomes = np.minimum(outcomes, size - 1)
    return int(np.sum(outcomes == setup.targets[labels]))


def _chunks(shots: int, workers: int) -> List[Tuple[int, int]]:
    workers = max(1, min(workers, shots // MIN_SHOTS_PER_WORKER or 1))
    base, extra = divmod(shots, workers)
    bounds, start = [], 0
    for w in range(workers):
        count = base + (1 if w < extra else 0)
        bounds.append((start, count))
        start += count
    return bounds


def _run(
        setup: _Setup,
        plan: ShotPlan,
        seed: int,
        workers: Optional[int] = None,
        eta: Optional[float] = None,
        cp_trace: Optional[float] = None,
) -> ProtocolResult:
    workers = workers if workers is not None else get_settings().workers
    chunks = _chunks(plan.shots, workers)
    if len(chunks) == 1:
        successes = _count_successes(setup, seed, 0, plan.shots)
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            successes = sum(pool.map(lambda sc: _count_successes(setup, seed, *sc), chunks))
    eta = 2.0 * plan.epsilon if eta is None else eta
    threshold = 1.0 - eta + plan.epsilon
    estimate = successes / plan.shots
    logger.debug(
        "%s: %d/%d successes (exact %.6f, threshold %.6f)",
        setup.protocol, successes, plan.shots, setup.exact, threshold,
    )
    return ProtocolResult(
        protocol=setup.protocol,
        estimate=estimate,
        successes=successes,
        shots_used=plan.shots,
        seed=seed,
        accept=estimate >= threshold,
        threshold=threshold,
        epsilon=plan.epsilon,
        delta=plan.delta,
        cp_trace=cp_trace,
    )


def run_protocol(
        protocol: ProtocolName,
        c: KrausChannel,
        plan: ShotPlan,
        seed: int,
        p: Optional[KrausChannel] = None,
        workers: Optional[int] = None,
        eta: Optional[float] = None,
) -> ProtocolResult:
    cp_trace = cp_trace_measure(c, p) if protocol == "CP" and p is not None else None
    return _run(_setup(protocol, c, p), plan, seed, workers, eta, cp_trace)


def run_ta1(c: KrausChannel, plan: ShotPlan, seed: int, workers: Optional[int] = None,
            eta: Optional[float] = None) -> ProtocolResult:
    """Prepare ``|k^>``, apply C, measure; success iff the outcome is ``k``."""
    return run_protocol("TA1", c, plan, seed, workers=workers, eta=eta)


def run_ta2(c: KrausChannel, plan: ShotPlan, seed: int, workers: Optional[int] = None,
            eta: Optional[float] = None) -> ProtocolResult:
    """Prepare ``|k>``, apply C then ``H^n U_k``; success iff the outcome is all zeros."""
    return run_protocol("TA2", c, plan, seed, workers=workers, eta=eta)


def run_tp1(p: KrausChannel, plan: ShotPlan, seed: int, workers: Optional[int] = None,
            eta: Optional[float] = None) -> ProtocolResult:
    return run_protocol("TP1", p, plan, seed, workers=workers, eta=eta)


def run_tp2(p: KrausChannel, plan: ShotPlan, seed: int, workers: Optional[int] = None,
            eta: Optional[float] = None) -> ProtocolResult:
    return run_protocol("TP2", p, plan, seed, workers=workers, eta=eta)


def run_cp_test(c: KrausChannel, p: KrausChannel, plan: ShotPlan, seed: int,
                workers: Optional[int] = None, eta: Optional[float] = None) -> ProtocolResult:
    """Prepare ``|k>``, apply ``C o P``, measure; success iff the outcome is ``k``.

    The estimate targets ``E_k |<k|U_C U_P|k>|^2``; the result also carries the
    exact ``|Tr(U_C U_P)/N|`` for comparison.
    """
    return run_protocol("CP", c, plan, seed, p=p, workers=workers, eta=eta)


@dataclass(frozen=True)
class S3Decision:
    accepted: bool
    certified_eta: float
    claim: str


def decide_s3(ta1: ProtocolResult, ta2: ProtocolResult, eta: float, epsilon: float) -> S3Decision:
    """Combine TA1 and TA2 into a statement about S3 membership.

    Acceptance certifies membership in S3(2 eta + 2 epsilon); rejection
    certifies non-membership in S3(eta - 2 epsilon).
    """
    if epsilon <= 0 or eta <= 0:
        raise InvalidParameterError("eta and epsilon must be positive")
    if epsilon >= eta / 2:
        raise InvalidParameterError(
            f"epsilon={epsilon} must be below eta/2={eta / 2} for an informative decision"
        )
    threshold = 1.0 - eta + epsilon
    if ta1.estimate >= threshold and ta2.estimate >= threshold:
        certified = 2 * eta + 2 * epsilon
        return S3Decision(accepted=True, certified_eta=certified, claim=f"in S3({certified:.6g})")
    certified = eta - 2 * epsilon
    return S3Decision(accepted=False, certified_eta=certified, claim=f"not in S3({certified:.6g})")


@dataclass(frozen=True)
class CalibrationResult:
    protocol: str
    exact: float
    reruns: int
    failures: int
    allowance: float
    estimates: Tuple[float, ...]

    @property
    def failure_fraction(self) -> float:
        return self.failures / self.reruns

    @property
    def passed(self) -> bool:
        return self.failure_fraction <= self.allowance


def calibrate(
        protocol: ProtocolName,
        c: KrausChannel,
        plan: ShotPlan,
        seed: int,
        reruns: int = 200,
        p: Optional[KrausChannel] = None,
        workers: Optional[int] = None,
) -> CalibrationResult:
    """Rerun a protocol with derived seeds and count runs missing the exact value by more than epsilon."""
    if reruns < 1:
        raise InvalidParameterError(f"reruns must be positive, got {reruns}")
    setup = _setup(protocol, c, p)
    estimates = []
    for r in range(reruns):
        result = _run(setup, plan, derive_seed(seed, protocol, "rerun", r), workers)
        estimates.append(result.estimate)
    failures = sum(abs(e - setup.exact) > plan.epsilon for e in estimates)
    d = plan.delta
    allowance = d + 3.0 * math.sqrt(d * (1.0 - d) / reruns)
    logger.info(
        "Calibration %s: %d/%d runs off by more than %.3g (allowance %.4f)",
        protocol, failures, reruns, plan.epsilon, allowance,
    )
    return CalibrationResult(
        protocol=protocol,
        exact=setup.exact,
        reruns=reruns,
        failures=failures,
        allowance=allowance,
        estimates=tuple(estimates),
    )


__all__ = [
    "PROTOCOLS",
    "ShotPlan",
    "S3Decision",
    "CalibrationResult",
    "shots_needed",
    "derive_seed",
    "shot_uniforms",
    "success_probability",
    "run_protocol",
    "run_ta1",
    "run_ta2",
    "run_tp1",
    "run_tp2",
    "run_cp_test",
    "decide_s3",
    "calibrate",
]
