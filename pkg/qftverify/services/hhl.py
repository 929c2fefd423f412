"""HHL state preparation with pluggable QFT channels and the shift-ensemble bounds.

Registers are ordered phase (N) x system (d) x ancilla (2); basis index
``(j*d + s)*2 + a``. The shift ``l`` replaces A by ``A + l I/N`` and f by
``f(x - l/N)``.

Steps:
    1. ``|+>^n |b> |0>``
    2. ``sum_j |j><j| (x) exp(2 pi i A_l j)``
    3. inverse QFT (or the channel C) on the phase register
    4. rotation controlled by the phase register
    5. QFT (or the channel P) on the phase register
    6. ``sum_j |j><j| (x) exp(-2 pi i A_l j)``
    7. ``H^n`` on the phase register
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import get_settings
from ..exceptions import (
    InternalConsistencyError,
    InvalidParameterError,
    InvalidStateError,
)
from ..models.results import EnsembleResult, ExpectationResult
from ..models.specs import InstanceSpec
from .channel import KrausChannel, apply_left, check_qubits, qft_matrix, qubits_for, unitary_of
from .closeness import cp_trace_measure, s1_measure, s3_measure, t2_measure, t3_measure
from .noise import seeded_rng
from .numerics import (
    CMatrix,
    DensityOp,
    PureState,
    fidelity_pure,
    hadamard_transform,
    herm_eig,
    operator_norm,
    random_pure_state,
    random_unitary,
)

logger = logging.getLogger(__name__)

BOUND_TOL = 1e-9
GRID_TOL = 1e-9

ScalarFunction = Callable[[np.ndarray], np.ndarray]


def _identity(n: int, cutoff: float) -> ScalarFunction:
    return lambda x: np.asarray(x, dtype=float)


def _inverse(n: int, cutoff: float) -> ScalarFunction:
    """Truncated pseudo-inverse ``min(1, cutoff / (N x))``; zero below ``1/N``."""
    size = 2 ** n

    def f(x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x < 1.0 / size, 1.0, x)
        return np.where(x < 1.0 / size, 0.0, np.minimum(1.0, cutoff / (size * safe)))

    return f


def _one(n: int, cutoff: float) -> ScalarFunction:
    return lambda x: np.ones_like(np.asarray(x, dtype=float))


def _zero(n: int, cutoff: float) -> ScalarFunction:
    return lambda x: np.zeros_like(np.asarray(x, dtype=float))


def _sqrt(n: int, cutoff: float) -> ScalarFunction:
    return lambda x: np.sqrt(np.clip(np.asarray(x, dtype=float), 0.0, None))


FUNCTIONS: Dict[str, Callable[[int, float], ScalarFunction]] = {
    "identity": _identity,
    "inverse": _inverse,
    "one": _one,
    "zero": _zero,
    "sqrt": _sqrt,
}


def make_function(name: str, n: int, cutoff: float = 1.0) -> ScalarFunction:
    try:
        factory = FUNCTIONS[name]
    except KeyError:
        raise InvalidParameterError(f"unknown function {name!r}; choose from {sorted(FUNCTIONS)}")
    return factory(n, cutoff)


@dataclass(frozen=True, eq=False)
class HHLInstance:
    n: int
    a: CMatrix
    b: PureState
    f: ScalarFunction
    perfect_case: bool
    spectrum: np.ndarray
    eigvecs: CMatrix
    function: str = "custom"

    def __post_init__(self):
        check_qubits(self.n)
        d = self.a.shape[0]
        if self.b.dim != d:
            raise InvalidParameterError(f"b has dim {self.b.dim}, A has dim {d}")
        recon = (self.eigvecs * self.spectrum) @ self.eigvecs.conj().T
        if np.max(np.abs(recon - self.a)) > 1e-9:
            raise InvalidParameterError("eigen-decomposition does not reproduce A")
        if np.any(self.spectrum < 0) or np.any(self.spectrum >= 1):
            raise InvalidParameterError(f"eigenvalues must lie in [0, 1), got {self.spectrum}")
        grid = self.spectrum * self.N
        on_grid = bool(np.all(np.abs(grid - np.round(grid)) < GRID_TOL))
        if self.perfect_case and not on_grid:
            raise InvalidParameterError("perfect_case flag inconsistent with spectrum")
        values = self.f(np.arange(self.N) / self.N)
        if np.any(np.abs(values) > 1.0 + 1e-12):
            raise InvalidParameterError("f must be bounded by 1 on the grid")

    @property
    def N(self) -> int:
        return 2 ** self.n

    @property
    def d(self) -> int:
        return self.a.shape[0]

    @property
    def dim(self) -> int:
        return self.N * self.d * 2

    @property
    def beta(self) -> np.ndarray:
        """Coefficients of b in the eigenbasis."""
        return self.eigvecs.conj().T @ self.b.amplitudes


def instance_from_matrix(
        a: CMatrix,
        b,
        n: int,
        function: str = "identity",
        cutoff: float = 1.0,
        perfect_case: Optional[bool] = None,
) -> HHLInstance:
    w, v = herm_eig(a)
    if operator_norm(a) > 1.0 + 1e-12:
        raise InvalidParameterError("A must have operator norm at most 1")
    grid = w * 2 ** n
    on_grid = bool(np.all(np.abs(grid - np.round(grid)) < GRID_TOL))
    return HHLInstance(
        n=n,
        a=np.asarray(a, dtype=np.complex128),
        b=b if isinstance(b, PureState) else PureState.normalized(b),
        f=make_function(function, n, cutoff),
        perfect_case=on_grid if perfect_case is None else perfect_case,
        spectrum=w,
        eigvecs=v,
        function=function,
    )


def build_instance(spec: InstanceSpec) -> HHLInstance:
    d = spec.d
    sigma = np.asarray(spec.spectrum, dtype=float)
    if spec.basis == "random":
        v = random_unitary(d, seeded_rng(spec.basis_seed))
    else:
        v = np.eye(d, dtype=np.complex128)
    a = (v * sigma) @ v.conj().T
    a = (a + a.conj().T) / 2
    if isinstance(spec.b, list):
        b = PureState.normalized(spec.b)
    elif spec.b == "random":
        b = random_pure_state(d, seeded_rng(spec.b_seed))
    else:
        b = PureState.normalized(v @ np.ones(d))
    return HHLInstance(
        n=spec.n,
        a=a,
        b=b,
        f=make_function(spec.function, spec.n, spec.cutoff),
        perfect_case=spec.is_perfect,
        spectrum=sigma,
        eigvecs=v,
        function=spec.function,
    )


def _evolution(inst: HHLInstance, l: int, sign: int) -> np.ndarray:
    """Stack over j of ``exp(sign * 2 pi i A_l j)``."""
    j = np.arange(inst.N)
    shifted = inst.spectrum + (l % inst.N) / inst.N
    phases = np.exp(sign * 2j * np.pi * np.outer(j, shifted))
    return np.einsum("sk,jk,tk->jst", inst.eigvecs, phases, inst.eigvecs.conj())


def _rotations(inst: HHLInstance, l: int) -> np.ndarray:
    t = np.arange(inst.N)
    fx = inst.f(((t - l) % inst.N) / inst.N)
    gx = np.sqrt(np.clip(1.0 - fx ** 2, 0.0, None))
    rot = np.empty((inst.N, 2, 2))
    rot[:, 0, 0] = fx
    rot[:, 0, 1] = -gx
    rot[:, 1, 0] = gx
    rot[:, 1, 1] = fx
    return rot


def _initial(inst: HHLInstance) -> np.ndarray:
    state = np.zeros((inst.N, inst.d, 2), dtype=np.complex128)
    state[:, :, 0] = inst.b.amplitudes[np.newaxis, :] / math.sqrt(inst.N)
    return state


def run_unitary(inst: HHLInstance, l: int, u3: CMatrix, u5: CMatrix) -> PureState:
    """Pure-state pipeline with unitaries ``u3`` and ``u5`` on the phase register at steps 3 and 5."""
    state = _initial(inst)
    state = np.einsum("jst,jta->jsa", _evolution(inst, l, 1), state)
    state = np.einsum("ij,jsa->isa", u3, state)
    state = np.einsum("tab,tsb->tsa", _rotations(inst, l), state)
    state = np.einsum("ij,jsa->isa", u5, state)
    state = np.einsum("jst,jta->jsa", _evolution(inst, l, -1), state)
    state = np.einsum("ij,jsa->isa", hadamard_transform(inst.n), state)
    return PureState(state.reshape(-1))


def run_ideal(inst: HHLInstance, l: int) -> PureState:
    f = qft_matrix(inst.n)
    return run_unitary(inst, l, f.conj().T, f)


def _phase_block_diag(inst: HHLInstance, blocks: np.ndarray) -> CMatrix:
    """Full operator ``sum_j |j><j| (x) blocks[j] (x) I_2``."""
    return np.einsum(
        "jk,jst,ab->jsaktb", np.eye(inst.N), blocks, np.eye(2)
    ).reshape(inst.dim, inst.dim)


def _controlled_rotation(inst: HHLInstance, l: int) -> CMatrix:
    rot = _rotations(inst, l)
    op = np.einsum("tu,sv,tab->tsauvb", np.eye(inst.N), np.eye(inst.d), rot)
    return op.reshape(inst.dim, inst.dim).astype(np.complex128)


def run_noisy(inst: HHLInstance, l: int, c: KrausChannel, p: KrausChannel) -> DensityOp:
    """Density-operator pipeline with C at step 3 and P at step 5; every other step is exact."""
    if c.dim != inst.N or p.dim != inst.N:
        raise InvalidParameterError(
            f"channels act on dims {c.dim}/{p.dim}, phase register has dim {inst.N}"
        )
    right = inst.d * 2
    psi = _initial(inst).reshape(-1)
    psi = _phase_block_diag(inst, _evolution(inst, l, 1)) @ psi
    rho = np.outer(psi, psi.conj())
    rho = apply_left(c, rho, right)
    r = _controlled_rotation(inst, l)
    rho = r @ rho @ r.conj().T
    rho = apply_left(p, rho, right)
    w = np.kron(hadamard_transform(inst.n), np.eye(right)) @ _phase_block_diag(
        inst, _evolution(inst, l, -1)
    )
    rho = w @ rho @ w.conj().T
    return DensityOp(rho)


def _shifts(inst: HHLInstance, fn: Callable[[int], object], workers: Optional[int]) -> list:
    workers = workers if workers is not None else get_settings().workers
    if workers <= 1:
        return [fn(l) for l in range(inst.N)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(inst.N)))


def ensemble_states(
        inst: HHLInstance,
        c: KrausChannel,
        p: KrausChannel,
        workers: Optional[int] = None,
) -> List[Tuple[PureState, DensityOp]]:
    """``(ideal, noisy)`` outputs for every shift, in shift order."""
    return _shifts(inst, lambda l: (run_ideal(inst, l), run_noisy(inst, l, c, p)), workers)


def perfect_case_bound(eta1: float, eta2: float) -> float:
    return 1.0 - math.sqrt(eta1) - math.sqrt(eta2)


def general_case_bound(eta1: float, eta2: float, K: int) -> float:
    if K < 2:
        raise InvalidParameterError(f"K must be at least 2, got {K}")
    return (
        1.0
        - (math.sqrt(eta1) + math.sqrt(eta2))
        - 2.0 * math.sqrt(K) * (eta1 ** 0.25 + eta2 ** 0.25)
        - 4.0 * math.sqrt(5) / (K - 1) ** 0.25
    )


def expectation_bound(eta1: float, eta2: float) -> float:
    return 2.0 * (eta1 ** 0.25 + eta2 ** 0.25)


def unitary_perfect_bound(eta: float) -> float:
    return 2.0 * math.sqrt(2.0 * eta)


def unitary_general_bound(eta: float, K: int) -> float:
    if K < 2:
        raise InvalidParameterError(f"K must be at least 2, got {K}")
    return 4.0 * math.sqrt(2) / math.sqrt(K - 1) + 8.0 * K * math.sqrt(eta)


def _nonneg(eta: float) -> float:
    return max(0.0, eta)


def _good_set_width(inst: HHLInstance, K: Optional[int]) -> Optional[int]:
    if inst.perfect_case:
        return None
    if K is None:
        raise InvalidParameterError("an off-grid spectrum needs a good-set width K")
    if K < 2:
        raise InvalidParameterError(f"K must be at least 2, got {K}")
    return K


def ensemble_fidelity(
        inst: HHLInstance,
        c: KrausChannel,
        p: KrausChannel,
        K: Optional[int] = None,
        states: Optional[List[Tuple[PureState, DensityOp]]] = None,
        workers: Optional[int] = None,
) -> EnsembleResult:
    """Mean fidelity over all shifts against the perfect-case or general-case bound.

    Args:
        inst: the linear-system instance.
        c: channel used in place of the inverse QFT.
        p: channel used in place of the QFT.
        K: good-set half-width; required when the spectrum is off the grid, ignored otherwise.
        states: precomputed output of ``ensemble_states``.
    """
    K = _good_set_width(inst, K)
    eta1 = _nonneg(1.0 - s3_measure(c))
    eta2 = _nonneg(1.0 - t3_measure(p))
    states = states if states is not None else ensemble_states(inst, c, p, workers)
    fidelities = [fidelity_pure(rho, phi) for phi, rho in states]
    mean = float(np.mean(fidelities))
    if inst.perfect_case:
        bound = perfect_case_bound(eta1, eta2)
        formula = "1 - sqrt(eta1) - sqrt(eta2)"
    else:
        bound = general_case_bound(eta1, eta2, K)
        formula = "1 - (sqrt(eta1)+sqrt(eta2)) - 2 sqrt(K)(eta1^1/4+eta2^1/4) - 4 sqrt(5)/(K-1)^1/4"
        if bound <= 0:
            logger.warning("General-case bound %.4f is vacuous at K=%d", bound, K)
    logger.info("Ensemble fidelity %.6f against bound %.6f (n=%d, d=%d)", mean, bound, inst.n, inst.d)
    return EnsembleResult(
        mode="channel_pair",
        metric="fidelity",
        direction="at_least",
        perfect_case=inst.perfect_case,
        per_shift=fidelities,
        mean_value=mean,
        bound=bound,
        bound_formula=formula,
        passed=mean >= bound - BOUND_TOL,
        etas={"eta1": eta1, "eta2": eta2},
        K=K,
        checks={"min_fidelity": float(min(fidelities))},
    )


def ensemble_expectation_error(
        inst: HHLInstance,
        c: KrausChannel,
        p: KrausChannel,
        observables: Sequence[CMatrix],
        states: Optional[List[Tuple[PureState, DensityOp]]] = None,
        workers: Optional[int] = None,
) -> List[ExpectationResult]:
    """``E_l |Tr(M rho_l) - <phi_l|M|phi_l>|`` for each observable against ``2(eta1^1/4 + eta2^1/4)``."""
    if not inst.perfect_case:
        raise InvalidParameterError("the expectation bound applies to perfect-case instances")
    for m in observables:
        if np.asarray(m).shape != (inst.dim, inst.dim):
            raise InvalidParameterError(f"observable must be {inst.dim} x {inst.dim}")
        if operator_norm(m) > 1.0 + 1e-12:
            raise InvalidParameterError("observable must have operator norm at most 1")
    eta1 = _nonneg(1.0 - s3_measure(c))
    eta2 = _nonneg(1.0 - t3_measure(p))
    bound = expectation_bound(eta1, eta2)
    states = states if states is not None else ensemble_states(inst, c, p, workers)
    results = []
    for m in observables:
        m = np.asarray(m, dtype=np.complex128)
        errors = []
        for phi, rho in states:
            ideal = np.vdot(phi.amplitudes, m @ phi.amplitudes)
            noisy = np.trace(m @ rho.matrix)
            errors.append(abs(noisy - ideal))
        mean = float(np.mean(errors))
        results.append(
            ExpectationResult(
                mean_abs_error=mean,
                bound=bound,
                passed=mean <= bound + BOUND_TOL,
                etas={"eta1": eta1, "eta2": eta2},
            )
        )
    return results


def expectation_error(
        inst: HHLInstance,
        c: KrausChannel,
        p: KrausChannel,
        m: CMatrix,
) -> Tuple[float, float, bool]:
    result = ensemble_expectation_error(inst, c, p, [m])[0]
    return result.mean_abs_error, result.bound, result.passed


def random_observable(dim: int, rng: np.random.Generator) -> CMatrix:
    """Random operator of unit operator norm (a Haar unitary times a uniform phase)."""
    return random_unitary(dim, rng) * np.exp(2j * np.pi * rng.random())


def postselected_expectation(inst: HHLInstance, state: PureState, m_sys: CMatrix) -> float:
    """``<phi| I (x) M (x) |0><0| |phi>``: the downstream use of the output state."""
    m_sys = np.asarray(m_sys, dtype=np.complex128)
    if m_sys.shape != (inst.d, inst.d):
        raise InvalidParameterError(f"system observable must be {inst.d} x {inst.d}")
    amps = state.amplitudes.reshape(inst.N, inst.d, 2)[:, :, 0]
    value = np.einsum("js,st,jt->", amps.conj(), m_sys, amps)
    return float(value.real)


def _squared_distances(inst: HHLInstance, u3: CMatrix, u5: CMatrix, workers: Optional[int]) -> List[float]:
    def one(l: int) -> float:
        overlap = run_ideal(inst, l).overlap(run_unitary(inst, l, u3, u5))
        return float(max(0.0, 1.0 - abs(overlap) ** 2))

    return _shifts(inst, one, workers)


def _unitary_bound(inst: HHLInstance, eta: float, K: Optional[int]) -> Tuple[float, str, Optional[int]]:
    if inst.perfect_case:
        return unitary_perfect_bound(eta), "2 sqrt(2 eta)", None
    bound = unitary_general_bound(eta, K)
    if bound >= 1.0:
        logger.warning("Unitary general-case bound %.4f is vacuous at K=%d", bound, K)
    return bound, "4 sqrt(2)/sqrt(K-1) + 8 K sqrt(eta)", K


def ensemble_unitary_inverse(
        inst: HHLInstance,
        c: KrausChannel,
        K: Optional[int] = None,
        workers: Optional[int] = None,
) -> EnsembleResult:
    """Run with a unitary C at step 3 and its exact inverse at step 5."""
    K = _good_set_width(inst, K)
    u = unitary_of(c)
    if c.dim != inst.N:
        raise InvalidParameterError(f"channel dim {c.dim} does not match N={inst.N}")
    eta = _nonneg(1.0 - s1_measure(c))
    values = _squared_distances(inst, u, u.conj().T, workers)
    mean = float(np.mean(values))
    bound, formula, K = _unitary_bound(inst, eta, K)
    return EnsembleResult(
        mode="unitary_inverse",
        metric="squared_trace_distance",
        direction="at_most",
        perfect_case=inst.perfect_case,
        per_shift=values,
        mean_value=mean,
        bound=bound,
        bound_formula=formula,
        passed=mean <= bound + BOUND_TOL,
        etas={"eta": eta},
        K=K,
    )


def cp_lemma_value(c: KrausChannel, p: KrausChannel) -> float:
    """``|E_k <k^|U_P|k> <k|U_C|k^>|``."""
    u_c, u_p = unitary_of(c), unitary_of(p)
    f = qft_matrix(qubits_for(c.dim))
    left = np.diagonal(f.conj().T @ u_p)
    right = np.diagonal(u_c @ f)
    return float(abs(np.mean(left * right)))


def ensemble_cp_mode(
        inst: HHLInstance,
        c: KrausChannel,
        p: KrausChannel,
        K: Optional[int] = None,
        workers: Optional[int] = None,
) -> EnsembleResult:
    """Unitary C and P, with C close to the inverse QFT on Fourier inputs, P close to the QFT on
    computational inputs and ``C o P`` close to the identity in trace."""
    K = _good_set_width(inst, K)
    u_c, u_p = unitary_of(c), unitary_of(p)
    if c.dim != inst.N or p.dim != inst.N:
        raise InvalidParameterError(f"channel dims {c.dim}/{p.dim} do not match N={inst.N}")
    eta1 = _nonneg(1.0 - s1_measure(c))
    eta2 = _nonneg(1.0 - t2_measure(p))
    eta3 = _nonneg(1.0 - cp_trace_measure(c, p))
    total = eta1 + eta2 + eta3
    values = _squared_distances(inst, u_c, u_p, workers)
    mean = float(np.mean(values))
    if inst.perfect_case:
        bound, formula = unitary_perfect_bound(total), "2 sqrt(2 (eta1+eta2+eta3))"
    else:
        bound = unitary_general_bound(total, K)
        formula = "4 sqrt(2)/sqrt(K-1) + 8 K sqrt(eta1+eta2+eta3)"
    lemma = cp_lemma_value(c, p)
    return EnsembleResult(
        mode="s1_t2_cp",
        metric="squared_trace_distance",
        direction="at_most",
        perfect_case=inst.perfect_case,
        per_shift=values,
        mean_value=mean,
        bound=bound,
        bound_formula=formula,
        passed=mean <= bound + BOUND_TOL,
        etas={"eta1": eta1, "eta2": eta2, "eta3": eta3},
        K=K,
        checks={"lemma_value": lemma, "lemma_bound": 1.0 - total},
    )


@dataclass(frozen=True)
class GoodSetDecomposition:
    K: int
    good_sets: Tuple[Tuple[int, ...], ...]
    alpha: np.ndarray
    tail_mass: np.ndarray

    @property
    def tail_bound(self) -> float:
        return 2.0 / (self.K - 1)


def phase_amplitudes(sigma: float, n: int) -> np.ndarray:
    """``alpha_g = <g^|psi>`` for ``|psi> = N^-1/2 sum_j exp(2 pi i j sigma)|j>``."""
    size = 2 ** check_qubits(n)
    j = np.arange(size)
    offsets = sigma - np.arange(size) / size
    return np.exp(2j * np.pi * np.outer(offsets, j)).sum(axis=1) / size


def good_set(sigma: float, n: int, K: int) -> Tuple[int, ...]:
    size = 2 ** n
    p = int(math.floor(sigma * size + GRID_TOL))
    return tuple(sorted({(p + offset) % size for offset in range(-K + 1, K + 1)}))


def good_set_decompose(inst: HHLInstance, K: int) -> GoodSetDecomposition:
    if K < 2:
        raise InvalidParameterError(f"K must be at least 2, got {K}")
    sets, alphas, tails = [], [], []
    for sigma in inst.spectrum:
        alpha = phase_amplitudes(float(sigma), inst.n)
        g = good_set(float(sigma), inst.n, K)
        mask = np.ones(inst.N, dtype=bool)
        mask[list(g)] = False
        total = float(np.sum(np.abs(alpha) ** 2))
        if abs(total - 1.0) > 1e-12 * inst.N:
            raise InternalConsistencyError(f"phase amplitudes have total mass {total!r}")
        tail = float(np.sum(np.abs(alpha[mask]) ** 2))
        if tail > 2.0 / (K - 1) + 1e-12:
            raise InternalConsistencyError(
                f"tail mass {tail:.6f} exceeds 2/(K-1) for eigenvalue {sigma!r} at K={K}"
            )
        sets.append(g)
        alphas.append(alpha)
        tails.append(tail)
    return GoodSetDecomposition(
        K=K,
        good_sets=tuple(sets),
        alpha=np.asarray(alphas),
        tail_mass=np.asarray(tails),
    )


def lemma_error_terms(
        c: KrausChannel,
        alpha: np.ndarray,
        good: Sequence[int],
        eta: Optional[float] = None,
) -> Tuple[float, float]:
    """Return ``(sum_i |Err_i|^2, 2 eta |G|^2 + 18 delta)``.

    ``Err_i = E_l <varphi_l|A_i|psi_l> - (1 - delta) E_l <l|A_i|l^>`` with
    ``psi_l = sum_g alpha_g |(g+l)^>``, ``varphi_l = sum_g alpha_g |g+l>`` and
    ``delta`` the mass of ``alpha`` outside ``good``.
    """
    alpha = np.asarray(alpha, dtype=np.complex128)
    size = c.dim
    if alpha.shape != (size,):
        raise InvalidParameterError(f"alpha must have length {size}")
    norm = float(np.sum(np.abs(alpha) ** 2))
    if abs(norm - 1.0) > 1e-9:
        raise InvalidStateError(f"alpha must be normalized, got mass {norm!r}")
    inside = np.zeros(size, dtype=bool)
    inside[list(good)] = True
    delta = float(np.sum(np.abs(alpha[~inside]) ** 2))
    f = qft_matrix(qubits_for(size))
    varphi = np.stack([np.roll(alpha, l) for l in range(size)], axis=1)
    psi = f @ varphi
    ops = c.kraus_ops
    mixed = np.einsum("al,kab,bl->k", varphi.conj(), ops, psi) / size
    diagonal = np.einsum("kab,ba->k", ops, f) / size
    errors = mixed - (1.0 - delta) * diagonal
    if eta is None:
        eta = _nonneg(1.0 - s3_measure(c))
    return float(np.sum(np.abs(errors) ** 2)), 2.0 * eta * len(good) ** 2 + 18.0 * delta


__all__ = [
    "FUNCTIONS",
    "HHLInstance",
    "GoodSetDecomposition",
    "make_function",
    "instance_from_matrix",
    "build_instance",
    "run_ideal",
    "run_unitary",
    "run_noisy",
    "ensemble_states",
    "ensemble_fidelity",
    "ensemble_expectation_error",
    "expectation_error",
    "ensemble_unitary_inverse",
    "ensemble_cp_mode",
    "cp_lemma_value",
    "good_set",
    "good_set_decompose",
    "phase_amplitudes",
    "lemma_error_terms",
    "random_observable",
    "postselected_expectation",
    "perfect_case_bound",
    "general_case_bound",
    "expectation_bound",
    "unitary_perfect_bound",
    "unitary_general_bound",
]
