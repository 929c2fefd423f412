"""Experiment suites: expand a validated config into cases and run them.

Every case is independent and seeded from ``derive_seed(cfg.seed, ...)``,
so results do not depend on the worker count or the order cases finish in.
A case whose bound fails is recorded and the suite carries on; an
``InternalConsistencyError`` aborts the whole run.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.experiment import config_hash
from ..config.settings import get_settings
from ..exceptions import InternalConsistencyError, QFTVerifyError
from ..models.experiment import HHL_SUITES, ExperimentConfig
from ..models.results import (
    CaseResult,
    CheckResult,
    ClosenessReport,
    ReportRecord,
    Summary,
)
from ..models.specs import UNITARY_KINDS, InstanceSpec, NoiseSpec
from .channel import (
    KrausChannel,
    channel_power,
    compose,
    inverse_unitary_channel,
    qft_channel,
    reflection_channel,
)
from .closeness import (
    DUAL_ROUTE_TOL,
    closeness_report,
    derived_channel_bounds,
    orthobasis_measure,
    phase_coherence,
    s1_from_unitary_fidelity,
    t1_measure,
    t2_measure,
    t3_measure,
)
from .hhl import (
    HHLInstance,
    build_instance,
    cp_lemma_value,
    ensemble_cp_mode,
    ensemble_expectation_error,
    ensemble_fidelity,
    ensemble_states,
    ensemble_unitary_inverse,
    good_set_decompose,
    lemma_error_terms,
    random_observable,
)
from .noise import (
    adversarial_preset,
    make_c_channel,
    make_p_channel,
    random_thetas,
    seeded_rng,
)
from .numerics import random_unitary
from .verify import ShotPlan, calibrate, decide_s3, derive_seed, run_protocol, success_probability

logger = logging.getLogger(__name__)

CHECK_TOL = 1e-9

# A thunk receives the worker count it may use internally.
CaseThunk = Tuple[str, Callable[[int], List[CaseResult]]]


def _check(name: str, value: float, bound: float, direction: str = "at_most") -> CheckResult:
    if direction == "at_most":
        passed = value <= bound + CHECK_TOL
    else:
        passed = value >= bound - CHECK_TOL
    return CheckResult(name=name, value=float(value), bound=float(bound), direction=direction, passed=passed)


def _etas(report: ClosenessReport) -> Dict[str, float]:
    names = ("eta_s1", "eta_s2", "eta_s3", "eta_t1", "eta_t2", "eta_t3")
    return {name: getattr(report, name) for name in names if getattr(report, name) is not None}


def _case(case_id: str, details: list, measured: Optional[float], bound: Optional[float] = None,
          eta_inputs: Optional[Dict[str, float]] = None, description: str = "",
          passed: Optional[bool] = None) -> CaseResult:
    if passed is None:
        passed = all(getattr(d, "passed", True) for d in details)
    return CaseResult(
        case_id=case_id,
        description=description,
        measured=measured,
        bound=bound,
        eta_inputs=eta_inputs or {},
        passed=passed,
        details=details,
    )


# Channel resolution


def _seeded(spec: NoiseSpec, root: int) -> NoiseSpec:
    if spec.needs_seed and spec.seed is None:
        return spec.model_copy(update={"seed": derive_seed(root, "channel", spec.id)})
    return spec


def _channel(cfg: ExperimentConfig, ident: str) -> Tuple[NoiseSpec, KrausChannel]:
    spec = _seeded(cfg.channel_map()[ident], cfg.seed)
    return spec, (make_p_channel(spec) if spec.target == "forward" else make_c_channel(spec))


def _pair(cfg: ExperimentConfig, pair_id: str) -> Tuple[KrausChannel, KrausChannel]:
    pair = next(pair for pair in cfg.pairs if pair.id == pair_id)
    c_spec, c = _channel(cfg, pair.c)
    if pair.p is None:
        return c, qft_channel(c_spec.n)
    return c, _channel(cfg, pair.p)[1]


def _instance(cfg: ExperimentConfig, inst_id: str) -> HHLInstance:
    return build_instance(next(inst for inst in cfg.instances if inst.id == inst_id))


def _diag_thetas(spec: NoiseSpec) -> Optional[np.ndarray]:
    if spec.kind not in ("diag_after", "diag_before"):
        return None
    if spec.thetas is not None:
        return np.asarray(spec.thetas, dtype=float)
    return random_thetas(spec.n, spec.theta_scale, spec.seed)


def _random_noise(rng: np.random.Generator, ident: str, families: Sequence[str], n: int,
                  max_strength: float, target: str = "inverse") -> NoiseSpec:
    kind = families[int(rng.integers(len(families)))]
    strength = float(rng.uniform(0.0, max_strength))
    sub_seed = int(rng.integers(0, 2 ** 63))
    params: Dict[str, object] = {}
    if kind in ("diag_after", "diag_before"):
        params = {"theta_scale": strength * math.pi, "seed": sub_seed}
    elif kind == "depolarized":
        params = {"p": strength}
    elif kind in ("perturbed_unitary", "mixed_unitary"):
        params = {"eps": strength, "seed": sub_seed}
    return NoiseSpec(id=ident, kind=kind, n=n, target=target, **params)


def population_specs(cfg: ExperimentConfig) -> List[NoiseSpec]:
    """Seeded random channels; member ``i`` depends only on ``cfg.seed`` and ``i``."""
    pop = cfg.population
    if pop is None:
        return []
    specs = []
    for i in range(pop.count):
        rng = seeded_rng(derive_seed(cfg.seed, "population", i))
        n = int(pop.n[int(rng.integers(len(pop.n)))])
        specs.append(_random_noise(rng, f"population-{i:04d}", pop.families, n, pop.max_strength))
    return specs


_POPULATION_FUNCTIONS = ("identity", "sqrt", "inverse", "one")


@dataclass(frozen=True)
class PopulationCase:
    """One sampled HHL case: a C channel, an optional P channel and an instance."""

    id: str
    c: NoiseSpec
    p: Optional[NoiseSpec]
    instance: InstanceSpec


def _random_instance(rng: np.random.Generator, ident: str, n: int, d: int, on_grid: bool) -> InstanceSpec:
    size = 2 ** n
    if on_grid:
        spectrum = np.sort(rng.choice(size, size=d, replace=d > size)) / size
    else:
        spectrum = np.sort(rng.uniform(0.0, 1.0, size=d))
    function = _POPULATION_FUNCTIONS[int(rng.integers(len(_POPULATION_FUNCTIONS)))]
    return InstanceSpec(
        id=ident,
        n=n,
        spectrum=[float(s) for s in spectrum],
        basis="random",
        basis_seed=int(rng.integers(0, 2 ** 63)),
        b="random",
        b_seed=int(rng.integers(0, 2 ** 63)),
        function=function,
        perfect_case=True if on_grid else None,
    )


def hhl_population(cfg: ExperimentConfig) -> List[PopulationCase]:
    """Seeded (channels, instance) cases for the HHL suites.

    ``hhl_perfect`` draws grid spectra, ``hhl_general`` off-grid ones and the
    unitary suites alternate between the two. The unitary suites only draw
    unitary families.
    """
    pop = cfg.population
    if pop is None or cfg.suite not in HHL_SUITES:
        return []
    families = list(pop.families)
    if cfg.suite in ("hhl_unitary_inverse", "hhl_cp_mode"):
        families = [kind for kind in families if kind in UNITARY_KINDS]
    cases = []
    for i in range(pop.count):
        ident = f"population-{i:04d}"
        rng = seeded_rng(derive_seed(cfg.seed, "hhl-population", i))
        n = int(pop.n[int(rng.integers(len(pop.n)))])
        d = int(pop.d[int(rng.integers(len(pop.d)))])
        c = _random_noise(rng, f"{ident}-c", families, n, pop.max_strength)
        p = None
        if cfg.suite != "hhl_unitary_inverse":
            p = _random_noise(rng, f"{ident}-p", families, n, pop.max_strength, target="forward")
        if cfg.suite == "hhl_perfect":
            on_grid = True
        elif cfg.suite == "hhl_general":
            on_grid = False
        else:
            on_grid = i % 2 == 0
        cases.append(PopulationCase(ident, c, p, _random_instance(rng, ident, n, d, on_grid)))
    return cases


# Closeness checks


def _s_side_checks(c: KrausChannel, report: ClosenessReport) -> List[CheckResult]:
    checks = [
        _check("s3_at_most_min_s1_s2", report.s3, min(report.s1, report.s2)),
        _check("eta_s3_at_most_eta_s1_plus_eta_s2", report.eta_s3, report.eta_s1 + report.eta_s2),
    ]
    if report.max_leakage is not None:
        checks.append(_check("leakage_at_most_eta_s1", report.max_leakage, report.eta_s1))
    return checks


def _t_side_checks(report: ClosenessReport) -> List[CheckResult]:
    return [
        _check("t3_at_most_min_t1_t2", report.t3, min(report.t1, report.t2)),
        _check("eta_t3_at_most_eta_t1_plus_eta_t2", report.eta_t3, report.eta_t1 + report.eta_t2),
    ]


def _cube_checks(c: KrausChannel, report: ClosenessReport) -> List[CheckResult]:
    """The third power of a C close to the inverse QFT is close to the QFT."""
    cube = channel_power(c, 3)
    bounds = derived_channel_bounds(report.eta_s1, report.eta_s2, report.eta_s3)
    return [
        _check("cube_eta_t1", 1.0 - t1_measure(cube), bounds["t1_c3"]),
        _check("cube_eta_t2", 1.0 - t2_measure(cube), bounds["t2_c3"]),
        _check("cube_eta_t3", 1.0 - t3_measure(cube), bounds["t3_c3"]),
    ]


def _reflection_checks(c: KrausChannel, report: ClosenessReport, n: int) -> List[CheckResult]:
    """Composing with the reflection ``k -> -k`` on either side turns S closeness into T closeness."""
    r = reflection_channel(n)
    checks = []
    for label, moved in (("after", compose(r, c)), ("before", compose(c, r))):
        checks.append(_check(f"reflect_{label}_t1", t1_measure(moved), report.s1, "at_least"))
        checks.append(_check(f"reflect_{label}_t2", t2_measure(moved), report.s2, "at_least"))
    return checks


def _audit_channel(cfg: ExperimentConfig, ident: str) -> List[CaseResult]:
    spec, ch = _channel(cfg, ident)
    if spec.target == "forward":
        report = closeness_report(None, ch)
        details = [report] + _t_side_checks(report)
        return [_case(ident, details, report.t3, eta_inputs=_etas(report), description=spec.kind)]

    report = closeness_report(ch)
    details: list = [report] + _s_side_checks(ch, report)
    basis = random_unitary(ch.dim, seeded_rng(derive_seed(cfg.seed, ident, "basis")))
    details.append(_check("orthobasis_gap", abs(orthobasis_measure(ch, basis) - report.s3), DUAL_ROUTE_TOL))
    if ch.is_unitary:
        details.append(_check("unitary_s1_gap", abs(s1_from_unitary_fidelity(ch) - report.eta_s1), DUAL_ROUTE_TOL))
    thetas = _diag_thetas(spec)
    if thetas is not None:
        mean_sq, _ = phase_coherence(np.exp(1j * thetas))
        details.append(_check("phase_coherence_gap", abs(mean_sq - report.s3), DUAL_ROUTE_TOL))
    return [_case(ident, details, report.s3, eta_inputs=_etas(report), description=spec.kind)]


def _audit_pair(cfg: ExperimentConfig, pair_id: str) -> List[CaseResult]:
    c, p = _pair(cfg, pair_id)
    report = closeness_report(c, p)
    details: list = [report] + _s_side_checks(c, report) + _t_side_checks(report)
    if report.cp_trace is not None:
        eta3 = 1.0 - report.cp_trace
        details.append(
            _check("cp_lemma", cp_lemma_value(c, p), 1.0 - report.eta_s1 - report.eta_t2 - eta3, "at_least")
        )
    measured = report.cp_trace if report.cp_trace is not None else report.s3
    return [_case(pair_id, details, measured, eta_inputs=_etas(report), description="pair")]


def _closeness_audit(cfg: ExperimentConfig) -> List[CaseThunk]:
    thunks: List[CaseThunk] = [
        (spec.id, lambda _w, ident=spec.id: _audit_channel(cfg, ident)) for spec in cfg.channels
    ]
    thunks.extend((pair.id, lambda _w, ident=pair.id: _audit_pair(cfg, ident)) for pair in cfg.pairs)
    return thunks


def _composition_case(spec: NoiseSpec) -> List[CaseResult]:
    c = make_c_channel(spec)
    p = make_p_channel(spec)
    s_report = closeness_report(c)
    t_report = closeness_report(None, p)
    details: list = [s_report, t_report]
    details += _s_side_checks(c, s_report)
    details += _t_side_checks(t_report)
    details += _cube_checks(c, s_report)
    details += _reflection_checks(c, s_report, spec.n)
    return [
        _case(
            spec.id,
            details,
            s_report.eta_s3,
            bound=s_report.eta_s1 + s_report.eta_s2,
            eta_inputs={**_etas(s_report), **_etas(t_report)},
            description=f"{spec.kind} n={spec.n}",
        )
    ]


def _theorem_s3(cfg: ExperimentConfig) -> List[CaseThunk]:
    specs = [_seeded(spec, cfg.seed) for spec in cfg.channels if spec.target == "inverse"]
    specs += population_specs(cfg)
    return [(spec.id, lambda _w, s=spec: _composition_case(s)) for spec in specs]


# Protocols

_MEASURE_FOR = {"TA1": "s1", "TA2": "s2", "TP1": "t1", "TP2": "t2"}


def _calibration_case(cfg: ExperimentConfig, case_id: str, protocol: str, c: KrausChannel,
                      p: Optional[KrausChannel], workers: int) -> List[CaseResult]:
    plan = ShotPlan(cfg.plan.epsilon, cfg.plan.delta)
    result = calibrate(protocol, c, plan, derive_seed(cfg.seed, case_id), cfg.reruns, p=p, workers=workers)
    single = run_protocol(protocol, c, plan, derive_seed(cfg.seed, case_id, "run"), p=p,
                          workers=workers, eta=cfg.plan.eta)
    details: list = [single]
    if protocol in _MEASURE_FOR:
        if protocol.startswith("TA"):
            report = closeness_report(c, leakage=False)
        else:
            report = closeness_report(None, c)
        measure = getattr(report, _MEASURE_FOR[protocol])
        details.append(_check("exact_success_gap", abs(success_probability(protocol, c) - measure), DUAL_ROUTE_TOL))
    details.append(_check("failure_fraction", result.failure_fraction, result.allowance))
    return [
        _case(
            case_id,
            details,
            result.failure_fraction,
            bound=result.allowance,
            description=f"{result.failures}/{result.reruns} runs off by more than {plan.epsilon:g}",
        )
    ]


def _protocol_calibration(cfg: ExperimentConfig) -> List[CaseThunk]:
    thunks: List[CaseThunk] = []
    for spec in cfg.channels:
        allowed = ("TA1", "TA2") if spec.target == "inverse" else ("TP1", "TP2")
        for protocol in cfg.protocols:
            if protocol not in allowed:
                continue
            case_id = f"{spec.id}:{protocol}"

            def thunk(workers, ident=spec.id, case_id=case_id, protocol=protocol):
                return _calibration_case(cfg, case_id, protocol, _channel(cfg, ident)[1], None, workers)

            thunks.append((case_id, thunk))
    if "CP" in cfg.protocols:
        by_id = cfg.channel_map()
        for pair in cfg.pairs:
            if not by_id[pair.c].is_unitary or (pair.p is not None and not by_id[pair.p].is_unitary):
                logger.info("Skipping CP calibration for %s: channels are not unitary", pair.id)
                continue
            case_id = f"{pair.id}:CP"

            def thunk(workers, pair_id=pair.id, case_id=case_id):
                c, p = _pair(cfg, pair_id)
                return _calibration_case(cfg, case_id, "CP", c, p, workers)

            thunks.append((case_id, thunk))
    return thunks


# HHL suites


def _perfect_case(cfg: ExperimentConfig, case_id: str, c: KrausChannel, p: KrausChannel,
                  inst: HHLInstance, workers: int) -> List[CaseResult]:
    states = ensemble_states(inst, c, p, workers)
    ensemble = ensemble_fidelity(inst, c, p, states=states)
    rng = seeded_rng(derive_seed(cfg.seed, case_id, "observables"))
    observables = [random_observable(inst.dim, rng) for _ in range(cfg.observables)]
    expectations = ensemble_expectation_error(inst, c, p, observables, states=states) if observables else []
    return [
        _case(
            case_id,
            [ensemble] + expectations,
            ensemble.mean_value,
            bound=ensemble.bound,
            eta_inputs=ensemble.etas,
            description=ensemble.bound_formula,
        )
    ]


def _general_cases(cfg: ExperimentConfig, case_id: str, c: KrausChannel, p: KrausChannel,
                   inst: HHLInstance, workers: int) -> List[CaseResult]:
    states = ensemble_states(inst, c, p, workers)
    if inst.perfect_case:
        ensemble = ensemble_fidelity(inst, c, p, states=states)
        return [_case(case_id, [ensemble], ensemble.mean_value, ensemble.bound,
                      ensemble.etas, ensemble.bound_formula)]
    cases = []
    for K in cfg.K:
        ensemble = ensemble_fidelity(inst, c, p, K=K, states=states)
        details: list = [ensemble]
        decomposition = good_set_decompose(inst, K)
        for i, good in enumerate(decomposition.good_sets):
            details.append(_check(f"tail_mass_{i}", decomposition.tail_mass[i], decomposition.tail_bound))
            value, bound = lemma_error_terms(c, decomposition.alpha[i], good, eta=ensemble.etas["eta1"])
            details.append(_check(f"error_terms_{i}", value, bound))
        cases.append(
            _case(f"{case_id}:K{K}", details, ensemble.mean_value, ensemble.bound,
                  ensemble.etas, ensemble.bound_formula)
        )
    return cases


def _unitary_inverse_cases(cfg: ExperimentConfig, case_id: str, c: KrausChannel, p: KrausChannel,
                           inst: HHLInstance, workers: int) -> List[CaseResult]:
    # P is fixed to the exact inverse of C in this mode.
    widths = [None] if inst.perfect_case else list(cfg.K)
    cases = []
    for K in widths:
        ensemble = ensemble_unitary_inverse(inst, c, K=K, workers=workers)
        suffix = "" if K is None else f":K{K}"
        cases.append(
            _case(f"{case_id}{suffix}", [ensemble], ensemble.mean_value, ensemble.bound,
                  ensemble.etas, ensemble.bound_formula)
        )
    return cases


def _cp_mode_cases(cfg: ExperimentConfig, case_id: str, c: KrausChannel, p: KrausChannel,
                   inst: HHLInstance, workers: int) -> List[CaseResult]:
    widths = [None] if inst.perfect_case else list(cfg.K)
    cases = []
    for K in widths:
        ensemble = ensemble_cp_mode(inst, c, p, K=K, workers=workers)
        lemma = _check("cp_lemma", ensemble.checks["lemma_value"], ensemble.checks["lemma_bound"], "at_least")
        suffix = "" if K is None else f":K{K}"
        cases.append(
            _case(f"{case_id}{suffix}", [ensemble, lemma], ensemble.mean_value, ensemble.bound,
                  ensemble.etas, ensemble.bound_formula)
        )
    return cases


HHLRunner = Callable[[ExperimentConfig, str, KrausChannel, KrausChannel, HHLInstance, int], List[CaseResult]]

_HHL_RUNNERS: Dict[str, HHLRunner] = {
    "hhl_perfect": _perfect_case,
    "hhl_general": _general_cases,
    "hhl_unitary_inverse": _unitary_inverse_cases,
    "hhl_cp_mode": _cp_mode_cases,
}


def _configured_thunk(cfg: ExperimentConfig, runner: HHLRunner, source: str, inst_id: str) -> CaseThunk:
    case_id = f"{source}:{inst_id}"

    def thunk(workers: int) -> List[CaseResult]:
        if cfg.suite == "hhl_unitary_inverse":
            c = _channel(cfg, source)[1]
            p = inverse_unitary_channel(c)
        else:
            c, p = _pair(cfg, source)
        return runner(cfg, case_id, c, p, _instance(cfg, inst_id), workers)

    return case_id, thunk


def _population_thunk(cfg: ExperimentConfig, runner: HHLRunner, member: PopulationCase) -> CaseThunk:
    def thunk(workers: int) -> List[CaseResult]:
        c = make_c_channel(member.c)
        p = make_p_channel(member.p) if member.p is not None else inverse_unitary_channel(c)
        return runner(cfg, member.id, c, p, build_instance(member.instance), workers)

    return member.id, thunk


def _hhl_suite(cfg: ExperimentConfig) -> List[CaseThunk]:
    runner = _HHL_RUNNERS[cfg.suite]
    thunks = [_configured_thunk(cfg, runner, source, inst_id) for source, inst_id in cfg.hhl_cases()]
    population = hhl_population(cfg)
    if population:
        logger.debug("Suite %s: %d sampled case(s)", cfg.suite, len(population))
    thunks.extend(_population_thunk(cfg, runner, member) for member in population)
    return thunks


# Adversarial demonstration


def _adversarial_demo(cfg: ExperimentConfig) -> List[CaseThunk]:
    def run(workers: int) -> List[CaseResult]:
        spec = adversarial_preset(cfg.demo.thetas)
        c = make_c_channel(spec)
        plan = ShotPlan(cfg.plan.epsilon, cfg.plan.delta)
        eta = cfg.plan.eta if cfg.plan.eta is not None else 4.0 * cfg.plan.epsilon
        ta1 = run_protocol("TA1", c, plan, derive_seed(cfg.seed, "demo", "TA1"), workers=workers, eta=eta)
        ta2 = run_protocol("TA2", c, plan, derive_seed(cfg.seed, "demo", "TA2"), workers=workers, eta=eta)
        decision = decide_s3(ta1, ta2, eta, plan.epsilon)
        report = closeness_report(c)

        inst = build_instance(
            InstanceSpec(id="demo", n=spec.n, spectrum=cfg.demo.spectrum, b="uniform_eigen", function="identity")
        )
        ensemble = ensemble_fidelity(inst, c, qft_channel(spec.n), K=cfg.K[0], workers=workers)
        logger.info("Adversarial demo: TA1 %.3f, S3 %.6f, mean fidelity %.6f", ta1.estimate, report.s3,
                    ensemble.mean_value)
        return [
            _case("adversarial:TA1", [ta1], ta1.estimate, ta1.threshold, passed=ta1.accept,
                  description="Fourier-basis test accepts"),
            _case("adversarial:TA2", [ta2], ta2.estimate, ta2.threshold, passed=not ta2.accept,
                  description="phase test rejects"),
            _case("adversarial:decision", [], decision.certified_eta, passed=not decision.accepted,
                  description=decision.claim),
            _case("adversarial:closeness", [report], report.s3, report.s1, _etas(report),
                  passed=report.s3 < report.s1 - CHECK_TOL, description="S3 strictly below S1"),
            _case("adversarial:hhl", [ensemble], ensemble.mean_value, cfg.demo.max_fidelity, ensemble.etas,
                  passed=ensemble.mean_value < cfg.demo.max_fidelity,
                  description="mean HHL fidelity stays low"),
        ]

    return [("adversarial", run)]


_SUITES: Dict[str, Callable[[ExperimentConfig], List[CaseThunk]]] = {
    "closeness_audit": _closeness_audit,
    "protocol_calibration": _protocol_calibration,
    "theorem_s3": _theorem_s3,
    "hhl_perfect": _hhl_suite,
    "hhl_general": _hhl_suite,
    "hhl_unitary_inverse": _hhl_suite,
    "hhl_cp_mode": _hhl_suite,
    "adversarial_demo": _adversarial_demo,
}


def _guarded(label: str, thunk: Callable[[int], List[CaseResult]], workers: int) -> List[CaseResult]:
    try:
        return thunk(workers)
    except InternalConsistencyError:
        raise
    except QFTVerifyError as exc:
        logger.error("Case %s could not be evaluated: %s", label, exc, exc_info=True)
        return [CaseResult(case_id=label, description=f"error: {exc}", passed=False)]


def run_suite(cfg: ExperimentConfig, workers: Optional[int] = None) -> ReportRecord:
    workers = workers if workers is not None else get_settings().workers
    thunks = _SUITES[cfg.suite](cfg)
    logger.info("Running suite %s: %d case group(s), %d worker(s)", cfg.suite, len(thunks), workers)
    if workers > 1 and len(thunks) > 1:
        # One worker per case; cases get no inner parallelism.
        with ThreadPoolExecutor(max_workers=workers) as pool:
            groups = list(pool.map(lambda item: _guarded(item[0], item[1], 1), thunks))
    else:
        groups = [_guarded(label, thunk, workers) for label, thunk in thunks]

    cases = sorted((case for group in groups for case in group), key=lambda case: case.case_id)
    ids = [case.case_id for case in cases]
    if len(set(ids)) != len(ids):
        raise InternalConsistencyError(f"duplicate case ids in suite {cfg.suite}")
    passed = sum(case.passed for case in cases)
    summary = Summary(total=len(cases), passed=passed, failed=len(cases) - passed)
    logger.info("Suite %s finished: %d/%d cases passed", cfg.suite, passed, len(cases))
    return ReportRecord(
        suite=cfg.suite,
        timestamp=datetime.now(timezone.utc),
        config_hash=config_hash(cfg),
        cases=cases,
        summary=summary,
    )


__all__ = [
    "CHECK_TOL",
    "PopulationCase",
    "hhl_population",
    "population_specs",
    "run_suite",
]
