import math

import numpy as np
import pytest
from pydantic import ValidationError

from qftverify.exceptions import InvalidParameterError
from qftverify.models import InstanceSpec
from qftverify.services.channel import inverse_qft_channel, qft_channel
from qftverify.services.hhl import (
    build_instance,
    cp_lemma_value,
    ensemble_cp_mode,
    ensemble_expectation_error,
    ensemble_fidelity,
    ensemble_states,
    ensemble_unitary_inverse,
    expectation_bound,
    expectation_error,
    general_case_bound,
    good_set,
    good_set_decompose,
    instance_from_matrix,
    lemma_error_terms,
    make_function,
    perfect_case_bound,
    phase_amplitudes,
    postselected_expectation,
    random_observable,
    run_ideal,
    run_noisy,
    unitary_general_bound,
    unitary_perfect_bound,
)
from qftverify.services.noise import make_depolarized, make_diag_after
from qftverify.services.numerics import trace_distance


def test_single_eigenvalue_example():
    inst = instance_from_matrix(np.array([[0.25]]), [1.0], n=2)
    state = run_ideal(inst, 0).amplitudes
    expected = np.zeros(8, dtype=complex)
    expected[0] = 0.25
    expected[1] = math.sqrt(15) / 4
    assert np.allclose(state, expected, atol=1e-12)
    assert postselected_expectation(inst, run_ideal(inst, 0), np.eye(1)) == pytest.approx(1 / 16)


def test_ideal_output_leaves_phase_register_at_zero(rotated_instance):
    inst = rotated_instance
    beta = inst.beta
    fx = inst.f(inst.spectrum)
    for l in range(inst.N):
        amps = run_ideal(inst, l).amplitudes.reshape(inst.N, inst.d, 2)
        assert np.allclose(amps[1:], 0.0, atol=1e-10)
        expected_good = inst.eigvecs @ (beta * fx)
        assert np.allclose(amps[0, :, 0], expected_good, atol=1e-10)


def test_noisy_pipeline_with_exact_channels_matches_ideal(two_level_instance):
    inst = two_level_instance
    c, p = inverse_qft_channel(inst.n), qft_channel(inst.n)
    for l in range(inst.N):
        rho = run_noisy(inst, l, c, p)
        assert trace_distance(rho, run_ideal(inst, l).projector()) <= 1e-9


def test_exact_channels_give_unit_fidelity(two_level_instance):
    inst = two_level_instance
    result = ensemble_fidelity(inst, inverse_qft_channel(2), qft_channel(2))
    assert result.mean_fidelity == pytest.approx(1.0, abs=1e-12)
    assert result.bound == pytest.approx(1.0, abs=1e-12)
    assert result.passed
    assert result.perfect_case


def test_perfect_case_bound_holds_under_depolarizing(rotated_instance):
    inst = rotated_instance
    c = make_depolarized(0.05, 2)
    p = make_depolarized(0.03, 2, target="forward")
    states = ensemble_states(inst, c, p)
    result = ensemble_fidelity(inst, c, p, states=states)
    assert result.passed
    assert result.bound == pytest.approx(perfect_case_bound(result.etas["eta1"], result.etas["eta2"]))
    rng = np.random.default_rng(3)
    observables = [random_observable(inst.dim, rng) for _ in range(3)]
    for item in ensemble_expectation_error(inst, c, p, observables, states=states):
        assert item.passed
        assert item.bound == pytest.approx(expectation_bound(result.etas["eta1"], result.etas["eta2"]))


def test_expectation_error_needs_perfect_instance(off_grid_instance):
    inst = off_grid_instance
    m = np.eye(inst.dim)
    with pytest.raises(InvalidParameterError):
        ensemble_expectation_error(inst, inverse_qft_channel(3), qft_channel(3), [m])


def test_bound_formulas():
    assert perfect_case_bound(0.01, 0.04) == pytest.approx(0.7)
    assert expectation_bound(0.0, 0.0) == 0.0
    assert general_case_bound(0.0, 0.0, 4) < 0
    assert unitary_perfect_bound(0.02) == pytest.approx(0.4)
    assert unitary_general_bound(0.0, 9) == pytest.approx(2.0)
    with pytest.raises(InvalidParameterError):
        general_case_bound(0.0, 0.0, 1)


def test_general_case_reports_vacuous_bound(off_grid_instance):
    inst = off_grid_instance
    result = ensemble_fidelity(inst, inverse_qft_channel(3), qft_channel(3), K=4)
    assert not result.perfect_case
    assert result.K == 4
    assert result.bound < 0
    assert result.passed


def test_off_grid_spectrum_needs_a_width(off_grid_instance):
    inst = off_grid_instance
    c, p = inverse_qft_channel(3), qft_channel(3)
    with pytest.raises(InvalidParameterError, match="good-set width"):
        ensemble_fidelity(inst, c, p)
    with pytest.raises(InvalidParameterError):
        ensemble_unitary_inverse(inst, c)
    with pytest.raises(InvalidParameterError):
        ensemble_cp_mode(inst, c, p)


@pytest.mark.parametrize("K", [0, 1])
def test_off_grid_width_must_be_at_least_two(off_grid_instance, K):
    inst = off_grid_instance
    c, p = inverse_qft_channel(3), qft_channel(3)
    for run in (
        lambda: ensemble_fidelity(inst, c, p, K=K),
        lambda: ensemble_unitary_inverse(inst, c, K=K),
        lambda: ensemble_cp_mode(inst, c, p, K=K),
    ):
        with pytest.raises(InvalidParameterError, match="at least 2"):
            run()


def test_width_is_ignored_on_the_grid(two_level_instance):
    result = ensemble_fidelity(two_level_instance, inverse_qft_channel(2), qft_channel(2), K=1)
    assert result.K is None
    assert result.passed


def test_phase_amplitudes_and_good_sets(off_grid_instance):
    alpha = phase_amplitudes(0.25, 2)
    assert np.allclose(np.abs(alpha), [0, 1, 0, 0], atol=1e-12)
    assert good_set(0.25, 2, 2) == (0, 1, 2, 3)
    assert good_set(0.1, 3, 2) == (0, 1, 2, 7)
    for K in (2, 3):
        decomposition = good_set_decompose(off_grid_instance, K)
        assert np.all(decomposition.tail_mass <= decomposition.tail_bound + 1e-12)
        assert np.allclose(np.sum(np.abs(decomposition.alpha) ** 2, axis=1), 1.0)


def test_lemma_error_terms_within_bound(off_grid_instance):
    c = make_depolarized(0.1, 3)
    decomposition = good_set_decompose(off_grid_instance, 2)
    for alpha, good in zip(decomposition.alpha, decomposition.good_sets):
        value, bound = lemma_error_terms(c, alpha, good)
        assert value <= bound + 1e-9


def test_unitary_inverse_mode(two_level_instance):
    inst = two_level_instance
    exact = ensemble_unitary_inverse(inst, inverse_qft_channel(2))
    assert exact.mean_value == pytest.approx(0.0, abs=1e-12)
    noisy = ensemble_unitary_inverse(inst, make_diag_after([0.0, 0.2, -0.1, 0.3], 2))
    assert noisy.metric == "squared_trace_distance"
    assert noisy.passed


def test_cp_mode(two_level_instance):
    inst = two_level_instance
    c, p = inverse_qft_channel(2), qft_channel(2)
    assert cp_lemma_value(c, p) == pytest.approx(1.0)
    exact = ensemble_cp_mode(inst, c, p)
    assert exact.mean_value == pytest.approx(0.0, abs=1e-12)
    noisy_c = make_diag_after([0.0, 0.3, 0.1, -0.2], 2)
    result = ensemble_cp_mode(inst, noisy_c, p)
    assert result.passed
    assert result.checks["lemma_value"] >= result.checks["lemma_bound"] - 1e-9


def test_instance_validation():
    with pytest.raises(ValidationError):
        InstanceSpec(id="bad", n=2, spectrum=[0.3], perfect_case=True)
    with pytest.raises(ValidationError):
        InstanceSpec(id="bad", n=2, spectrum=[1.0])
    with pytest.raises(ValidationError):
        InstanceSpec(id="bad", n=2, spectrum=[0.25], b="random")
    with pytest.raises(InvalidParameterError):
        make_function("cube", 2)
    assert not build_instance(InstanceSpec(id="x", n=2, spectrum=[0.3])).perfect_case


def test_single_observable_expectation_error(two_level_instance):
    inst = two_level_instance
    c = make_depolarized(0.04, 2)
    p = make_depolarized(0.02, 2, target="forward")
    m = random_observable(inst.dim, np.random.default_rng(8))
    value, bound, passed = expectation_error(inst, c, p, m)
    assert 0.0 <= value <= bound + 1e-9
    assert passed
    assert expectation_error(inst, inverse_qft_channel(2), qft_channel(2), m)[0] == pytest.approx(0.0, abs=1e-12)
