import numpy as np
import pytest

from qftverify.exceptions import InvalidParameterError, NotUnitaryError
from qftverify.services.channel import inverse_qft_channel, qft_channel
from qftverify.services.closeness import s1_measure, s2_measure, t1_measure, t2_measure
from qftverify.services.noise import adversarial_preset, make_c_channel, make_depolarized
from qftverify.services.verify import (
    ShotPlan,
    calibrate,
    decide_s3,
    derive_seed,
    run_cp_test,
    run_protocol,
    run_ta1,
    run_ta2,
    run_tp1,
    run_tp2,
    shot_uniforms,
    shots_needed,
    success_probability,
)


def test_shots_needed_values():
    assert shots_needed(0.1, 0.05) == 185
    assert shots_needed(0.5, 0.5) == 3
    with pytest.raises(InvalidParameterError):
        shots_needed(0.0, 0.1)
    with pytest.raises(InvalidParameterError):
        shots_needed(0.1, 1.0)


def test_shot_plan_defaults_and_minimum():
    assert ShotPlan(0.1, 0.05).shots == 185
    assert ShotPlan(0.1, 0.05, shots=400).shots == 400
    with pytest.raises(InvalidParameterError):
        ShotPlan(0.1, 0.05, shots=100)


def test_derive_seed_is_stable_and_named():
    assert derive_seed(1, "case", "a") == derive_seed(1, "case", "a")
    assert derive_seed(1, "case", "a") != derive_seed(1, "case", "b")
    assert derive_seed(1, "case") != derive_seed(2, "case")
    assert 0 <= derive_seed(5, "x") < 2 ** 64


def test_shot_uniforms_are_position_addressed():
    full = shot_uniforms(77, 0, 12)
    assert full.shape == (12, 2)
    for start in (1, 2, 5):
        assert np.array_equal(shot_uniforms(77, start, 12 - start), full[start:])


def test_exact_channels_always_succeed():
    plan = ShotPlan(0.1, 0.05)
    c, p = inverse_qft_channel(3), qft_channel(3)
    for result in (
        run_ta1(c, plan, seed=1),
        run_ta2(c, plan, seed=2),
        run_tp1(p, plan, seed=3),
        run_tp2(p, plan, seed=4),
        run_cp_test(c, p, plan, seed=5),
    ):
        assert result.estimate == 1.0
        assert result.accept
        assert result.shots_used == 185
    assert run_cp_test(c, p, plan, seed=5).cp_trace == pytest.approx(1.0)


def test_adversarial_channel_fools_ta1_only():
    c = make_c_channel(adversarial_preset())
    plan = ShotPlan(0.05, 0.05)
    ta1 = run_ta1(c, plan, seed=10, eta=0.2)
    ta2 = run_ta2(c, plan, seed=11, eta=0.2)
    assert ta1.estimate == 1.0
    assert ta2.estimate == 0.0
    decision = decide_s3(ta1, ta2, eta=0.2, epsilon=0.05)
    assert not decision.accepted
    assert decision.certified_eta == pytest.approx(0.1)


def test_success_probability_matches_measures(make_channel):
    c = make_depolarized(0.3, 3)
    assert success_probability("TA1", c) == pytest.approx(s1_measure(c), abs=1e-12)
    assert success_probability("TA2", c) == pytest.approx(s2_measure(c), abs=1e-12)
    p = make_channel("mixed_unitary", n=3, eps=0.4, seed=3, target="forward")
    assert success_probability("TP1", p) == pytest.approx(t1_measure(p), abs=1e-12)
    assert success_probability("TP2", p) == pytest.approx(t2_measure(p), abs=1e-12)


def test_worker_count_does_not_change_counts():
    c = make_depolarized(0.4, 2)
    plan = ShotPlan(0.1, 0.05, shots=3001)
    single = run_protocol("TA1", c, plan, seed=99, workers=1)
    split = run_protocol("TA1", c, plan, seed=99, workers=4)
    assert single.successes == split.successes
    assert 0 < single.successes < plan.shots


def test_cp_needs_unitary_channels():
    plan = ShotPlan(0.1, 0.05)
    with pytest.raises(NotUnitaryError):
        run_cp_test(make_depolarized(0.2, 2), qft_channel(2), plan, seed=1)
    with pytest.raises(InvalidParameterError):
        run_protocol("CP", inverse_qft_channel(2), plan, seed=1)
    with pytest.raises(InvalidParameterError):
        run_protocol("TX", inverse_qft_channel(2), plan, seed=1)


def test_decide_s3_accepts_exact_channel():
    plan = ShotPlan(0.02, 0.05)
    c = inverse_qft_channel(2)
    decision = decide_s3(run_ta1(c, plan, seed=1), run_ta2(c, plan, seed=2), eta=0.1, epsilon=0.02)
    assert decision.accepted
    assert decision.certified_eta == pytest.approx(0.24)
    assert "in S3" in decision.claim


def test_decide_s3_needs_small_epsilon():
    plan = ShotPlan(0.05, 0.05)
    c = inverse_qft_channel(2)
    ta1, ta2 = run_ta1(c, plan, seed=1), run_ta2(c, plan, seed=2)
    with pytest.raises(InvalidParameterError):
        decide_s3(ta1, ta2, eta=0.1, epsilon=0.05)


def test_calibration_stays_within_allowance():
    c = make_depolarized(0.2, 2)
    result = calibrate("TA2", c, ShotPlan(0.05, 0.05), seed=4, reruns=40)
    assert result.reruns == 40
    assert result.exact == pytest.approx(s2_measure(c), abs=1e-12)
    assert result.allowance == pytest.approx(0.05 + 3 * np.sqrt(0.05 * 0.95 / 40))
    assert result.passed
