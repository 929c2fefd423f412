import math

import numpy as np
import pytest

from qftverify.exceptions import InvalidParameterError
from qftverify.services.channel import identity_channel, inverse_qft_channel, qft_channel
from qftverify.services.closeness import (
    closeness_report,
    cp_trace_measure,
    derived_channel_bounds,
    max_offdiag_leakage,
    offdiag_leakage,
    orthobasis_measure,
    phase_coherence,
    s1_from_unitary_fidelity,
    s1_measure,
    s2_measure,
    s3_direct,
    s3_measure,
    t1_measure,
    t2_measure,
    t3_direct,
    t3_measure,
)
from qftverify.services.noise import make_depolarized, make_diag_after, make_diag_before, random_thetas
from qftverify.services.numerics import random_unitary


@pytest.mark.parametrize("n", [1, 2, 3])
def test_exact_channels_score_one(n):
    c, p = inverse_qft_channel(n), qft_channel(n)
    assert s1_measure(c) == pytest.approx(1.0)
    assert s2_measure(c) == pytest.approx(1.0)
    assert s3_measure(c) == pytest.approx(1.0)
    assert t1_measure(p) == pytest.approx(1.0)
    assert t2_measure(p) == pytest.approx(1.0)
    assert t3_measure(p) == pytest.approx(1.0)
    assert cp_trace_measure(c, p) == pytest.approx(1.0)


def test_depolarized_closed_forms():
    c = make_depolarized(0.1, 2)
    assert s3_measure(c) == pytest.approx(0.90625, abs=1e-12)
    assert s1_measure(c) == pytest.approx(0.925, abs=1e-12)
    p = make_depolarized(0.1, 2, target="forward")
    assert t3_measure(p) == pytest.approx(0.90625, abs=1e-12)


def test_alternating_phases_pass_s1_only():
    c = make_diag_after([0.0, math.pi, 0.0, math.pi], 2)
    assert s1_measure(c) == pytest.approx(1.0, abs=1e-12)
    assert s2_measure(c) == pytest.approx(0.0, abs=1e-12)
    assert s3_measure(c) == pytest.approx(0.0, abs=1e-12)


def test_single_flipped_phase():
    c = make_diag_after([0.0, 0.0, 0.0, math.pi], 2)
    assert s3_measure(c) == pytest.approx(0.25, abs=1e-12)


def test_identity_channel_s2():
    assert s2_measure(identity_channel(8)) == pytest.approx(1 / 8)


def test_dual_routes_agree(make_channel):
    for c in (
        make_channel("mixed_unitary", n=3, eps=0.5, seed=2, terms=4),
        make_channel("depolarized", n=3, p=0.4),
        make_channel("diag_before", n=2, theta_scale=1.0, seed=12),
    ):
        assert s3_measure(c) == pytest.approx(s3_direct(c), abs=1e-9)
    p = make_channel("perturbed_unitary", n=3, eps=0.3, seed=5, target="forward")
    assert t3_measure(p) == pytest.approx(t3_direct(p), abs=1e-9)


def test_leakage_bounded_by_eta_s1(make_channel):
    c = make_channel("mixed_unitary", n=3, eps=0.6, seed=21, terms=2)
    eta_s1 = 1.0 - s1_measure(c)
    for k in range(1, 8):
        assert offdiag_leakage(c, k) <= eta_s1 + 1e-12
    assert max_offdiag_leakage(c) <= eta_s1 + 1e-12
    with pytest.raises(InvalidParameterError):
        offdiag_leakage(c, 8)


def test_orthobasis_measure_equals_s3(make_channel, rng):
    c = make_channel("depolarized", n=2, p=0.35)
    for _ in range(20):
        basis = random_unitary(4, rng)
        assert orthobasis_measure(c, basis) == pytest.approx(s3_measure(c), abs=1e-9)


def test_phase_coherence_values():
    assert phase_coherence([1, 1]) == pytest.approx((1.0, 1.0))
    assert phase_coherence([1, -1]) == pytest.approx((0.0, 0.0))
    with pytest.raises(InvalidParameterError):
        phase_coherence([2.0])
    with pytest.raises(InvalidParameterError):
        phase_coherence([])


def test_phase_coherence_cosine_average(rng):
    for _ in range(1000):
        mags = rng.uniform(0.0, 1.0, size=8)
        phases = rng.normal(0.0, 0.3, size=8)
        mean_sq, cos_avg = phase_coherence(mags * np.exp(1j * phases))
        eta = 1.0 - mean_sq
        assert cos_avg >= 1.0 - 2.0 * eta - 1e-12


def test_unitary_s1_identity(make_channel):
    c = make_channel("perturbed_unitary", n=3, eps=0.4, seed=17)
    assert s1_from_unitary_fidelity(c) == pytest.approx(1.0 - s1_measure(c), abs=1e-12)


def test_derived_bounds():
    assert derived_channel_bounds(0.0, 0.0, 0.0) == {"t1_c3": 0.0, "t2_c3": 0.0, "t3_c3": 0.0}
    bounds = derived_channel_bounds(0.01, 0.04)
    assert set(bounds) == {"t1_c3", "t2_c3"}
    assert bounds["t1_c3"] == pytest.approx(0.1 + math.sqrt(0.3))
    with pytest.raises(InvalidParameterError):
        derived_channel_bounds(-0.1, 0.0)


def test_closeness_report_sides(make_channel):
    c = make_depolarized(0.1, 2)
    report = closeness_report(c)
    assert report.eta_s3 == pytest.approx(1 - 0.90625)
    assert report.t1 is None
    assert report.max_leakage is not None
    both = closeness_report(inverse_qft_channel(2), qft_channel(2))
    assert both.cp_trace == pytest.approx(1.0)
    assert both.eta_t3 == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InvalidParameterError):
        closeness_report(None)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_phases_on_the_unmeasured_side_are_invisible(n):
    for seed in range(50):
        thetas = random_thetas(n, math.pi, seed=1000 * n + seed)
        assert s1_measure(make_diag_after(thetas, n)) == pytest.approx(1.0, abs=1e-12)
        assert s2_measure(make_diag_before(thetas, n)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_s3_decreases_with_depolarizing_weight(n):
    values = [s3_measure(make_depolarized(p, n)) for p in np.linspace(0.0, 1.0, 21)]
    assert values[0] == pytest.approx(1.0)
    assert values[-1] == pytest.approx(1.0 / 4 ** n, abs=1e-12)
    assert all(later <= earlier + 1e-12 for earlier, later in zip(values, values[1:]))
