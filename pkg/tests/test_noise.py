import numpy as np
import pytest
from pydantic import ValidationError

from qftverify.exceptions import InvalidParameterError
from qftverify.models import NoiseSpec
from qftverify.services.channel import channels_equal, inverse_qft_channel, qft_channel, qft_matrix
from qftverify.services.noise import (
    adversarial_preset,
    build_channel,
    make_c_channel,
    make_depolarized,
    make_diag_after,
    make_mixed_unitary,
    make_p_channel,
    make_perturbed_unitary,
    random_thetas,
)
from qftverify.services.numerics import random_density


def test_depolarized_action(rng):
    p = 0.3
    c = make_depolarized(p, 2)
    f = qft_matrix(2)
    rho = random_density(4, rng).matrix
    expected = (1 - p) * f.conj().T @ rho @ f + p * np.eye(4) / 4
    assert np.allclose(c(rho), expected, atol=1e-12)
    assert c.rank <= 16


def test_depolarized_endpoints(rng):
    assert make_depolarized(0.0, 2).is_unitary
    assert channels_equal(make_depolarized(0.0, 2), inverse_qft_channel(2))
    full = make_depolarized(1.0, 2)
    assert np.allclose(full(random_density(4, rng).matrix), np.eye(4) / 4, atol=1e-12)
    with pytest.raises(InvalidParameterError):
        make_depolarized(1.5, 2)


def test_perturbed_unitary_is_seeded():
    a = make_perturbed_unitary(0.2, 2, seed=3)
    b = make_perturbed_unitary(0.2, 2, seed=3)
    other = make_perturbed_unitary(0.2, 2, seed=4)
    assert np.array_equal(a.kraus_ops, b.kraus_ops)
    assert not channels_equal(a, other)
    assert channels_equal(make_perturbed_unitary(0.0, 2, seed=3), inverse_qft_channel(2))


def test_mixed_unitary_rank_is_bounded_by_terms():
    c = make_mixed_unitary(0.5, 2, seed=1, terms=3)
    assert 1 <= c.rank <= 3
    assert make_mixed_unitary(0.5, 2, seed=1, terms=1).is_unitary


def test_diag_after_applies_phases_to_the_output():
    thetas = [0.0, np.pi / 2, np.pi, 0.1]
    c = make_diag_after(thetas, 2)
    assert np.allclose(c.kraus_ops[0], np.diag(np.exp(1j * np.array(thetas))) @ qft_matrix(2).conj().T)


def test_random_thetas_are_reproducible_and_bounded():
    a = random_thetas(3, 0.4, seed=8)
    assert np.array_equal(a, random_thetas(3, 0.4, seed=8))
    assert a.shape == (8,)
    assert np.all(np.abs(a) <= 0.4)


def test_targets_dispatch():
    spec = NoiseSpec(kind="exact", n=2, target="forward")
    assert channels_equal(build_channel(spec), qft_channel(2))
    assert channels_equal(make_c_channel(spec), inverse_qft_channel(2))
    assert channels_equal(make_p_channel(spec), qft_channel(2))


def test_seeded_kinds_need_a_seed():
    with pytest.raises(InvalidParameterError):
        make_c_channel(NoiseSpec(kind="perturbed_unitary", n=2, eps=0.1))


def test_spec_validation():
    with pytest.raises(ValidationError):
        NoiseSpec(kind="depolarized", n=2)
    with pytest.raises(ValidationError):
        NoiseSpec(kind="diag_after", n=2, thetas=[0.0, 1.0])
    with pytest.raises(ValidationError):
        NoiseSpec(kind="exact", n=12)
    assert NoiseSpec(kind="depolarized", n=2, p=0.0).is_unitary
    assert not NoiseSpec(kind="mixed_unitary", n=2, eps=0.1).is_unitary


def test_adversarial_preset():
    spec = adversarial_preset()
    assert spec.n == 2
    assert spec.kind == "diag_after"
    assert spec.thetas == [0.0, np.pi, 0.0, np.pi]
    assert adversarial_preset([0.0] * 8).n == 3
