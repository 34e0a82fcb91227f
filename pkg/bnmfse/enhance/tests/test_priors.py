import numpy
import pytest

from bnmfse.exceptions import ContractError, ShapeError
from ..priors import ActivationPriorState, update_activation_prior, alpha_for_snr


def make_state(theta, alpha):
    return ActivationPriorState(numpy.atleast_1d(theta).astype(float), 1.0, alpha)


def test_alpha_one_constant():
    state = make_state([2.0, 5.0], 1.0)
    for means in ([4.0, 1.0], [100.0, 0.5]):
        state = update_activation_prior(state, means)
    assert numpy.array_equal(state.theta, [2.0, 5.0])


def test_alpha_zero_follows():
    state = make_state([2.0, 5.0], 0.0)
    state = update_activation_prior(state, [4.0, 1.0])
    assert numpy.array_equal(state.theta, [4.0, 1.0])


def test_alpha_half():
    state = update_activation_prior(make_state(2.0, 0.5), [4.0])
    assert state.theta[0] == 3.0


def test_convex():
    rng = numpy.random.default_rng(0)
    for _ in range(100):
        theta = rng.uniform(0.1, 10, size=5)
        means = rng.uniform(0.1, 10, size=5)
        state = update_activation_prior(make_state(theta, rng.uniform()), means)
        assert numpy.all(state.theta >= numpy.minimum(theta, means) - 1e-12)
        assert numpy.all(state.theta <= numpy.maximum(theta, means) + 1e-12)


def test_prior_mean():
    state = ActivationPriorState([2.0, 8.0], [0.01, 0.5], 0.9)
    prior = state.prior()
    assert prior.dims == (2, 1)
    assert numpy.allclose(prior.mean[:, 0], [2.0, 8.0])
    assert numpy.allclose(prior.shape[:, 0], [0.01, 0.5])


def test_initial():
    state = ActivationPriorState.initial(numpy.full(10, 3.0), 0.01, 0.2, 4, 2)
    assert numpy.allclose(state.theta, 5.0)
    assert state.phi_speech == 0.01
    assert state.phi_noise == 0.2
    assert len(state.phi) == 6


def test_initial_silent_frame():
    state = ActivationPriorState.initial(numpy.zeros(10), 0.01, 0.2, 4, 2, floor=1.0)
    assert numpy.all(state.theta == 1.0)
    assert not state.primed
    assert ActivationPriorState.initial(numpy.ones(10), 0.01, 0.2, 4, 2).primed


def test_initial_from_basis():
    basis = numpy.array([[0.9, 0.1], [0.1, 0.9]])
    state = ActivationPriorState.initial([46.0, 54.0], 0.01, 0.2, 1, 1,
                                         basis=basis, iterations=500)
    assert numpy.allclose(state.theta, [45.0, 55.0], rtol=1e-3)
    with pytest.raises(ShapeError):
        ActivationPriorState.initial([1.0, 2.0, 3.0], 0.01, 0.2, 1, 1, basis=basis)


def test_floor_kept():
    state = ActivationPriorState(numpy.array([5.0, 5.0]), 1.0, 0.0, floor=2.0)
    state = update_activation_prior(state, [0.0, 9.0])
    assert numpy.array_equal(state.theta, [2.0, 9.0])


def test_invalid():
    with pytest.raises(ContractError):
        ActivationPriorState([1.0], 1.0, 1.5)
    with pytest.raises(ContractError):
        ActivationPriorState([0.0], 1.0, 0.5)


def test_alpha_endpoints():
    assert alpha_for_snr(-10.0) == 0.98
    assert alpha_for_snr(-5.0) == 0.98
    assert alpha_for_snr(15.0) == 0.1
    assert alpha_for_snr(20.0) == 0.1
    assert numpy.isclose(alpha_for_snr(5.0), 0.54)


def test_alpha_monotone():
    grid = numpy.arange(-20.0, 40.0, 0.1)
    values = numpy.array([alpha_for_snr(s) for s in grid])
    assert numpy.all(numpy.diff(values) <= 0)
    assert numpy.all((values >= 0) & (values <= 1))


def test_alpha_not_finite():
    with pytest.raises(ContractError):
        alpha_for_snr(float('nan'))
