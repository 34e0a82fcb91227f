import numpy
import pytest
from scipy.special import gammaln

from bnmfse.audio import AudioSignal
from bnmfse.audio.synth import speech_like, band_noise, concatenate
from bnmfse.evaluation import mix_at_snr, segsnr
from bnmfse.exceptions import ContractError, NumericalError, ShapeError
from bnmfse.nmf import GammaMatrix, BnmfModel
from bnmfse.tests.plugins import NOISE_BANDS
from ..hmm import HmmDenoiser, ForwardState, transition_matrix, forward_update
from ..hmm import state_likelihood, frame_posterior, mmse_state_estimate
from ..hmm import enhance_frame, start_state, enhance_file
from ..pipeline import EnhancementConfig, analyse
from ..priors import ActivationPriorState
from ..supervised import SupervisedProcessor, supervised_enhance


def small_model(nbins, num, seed, label='', peak=None):
    rng = numpy.random.default_rng(seed)
    mean = rng.uniform(0.01, 0.1, size=(nbins, num))
    if peak is not None:
        mean[peak] += 1.0
    return BnmfModel(GammaMatrix.from_mean(numpy.full(mean.shape, 50.0), mean),
                     0.5, label=label)


def test_transition_matrix():
    trans = transition_matrix(3)
    assert numpy.allclose(numpy.diag(trans), 0.99)
    assert numpy.allclose(trans[0, 1:], 0.005)
    assert numpy.allclose(trans.sum(axis=1), 1, atol=1e-12)
    assert numpy.array_equal(transition_matrix(1), [[1.0]])


def test_denoiser_validation():
    speech = small_model(6, 3, 0)
    noise = small_model(6, 2, 1)
    with pytest.raises(ContractError):
        HmmDenoiser(speech, (noise,), numpy.array([[0.5]]), numpy.array([1.0]))
    with pytest.raises(ShapeError):
        HmmDenoiser.create(speech, [small_model(7, 2, 1)])
    with pytest.raises(ContractError):
        HmmDenoiser.create(speech, [])
    denoiser = HmmDenoiser.create(speech, [noise, noise])
    assert numpy.allclose(denoiser.initial, 0.5)


def test_forward_single_state():
    state = ForwardState.start([1.0])
    for loglik in (-3.0, -1e4, 20.0):
        state = forward_update(state, [loglik], numpy.ones((1, 1)))
        assert numpy.array_equal(state.posterior, [1.0])


def test_forward_flat_evidence():
    trans = numpy.array([[0.8, 0.2], [0.3, 0.7]])
    state = ForwardState(numpy.array([0.5, 0.5]), numpy.array([0.3, 0.7]), 0.0, 1)
    new = forward_update(state, [-7.0, -7.0], trans)
    assert numpy.allclose(new.posterior, new.predictive, atol=1e-12)
    assert numpy.allclose(new.predictive, trans.T @ [0.3, 0.7])


def test_forward_first_frame_uses_initial():
    state = ForwardState.start([0.25, 0.75])
    new = forward_update(state, [0.0, 0.0], numpy.array([[0.0, 1.0], [1.0, 0.0]]))
    assert numpy.allclose(new.posterior, [0.25, 0.75])


def test_forward_two_states():
    # likelihood ratio 2:1 after a symmetric prediction
    trans = numpy.array([[0.9, 0.1], [0.1, 0.9]])
    state = ForwardState(numpy.array([0.5, 0.5]), numpy.array([0.5, 0.5]), 0.0, 1)
    new = forward_update(state, numpy.log([2.0, 1.0]), trans)
    assert numpy.allclose(new.posterior, [2 / 3, 1 / 3], atol=1e-4)


def test_forward_scale_invariant():
    trans = transition_matrix(3)
    state = ForwardState(numpy.full(3, 1 / 3), numpy.array([0.2, 0.5, 0.3]), 0.0, 4)
    logliks = numpy.array([-10.0, -12.5, -9.0])
    first = forward_update(state, logliks, trans)
    second = forward_update(state, logliks + 1234.5, trans)
    assert numpy.allclose(first.posterior, second.posterior, atol=1e-12)


def test_forward_all_zero():
    state = ForwardState.start([0.5, 0.5])
    with pytest.raises(NumericalError):
        forward_update(state, [-numpy.inf, -numpy.inf], transition_matrix(2))


def test_forward_long_sequence():
    rng = numpy.random.default_rng(0)
    trans = transition_matrix(3)
    state = ForwardState.start(numpy.full(3, 1 / 3))
    logliks = rng.uniform(-1e4, 0.0, size=(100000, 3))
    for values in logliks:
        state = forward_update(state, values, trans)
    assert numpy.all(numpy.isfinite(state.posterior))
    assert numpy.all(state.posterior >= 0)
    assert abs(state.posterior.sum() - 1) <= 1e-12
    assert abs(state.predictive.sum() - 1) <= 1e-12
    assert state.frames == 100000


def test_likelihood_zero_frame():
    speech = small_model(6, 3, 0)
    noise = small_model(6, 2, 1)
    prior = GammaMatrix.from_mean(numpy.full((5, 1), 0.5), 2.0)
    loglik, posterior = state_likelihood(numpy.zeros(6), noise, speech, prior)
    assert numpy.isclose(loglik, -posterior.reconstruction().sum())


def test_likelihood_oracle():
    rng = numpy.random.default_rng(2)
    speech = small_model(8, 3, 3)
    noise = small_model(8, 2, 4)
    for _ in range(10):
        y_t = rng.integers(0, 30, size=8).astype(float)
        prior = GammaMatrix.from_mean(numpy.full((5, 1), 0.7), 5.0)
        loglik, posterior = state_likelihood(y_t, noise, speech, prior)
        rates = posterior.reconstruction()[:, 0]
        expected = sum(y * numpy.log(lam) - lam - gammaln(y + 1)
                       for y, lam in zip(y_t, rates))
        assert abs(loglik - expected) <= 1e-9


def test_likelihood_mismatch():
    prior = GammaMatrix.from_mean(numpy.full((5, 1), 0.7), 5.0)
    with pytest.raises(ShapeError):
        state_likelihood(numpy.ones(6), small_model(7, 2, 1), small_model(6, 3, 0), prior)


def test_mmse_no_noise():
    speech = small_model(6, 3, 0)
    y_t = numpy.array([3.0, 0.0, 10.0, 7.0, 1.0, 2.0])
    prior = GammaMatrix.from_mean(numpy.full((3, 1), 0.5), 4.0)
    posterior = frame_posterior(y_t, speech.basis_posterior, prior)
    assert numpy.allclose(mmse_state_estimate(y_t, posterior, 3), y_t)


def test_mmse_symmetric():
    speech = small_model(6, 1, 0)
    basis = speech.basis_posterior.concat(speech.basis_posterior)
    y_t = numpy.array([3.0, 0.0, 10.0, 7.0, 1.0, 2.0])
    prior = GammaMatrix.from_mean(numpy.full((2, 1), 0.5), 4.0)
    posterior = frame_posterior(y_t, basis, prior)
    assert numpy.allclose(mmse_state_estimate(y_t, posterior, 1), y_t / 2)


def random_frames(nbins, count, seed):
    rng = numpy.random.default_rng(seed)
    return rng.poisson(rng.uniform(0, 50, size=nbins), size=(count, nbins)).astype(float)


def test_enhance_frame_contraction():
    speech = small_model(8, 3, 0)
    noises = [small_model(8, 2, s) for s in (1, 2, 3)]
    denoiser = HmmDenoiser.create(speech, noises)
    state = start_state(denoiser)
    for y_t in random_frames(8, 30, 5):
        s_hat, state, posterior = enhance_frame(denoiser, state, y_t, alpha=0.5)
        assert numpy.all(s_hat >= 0)
        assert numpy.all(s_hat <= y_t)
        assert abs(posterior.sum() - 1) <= 1e-12
        assert abs(state.forward.posterior.sum() - 1) <= 1e-12


def test_identical_states():
    speech = small_model(8, 3, 0)
    noise = small_model(8, 2, 1)
    denoiser = HmmDenoiser.create(speech, [noise, noise, noise])
    state = start_state(denoiser)
    for y_t in random_frames(8, 10, 6):
        _, state, smoothed = enhance_frame(denoiser, state, y_t)
        assert numpy.allclose(state.forward.posterior, state.forward.predictive, atol=1e-12)
        assert numpy.allclose(smoothed, 1 / 3)


def test_single_state_is_supervised():
    speech = small_model(8, 3, 0)
    noise = small_model(8, 2, 1)
    denoiser = HmmDenoiser.create(speech, [noise])
    processor = SupervisedProcessor(speech, noise)
    state = start_state(denoiser)
    for y_t in random_frames(8, 20, 7):
        s_hat, state, _ = enhance_frame(denoiser, state, y_t, alpha=0.7)
        assert numpy.array_equal(s_hat, processor.process(y_t, 0.7))


def test_dominant_state():
    speech = small_model(8, 3, 0)
    matched = small_model(8, 1, 1, peak=[6, 7])
    other = small_model(8, 1, 2, peak=[0, 1])
    y_t = numpy.array([1.0, 0.0, 2.0, 1.0, 0.0, 3.0, 4000.0, 5000.0])
    denoiser = HmmDenoiser.create(speech, [matched, other])
    s_hat, state, _ = enhance_frame(denoiser, start_state(denoiser), y_t, alpha=0.9)
    processor = SupervisedProcessor(speech, matched)
    expected = processor.process(y_t, 0.9)
    assert state.forward.posterior[1] < numpy.exp(-50)
    assert numpy.allclose(s_hat, expected, rtol=0, atol=1e-6)


def test_priors_per_state():
    speech = small_model(8, 3, 0)
    noises = [small_model(8, 2, 1), small_model(8, 4, 2)]
    denoiser = HmmDenoiser.create(speech, noises)
    state = start_state(denoiser)
    frames = random_frames(8, 2, 8)
    _, state, _ = enhance_frame(denoiser, state, frames[0], alpha=0.5)
    assert [len(p.theta) for p in state.priors] == [5, 7]
    assert all(isinstance(p, ActivationPriorState) for p in state.priors)
    previous = state.priors
    _, state, _ = enhance_frame(denoiser, state, frames[1], alpha=0.5)
    assert not numpy.array_equal(previous[0].theta, state.priors[0].theta)


def test_leading_silence_primes_priors():
    speech = small_model(8, 3, 0)
    denoiser = HmmDenoiser.create(speech, [small_model(8, 2, 1)])
    state = start_state(denoiser)
    _, state, _ = enhance_frame(denoiser, state, numpy.zeros(8), alpha=0.9)
    assert not state.priors[0].primed
    assert numpy.all(state.priors[0].theta == denoiser.config.theta_floor)
    _, state, _ = enhance_frame(denoiser, state, numpy.full(8, 500.0), alpha=0.9)
    assert state.priors[0].primed
    assert state.priors[0].theta.sum() > 100


def test_clean_frame_keeps_energy(speech_model, noise_models):
    speech = speech_like(3.0, seed=505)
    mags = analyse(speech, EnhancementConfig()).magnitudes
    y_t = mags[:, numpy.argmax(mags.sum(axis=0))]
    noise = noise_models['high']
    basis = speech_model.basis_posterior.concat(noise.basis_posterior)
    prior = ActivationPriorState.initial(
        y_t, 0.01, noise.activation_shape, speech_model.num_basis, noise.num_basis
    ).prior()
    posterior = frame_posterior(y_t, basis, prior)
    s_hat = mmse_state_estimate(y_t, posterior, speech_model.num_basis)
    assert numpy.sum(s_hat ** 2) >= 0.9 * numpy.sum(y_t ** 2)


def test_enhance_file_matches_supervised(speech_model, noise_models):
    speech = speech_like(2.0, seed=500)
    noise = band_noise(2.0, (2000.0, 4000.0), seed=501)
    noisy, _ = mix_at_snr(speech, noise, 5.0)
    denoiser = HmmDenoiser.create(speech_model, [noise_models['mid']])
    enhanced, trace, result = enhance_file(denoiser, noisy)
    expected, _ = supervised_enhance(noisy, speech_model, noise_models['mid'])
    assert len(enhanced) == len(noisy)
    assert numpy.array_equal(enhanced.samples, expected.samples)
    assert trace.shape == (1, result.nframes)
    assert numpy.allclose(trace, 1.0)


def test_enhance_file_contraction(speech_model, noise_models):
    speech = speech_like(2.0, seed=502)
    noise = band_noise(2.0, (100.0, 1000.0), seed=503)
    noisy, _ = mix_at_snr(speech, noise, 0.0)
    denoiser = HmmDenoiser.create(speech_model, list(noise_models.values()))
    enhanced, trace, result = enhance_file(denoiser, noisy)
    mags = analyse(noisy, denoiser.config).magnitudes
    assert numpy.all(result.magnitudes <= mags)
    assert len(enhanced) == len(noisy)
    assert trace.shape == (3, result.nframes)
    assert numpy.allclose(trace.sum(axis=0), 1.0, atol=1e-12)


def test_noise_suppression(speech_model, noise_models):
    noise = band_noise(3.0, (2000.0, 4000.0), seed=504)
    denoiser = HmmDenoiser.create(speech_model, [noise_models['mid']])
    enhanced, _, _ = enhance_file(denoiser, noise)
    assert numpy.sum(enhanced.samples ** 2) <= 0.1 * numpy.sum(noise.samples ** 2)


def test_clean_speech(speech_model, noise_models):
    speech = speech_like(3.0, seed=505)
    denoiser = HmmDenoiser.create(speech_model, [noise_models['high']])
    enhanced, _, _ = enhance_file(denoiser, speech)
    assert segsnr(enhanced, speech) >= 15


def test_classifier(speech_model, noise_models):
    labels = list(noise_models)
    speech = speech_like(9.0, seed=506)
    size = 3 * speech.sample_rate
    segments = []
    for idx, label in enumerate(labels):
        noise = band_noise(3.0, NOISE_BANDS[label], seed=600 + idx)
        part = AudioSignal(speech.samples[idx * size:(idx + 1) * size])
        noisy, _ = mix_at_snr(part, noise, 0.0)
        segments.append(noisy)
    noisy = concatenate(segments)

    denoiser = HmmDenoiser.create(speech_model, [noise_models[l] for l in labels])
    _, trace, _ = enhance_file(denoiser, noisy)
    hop = denoiser.config.hop
    burn_in = 40
    hits = total = 0
    for t in range(trace.shape[1]):
        start = t * hop
        end = start + denoiser.config.frame_len
        first, last = start // size, (end - 1) // size
        if first != last or (start - first * size) // hop < burn_in:
            continue
        total += 1
        hits += trace[first, t] >= 0.9
    assert total > 300
    assert hits >= 0.85 * total
