
import numpy

from ..synth import speech_like, harmonic_noise, band_noise
from ..synth import switching_harmonic_noise, speech_corpus, concatenate
from ..stft import stft


def test_speech_like_deterministic():
    first = speech_like(2.0, seed=11)
    second = speech_like(2.0, seed=11)
    other = speech_like(2.0, seed=12)
    assert len(first) == 32000
    assert numpy.array_equal(first.samples, second.samples)
    assert not numpy.array_equal(first.samples, other.samples)


def test_speech_like_range():
    signal = speech_like(3.0, seed=2)
    assert numpy.abs(signal.samples).max() < 1.0
    assert 0 < numpy.sqrt(numpy.mean(signal.samples ** 2)) <= 0.1 + 1e-12


def test_speech_like_band_limited():
    signal = speech_like(2.0, seed=3)
    power = (numpy.abs(stft(signal).values) ** 2).sum(axis=1)
    # bins above 4.5 kHz hold little energy
    assert power[144:].sum() < 0.01 * power.sum()


def test_harmonic_noise_peaks():
    noise = harmonic_noise(1.0, [1500.0, 3000.0])
    mags = numpy.abs(stft(noise).values)
    peaks = numpy.sort(numpy.argsort(mags[:, 5])[-2:])
    assert list(peaks) == [48, 96]


def test_switching_noise():
    noise = switching_harmonic_noise(2.0, [1500.0], [2250.0], 1.0)
    mags = numpy.abs(stft(noise).values)
    assert numpy.argmax(mags[:, 10]) == 48
    assert numpy.argmax(mags[:, -10]) == 72


def test_band_noise_support():
    noise = band_noise(2.0, (2000.0, 4000.0), seed=5)
    power = (numpy.abs(stft(noise).values) ** 2).sum(axis=1)
    freqs = numpy.arange(257) * 16000.0 / 512
    inside = (freqs >= 1000) & (freqs <= 5000)
    assert power[inside].sum() > 0.98 * power.sum()


def test_corpus():
    corpus = speech_corpus(3, 1.0, seed=1)
    assert len(corpus) == 3
    joined = concatenate(corpus)
    assert len(joined) == 48000
