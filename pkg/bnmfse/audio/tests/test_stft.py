
import numpy
import pytest

from bnmfse.exceptions import ContractError, ShapeError
from ..wavio import AudioSignal
from ..stft import stft, istft, quantize, dequantize, reference_gain
from ..stft import ComplexSpectrogram, analysis_window, frame_count


def test_shape():
    signal = AudioSignal(numpy.zeros(16000))
    spec = stft(signal)
    assert spec.shape == (257, (16000 - 512) // 256 + 1)
    assert spec.length == 16000
    assert numpy.all(spec.values == 0)


def test_too_short():
    with pytest.raises(ContractError):
        stft(AudioSignal(numpy.zeros(511)))


def test_frame_count():
    assert frame_count(511) == 0
    assert frame_count(512) == 1
    assert frame_count(767) == 1
    assert frame_count(768) == 2


def test_sinusoid_peak():
    time = numpy.arange(16000) / 16000.0
    signal = AudioSignal(0.5 * numpy.sin(2 * numpy.pi * 1000.0 * time))
    spec = stft(signal)
    assert numpy.all(numpy.argmax(numpy.abs(spec.values), axis=0) == 32)


def test_parseval():
    rng = numpy.random.default_rng(42)
    samples = rng.uniform(-1, 1, size=4096)
    spec = stft(AudioSignal(samples))
    win = analysis_window()
    for t in range(spec.nframes):
        frame = samples[t * 256:t * 256 + 512] * win
        energy = numpy.sum(frame ** 2)
        power = numpy.abs(spec.values[:, t]) ** 2
        weighted = (power[0] + 2 * power[1:-1].sum() + power[-1]) / 512
        assert abs(weighted - energy) <= 1e-9 * energy


@pytest.mark.parametrize("length", [2048, 5000, 16000])
def test_round_trip(length):
    rng = numpy.random.default_rng(length)
    samples = rng.standard_normal(length)
    back = istft(stft(AudioSignal(samples)))
    assert len(back) == length
    covered = frame_count(length) * 256 + 256
    interior = slice(512, covered - 512)
    error = numpy.abs(back.samples[interior] - samples[interior])
    assert error.max() <= 1e-10 * numpy.abs(samples[interior]).max()


def test_istft_zero():
    spec = ComplexSpectrogram(numpy.zeros((257, 10), dtype=complex), length=3000)
    back = istft(spec)
    assert len(back) == 3000
    assert numpy.all(back.samples == 0)


def test_istft_shape():
    spec = ComplexSpectrogram(numpy.zeros((100, 10), dtype=complex))
    with pytest.raises(ShapeError):
        istft(spec)


def test_replace_magnitudes_keeps_length():
    rng = numpy.random.default_rng(7)
    signal = AudioSignal(0.1 * rng.standard_normal(5000))
    mags = quantize(stft(signal))
    enhanced = istft(mags.with_magnitudes(mags.magnitudes / 2))
    assert len(enhanced) == len(signal)


def test_quantize_zero():
    spec = ComplexSpectrogram(numpy.zeros((257, 3), dtype=complex))
    mags = quantize(spec)
    assert mags.gain == 1
    assert numpy.all(mags.magnitudes == 0)


def test_quantize_gain():
    values = numpy.zeros((257, 2), dtype=complex)
    values[3, 1] = 2.5j
    values[4, 0] = 1.0
    mags = quantize(ComplexSpectrogram(values))
    assert mags.gain == 4000
    assert mags.magnitudes[3, 1] == 10000
    assert mags.magnitudes[4, 0] == 4000
    assert numpy.isclose(mags.phase[3, 1], numpy.pi / 2)


def test_quantize_error_bound():
    rng = numpy.random.default_rng(3)
    for _ in range(20):
        values = rng.standard_normal((257, 8)) + 1j * rng.standard_normal((257, 8))
        mags = quantize(ComplexSpectrogram(values), target_max=100)
        exact = numpy.abs(values)
        error = numpy.abs(dequantize(mags.magnitudes, mags.gain) - exact)
        assert error.max() / exact.max() <= 1 / (2 * 100) + 1e-12


def test_quantize_monotone():
    rng = numpy.random.default_rng(5)
    small = rng.uniform(0, 1, size=(257, 4))
    large = small + rng.uniform(0, 1, size=(257, 4))
    gain = 1234.5
    qs = quantize(ComplexSpectrogram(small.astype(complex)), gain=gain)
    ql = quantize(ComplexSpectrogram(large.astype(complex)), gain=gain)
    assert numpy.all(qs.magnitudes <= ql.magnitudes)


def test_quantize_target_max():
    spec = ComplexSpectrogram(numpy.ones((257, 1), dtype=complex))
    with pytest.raises(ContractError):
        quantize(spec, target_max=10)


def test_reference_gain():
    time = numpy.arange(8192) / 16000.0
    signal = AudioSignal(numpy.sin(2 * numpy.pi * 1000.0 * time))
    mags = quantize(stft(signal), gain=reference_gain())
    assert numpy.allclose(mags.magnitudes.max(axis=0), 10000, atol=1)


def test_istft_modified_edges():
    rng = numpy.random.default_rng(8)
    signal = AudioSignal(0.1 * rng.standard_normal(16000))
    spec = stft(signal)
    values = spec.values.copy()
    values[128:] = 0.0
    back = istft(ComplexSpectrogram(values, length=spec.length))
    peak = numpy.abs(signal.samples).max()
    covered = frame_count(16000) * 256 + 256
    assert numpy.abs(back.samples[:256]).max() <= peak
    assert numpy.abs(back.samples[covered - 256:covered]).max() <= peak
    assert numpy.abs(back.samples).max() <= peak
