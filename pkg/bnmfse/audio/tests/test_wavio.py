
import numpy
import pytest
from scipy.io import wavfile

from bnmfse.exceptions import FormatError, SampleRateError
from ..wavio import AudioSignal, read_wav, write_wav


def test_read_silence(tmp_path):
    path = tmp_path / 'silence.wav'
    wavfile.write(path, 16000, numpy.zeros(16000, dtype='int16'))
    signal = read_wav(path)
    assert len(signal) == 16000
    assert signal.sample_rate == 16000
    assert numpy.all(signal.samples == 0)


def test_read_full_scale(tmp_path):
    path = tmp_path / 'full.wav'
    wavfile.write(path, 16000, numpy.full(100, 32767, dtype='int16'))
    signal = read_wav(path)
    assert numpy.allclose(signal.samples, 1.0, atol=2.0 ** -15)


def test_read_stereo(tmp_path):
    path = tmp_path / 'stereo.wav'
    wavfile.write(path, 16000, numpy.zeros((100, 2), dtype='int16'))
    with pytest.raises(FormatError):
        read_wav(path)


@pytest.mark.parametrize("dtype", ['float32', 'int32', 'uint8'])
def test_read_encoding(tmp_path, dtype):
    path = tmp_path / 'enc.wav'
    wavfile.write(path, 16000, numpy.zeros(100, dtype=dtype))
    with pytest.raises(FormatError):
        read_wav(path)


def test_read_rate(tmp_path):
    path = tmp_path / 'rate.wav'
    wavfile.write(path, 8000, numpy.zeros(100, dtype='int16'))
    with pytest.raises(SampleRateError):
        read_wav(path)


def test_read_garbage(tmp_path):
    path = tmp_path / 'garbage.wav'
    path.write_bytes(b'this is not a riff file')
    with pytest.raises(FormatError):
        read_wav(path)


def test_round_trip(tmp_path):
    rng = numpy.random.default_rng(1234)
    samples = rng.uniform(-1, 1, size=5000)
    path = tmp_path / 'random.wav'
    write_wav(path, AudioSignal(samples))
    back = read_wav(path)
    assert numpy.max(numpy.abs(back.samples - samples)) <= 2.0 ** -15


def test_write_clipping(tmp_path, caplog):
    path = tmp_path / 'clip.wav'
    write_wav(path, AudioSignal(numpy.array([1.5, -1.5, 0.0])))
    back = read_wav(path)
    assert numpy.allclose(back.samples, [1.0, -1.0, 0.0], atol=2.0 ** -15)
    assert 'clipped' in caplog.text


def test_write_empty(tmp_path):
    path = tmp_path / 'empty.wav'
    write_wav(path, AudioSignal(numpy.zeros(0)))
    back = read_wav(path)
    assert len(back) == 0


def test_signal_not_finite():
    with pytest.raises(ValueError):
        AudioSignal(numpy.array([0.0, numpy.nan]))
