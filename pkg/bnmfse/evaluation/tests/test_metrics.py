import numpy
import pytest

from bnmfse.audio import AudioSignal
from bnmfse.constants import DB_CAP
from bnmfse.exceptions import DegenerateError, ShapeError
from ..metrics import bss_eval, segsnr, mix_at_snr, windowed_sdr, evaluate
from ..metrics import sdr_improvement


def orthogonal_pair(length=16000, seed=0):
    rng = numpy.random.default_rng(seed)
    s = rng.standard_normal(length)
    n = rng.standard_normal(length)
    n -= (n @ s) / (s @ s) * s
    n *= numpy.sqrt((s @ s) / (n @ n))
    return s, n


def test_bss_perfect():
    s, n = orthogonal_pair()
    sdr, sir, sar = bss_eval(s, s, n)
    assert sdr == sir == sar == DB_CAP


def test_bss_noise_estimate():
    s, n = orthogonal_pair()
    _, sir, _ = bss_eval(n, s, n)
    assert sir <= -20


def test_bss_twenty_db():
    s, n = orthogonal_pair()
    sdr, sir, sar = bss_eval(s + 0.1 * n, s, n)
    assert abs(sdr - 20) <= 0.1
    assert abs(sir - 20) <= 0.1
    assert sar == DB_CAP


def test_bss_artifacts():
    s, n = orthogonal_pair(seed=1)
    rng = numpy.random.default_rng(3)
    artif = rng.standard_normal(len(s))
    sdr, sir, sar = bss_eval(s + 0.3 * n + 0.3 * artif, s, n)
    assert sdr < sir
    assert sdr < sar


def test_bss_scale_invariant_sir():
    s, n = orthogonal_pair(seed=2)
    rng = numpy.random.default_rng(4)
    est = s + 0.5 * n + 0.1 * rng.standard_normal(len(s))
    _, sir1, _ = bss_eval(est, s, n)
    _, sir2, _ = bss_eval(3.7 * est, s, n)
    assert numpy.isclose(sir1, sir2, atol=1e-9)


def test_bss_zero_reference():
    s, n = orthogonal_pair()
    values = bss_eval(s, numpy.zeros_like(s), n)
    assert all(numpy.isnan(values))


def test_bss_lengths():
    with pytest.raises(ShapeError):
        bss_eval(numpy.ones(10), numpy.ones(10), numpy.ones(9))


def test_segsnr_identity():
    s, _ = orthogonal_pair()
    assert segsnr(s, s) == 30


def test_segsnr_equal_power():
    rng = numpy.random.default_rng(5)
    s = rng.standard_normal(256 * 40)
    # noise with exactly the energy of every frame of the reference
    noise = numpy.empty_like(s)
    for start in range(0, len(s), 256):
        block = rng.standard_normal(256)
        noise[start:start + 256] = block * numpy.linalg.norm(s[start:start + 256]) / numpy.linalg.norm(block)
    assert abs(segsnr(s + noise, s)) <= 0.2


def test_segsnr_low_clamp():
    s, n = orthogonal_pair()
    assert segsnr(s + 100 * n, s) == -10


def test_segsnr_silent():
    assert numpy.isnan(segsnr(numpy.ones(2048), numpy.zeros(2048)))


def test_segsnr_skips_silence():
    s, _ = orthogonal_pair()
    ref = numpy.concatenate([numpy.zeros(8192), s])
    assert segsnr(ref, ref) == 30


def test_mix_unit_gain():
    s, n = orthogonal_pair()
    noisy, scaled = mix_at_snr(AudioSignal(s), AudioSignal(n), 0.0)
    assert numpy.allclose(scaled.samples, n)
    assert numpy.allclose(noisy.samples, s + n)


@pytest.mark.parametrize("snr", [-5.0, 0.0, 10.0, 17.3])
def test_mix_exact(snr):
    rng = numpy.random.default_rng(6)
    s = AudioSignal(0.1 * rng.standard_normal(16000))
    n = AudioSignal(0.5 * rng.standard_normal(4000))
    noisy, scaled = mix_at_snr(s, n, snr)
    assert len(noisy) == len(s)
    measured = 10 * numpy.log10(numpy.mean(s.samples ** 2) / numpy.mean(scaled.samples ** 2))
    assert abs(measured - snr) <= 1e-6
    assert numpy.allclose(noisy.samples - s.samples, scaled.samples)


def test_mix_ten_db():
    s, n = orthogonal_pair()
    _, scaled = mix_at_snr(s, n, 10.0)
    ratio = numpy.mean(scaled.samples ** 2) / numpy.mean(s ** 2)
    assert abs(ratio - 0.1) <= 1e-9


def test_mix_zero_power():
    with pytest.raises(DegenerateError):
        mix_at_snr(numpy.zeros(100), numpy.ones(100), 0.0)
    with pytest.raises(DegenerateError):
        mix_at_snr(numpy.ones(100), numpy.zeros(100), 0.0)


def test_noisy_sdr_zero_db():
    s, n = orthogonal_pair()
    noisy, scaled = mix_at_snr(s, n, 0.0)
    sdr, _, _ = bss_eval(noisy, s, scaled)
    assert abs(sdr) <= 0.01


def test_windowed():
    s, n = orthogonal_pair(length=16000 * 12)
    windows = windowed_sdr(s + 0.1 * n, s, n, window=5.0)
    assert [idx for _, idx in windows] == [0, 1]
    assert all(abs(sdr - 20) < 0.2 for sdr, _ in windows)


def test_evaluate_report():
    s, n = orthogonal_pair(length=16000 * 6)
    report = evaluate(s + 0.1 * n, s, n, windows=True)
    assert not report.degenerate
    assert len(report.per_window) == 1
    assert set(report.as_dict()) == {'sdr_db', 'sir_db', 'sar_db', 'segsnr_db', 'degenerate'}

    report = evaluate(s, numpy.zeros_like(s), n)
    assert report.degenerate


def test_improvement():
    s, n = orthogonal_pair()
    assert numpy.isclose(sdr_improvement(s + 0.1 * n, s + n, s, n), 20, atol=0.1)
