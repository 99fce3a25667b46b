"""Feature-extraction tests pinned against slow direct-DFT oracles."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fasttalker import dsp
from fasttalker.errors import ShapeError
from fasttalker.numerics import Tensor, mul, sum_

from gradcheck import gradcheck, naive_dft_magnitude


class TestWindowsAndFraming:
    def test_hann_periodic(self):
        w = dsp.hann_window(8)
        assert w[0] == 0.0
        assert_allclose(w[4], 1.0)
        assert_allclose(w[1], w[7])

    def test_frame_count_ceil(self):
        assert dsp.frame_count(160, 160) == 1
        assert dsp.frame_count(161, 160) == 2
        assert dsp.frame_count(7 * 160, 160) == 7

    def test_exact_frames_per_hop_multiple(self):
        x = np.random.default_rng(0).normal(size=5 * 160)
        assert dsp.stft_magnitude(x, 512, 160).shape == (5, 257)
        assert dsp.stft_magnitude(x, 512, 160, win_length=320).shape == (5, 257)
        assert dsp.frame_energy(x).shape == (5,)


class TestEnergy:
    def test_sine_frame_matches_direct_dft(self):
        n = 512
        x = np.sin(2.0 * np.pi * 25.0 * np.arange(n) / n)
        windowed = x * dsp.hann_window(n)
        expected = np.linalg.norm(naive_dft_magnitude(windowed))
        got = dsp.frame_energy(x, win=512, hop=512)
        assert got.shape == (1,)
        assert_allclose(got[0], expected, rtol=1e-9)

    def test_silence_is_zero(self):
        assert_allclose(dsp.frame_energy(np.zeros(320)), 0.0)

    def test_energy_scales_linearly(self):
        x = np.random.default_rng(3).normal(size=640)
        assert_allclose(dsp.frame_energy(2.0 * x), 2.0 * dsp.frame_energy(x),
                        rtol=1e-12)


class TestStftTensor:
    def test_matches_numpy_path(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=700)
        for fft, hop, win in [(64, 32, None), (128, 64, 48), (512, 160, 320)]:
            ref = dsp.stft_magnitude(x, fft, hop, win_length=win)
            got = dsp.stft_magnitude_tensor(Tensor(x), fft, hop, win_length=win)
            assert_allclose(got.data, ref, atol=1e-12)

    def test_gradient(self):
        rng = np.random.default_rng(5)
        x = Tensor(rng.normal(size=40), requires_grad=True)
        proj = Tensor(rng.normal(size=(3, 9)))

        def fn():
            return sum_(mul(dsp.stft_magnitude_tensor(x, 16, 16), proj))

        assert gradcheck(fn, [x], rtol=1e-4) < 1e-4

    def test_rejects_2d(self):
        with pytest.raises(ShapeError):
            dsp.stft_magnitude(np.zeros((2, 3)), 16, 8)


class TestMel:
    def test_filterbank_shape_and_coverage(self):
        fb = dsp.mel_filterbank()
        assert fb.shape == (80, 257)
        assert fb.min() >= 0.0
        # every interior frequency bin is covered by at least one filter
        assert (fb.sum(axis=0)[1:-1] > 0.0).all()

    def test_log_mel_shape(self):
        x = np.random.default_rng(1).normal(size=12 * 160)
        s = dsp.log_mel_spectrogram(x)
        assert s.shape == (80, 12)
        assert np.isfinite(s).all()

    def test_log_mel_floor_on_silence(self):
        s = dsp.log_mel_spectrogram(np.zeros(320))
        assert_allclose(s, np.log(dsp.LOG_MEL_FLOOR))


class TestWavelet:
    def test_shapes(self):
        w = dsp.cwt(np.random.default_rng(2).normal(size=55))
        assert w.shape == (55, 10)

    def test_constant_track_has_zero_detail(self):
        w = dsp.cwt(np.full(200, 3.7))
        assert np.abs(w).max() < 1e-6

    def test_kernels_zero_mean_unit_norm(self):
        for psi in dsp.mexican_hat_bank():
            assert abs(psi.sum()) < 1e-12
            assert_allclose(np.linalg.norm(psi), 1.0)

    def test_round_trip_smooth_track(self):
        t = np.arange(400)
        x = (0.7 * np.sin(2 * np.pi * t / 40.0)
             + 0.3 * np.sin(2 * np.pi * t / 90.0 + 1.0) + 5.0)
        rec = dsp.icwt(dsp.cwt(x), dc=x.mean())
        assert np.linalg.norm(rec - x) / np.linalg.norm(x) < 0.05

    def test_round_trip_second_track(self):
        t = np.arange(300)
        x = 4.0 + 0.5 * np.sin(2 * np.pi * t / 25.0) + 0.2 * np.cos(
            2 * np.pi * t / 140.0)
        rec = dsp.icwt(dsp.cwt(x), dc=x.mean())
        assert np.linalg.norm(rec - x) / np.linalg.norm(x) < 0.05

    def test_pitch_spectrogram_is_cwt(self):
        x = np.log(np.linspace(100.0, 200.0, 64))
        assert_allclose(dsp.pitch_spectrogram(x), dsp.cwt(x))
