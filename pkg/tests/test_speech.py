"""Speech-branch tests: encoder, predictor cascade, decoders, audio losses."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from fasttalker import dsp
from fasttalker.errors import FastTalkerError, PhonemeError, ShapeError
from fasttalker.nas.space import ModuleChoice
from fasttalker.numerics import Tensor, sum_
from fasttalker.rng import stream
from fasttalker.speech import Discriminator, MelDecoder, PhonemeEncoder, \
    PredictorCascade, WaveformDecoder, duration_loss, length_regulate, \
    loss_audio, lsgan_discriminator_loss, mse_loss, \
    multi_resolution_stft_loss
from fasttalker.speech.losses import stft_loss_single

from gradcheck import gradcheck, naive_dft_magnitude

BUS = 16


def small_choice(layers=2, channels=BUS, groups=1, kernel=3):
    return ModuleChoice(channels=channels, layers=layers, groups=groups,
                        kernel=kernel)


def make_encoder(layers=2, channels=BUS, seed=0):
    return PhonemeEncoder(16, small_choice(layers, channels),
                          stream(seed, "enc"))


class TestPhonemeEncoder:
    def test_single_token_shape(self):
        out = make_encoder().forward(np.array([3]))
        assert out.data.shape == (1, BUS)

    def test_causal_prefix_bitwise(self):
        enc = make_encoder()
        tokens = np.array([1, 5, 2, 9])
        full = enc.forward(tokens).data
        for last in (0, 7, 13):
            perturbed = tokens.copy()
            perturbed[-1] = last
            other = enc.forward(perturbed).data
            assert_array_equal(full[:3], other[:3])

    def test_token_out_of_vocab(self):
        with pytest.raises(PhonemeError):
            make_encoder().forward(np.array([99]))
        with pytest.raises(PhonemeError):
            make_encoder().forward(np.array([], dtype=np.int64))

    def test_zero_layers_is_linear(self):
        enc = make_encoder(layers=0)
        assert len(enc.blocks) == 0
        assert enc.proj is not None

    def test_param_count_closed_form(self):
        vocab, c, layers, groups, k = 16, 32, 4, 4, 3
        enc = PhonemeEncoder(vocab, ModuleChoice(c, layers, groups, k),
                             stream(1, "enc"))
        per_block = (2 * c + 4 * (c * c + c) + 2 * c
                     + 2 * (c * (c // groups) * k + c))
        expected = vocab * c + layers * per_block + 2 * c
        assert enc.param_count() == expected


class TestLengthRegulate:
    def test_example(self):
        f = Tensor(np.array([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]]))
        out = length_regulate(f, [2, 1, 3])
        assert_allclose(out.data[:, 0], [1, 1, 2, 3, 3, 3])

    def test_identity(self):
        f = Tensor(np.arange(8.0).reshape(4, 2))
        assert_array_equal(length_regulate(f, [1, 1, 1, 1]).data, f.data)

    def test_nonpositive_duration(self):
        f = Tensor(np.zeros((2, 3)))
        with pytest.raises(FastTalkerError):
            length_regulate(f, [1, 0])

    def test_gradient_sums_into_source(self):
        rng = np.random.default_rng(0)
        f = Tensor(rng.normal(size=(3, 4)), requires_grad=True)
        w = Tensor(rng.normal(size=(6, 4)))

        def fn():
            return sum_(length_regulate(f, [2, 1, 3]) * w)

        assert gradcheck(fn, [f]) < 1e-4


def make_cascade(seed=0, layers=(2, 2, 2)):
    return PredictorCascade(BUS, small_choice(layers[0]),
                            small_choice(layers[1]), small_choice(layers[2]),
                            dsp.NUM_PITCH_SCALES, stream(seed, "cas"))


class TestPredictorCascade:
    def test_shapes(self):
        cas = make_cascade()
        f_pho = Tensor(np.random.default_rng(0).normal(size=(4, BUS)))
        out = cas.forward(f_pho, [2, 1, 1, 3])
        assert out["d_hat"].data.shape == (4, 1)
        assert out["p_hat"].data.shape == (7, dsp.NUM_PITCH_SCALES)
        assert out["e_hat"].data.shape == (7, 1)
        assert out["f_d_frames"].data.shape == (7, BUS)
        assert out["m"] == 7

    def test_duration_loss_zero_residual(self):
        d = np.array([2, 5, 1])
        d_hat = Tensor(np.log(d)[:, None].astype(np.float64))
        assert float(duration_loss(d_hat, d).data) == 0.0

    def test_duration_loss_all_ones(self):
        # log of unit durations is zero, so a zeroed head is exact
        cas = make_cascade()
        cas.duration.head.w.data[:] = 0.0
        cas.duration.head.b.data[:] = 0.0
        f_pho = Tensor(np.random.default_rng(1).normal(size=(3, BUS)))
        out = cas.forward(f_pho, [1, 1, 1])
        assert float(duration_loss(out["d_hat"], [1, 1, 1]).data) == 0.0

    def test_cascade_order(self):
        # d feeds pitch: changing the duration trunk changes p_hat, not d_hat's input
        cas = make_cascade()
        f_pho = Tensor(np.random.default_rng(2).normal(size=(3, BUS)))
        base = cas.forward(f_pho, [1, 2, 1])
        cas.duration.trunk.in_proj.w.data[0, 0] += 0.5
        bumped = cas.forward(f_pho, [1, 2, 1])
        assert not np.allclose(base["p_hat"].data, bumped["p_hat"].data)
        assert not np.allclose(base["e_hat"].data, bumped["e_hat"].data)

    def test_pitch_feeds_energy_not_vice_versa(self):
        cas = make_cascade()
        f_pho = Tensor(np.random.default_rng(3).normal(size=(3, BUS)))
        base = cas.forward(f_pho, [1, 2, 1])
        cas.energy.trunk.in_proj.w.data[0, 0] += 0.5
        bumped = cas.forward(f_pho, [1, 2, 1])
        assert_array_equal(base["p_hat"].data, bumped["p_hat"].data)
        assert not np.allclose(base["e_hat"].data, bumped["e_hat"].data)

    def test_zero_layer_trunk_is_linear(self):
        cas = make_cascade(layers=(0, 0, 0))
        assert hasattr(cas.duration.trunk, "linear")
        assert len(cas.duration.trunk.units) == 0


class TestMelDecoder:
    def test_shape(self):
        dec = MelDecoder(3 * BUS, stream(0, "mel"))
        out = dec(Tensor(np.random.default_rng(0).normal(size=(10, 3 * BUS))))
        assert out.data.shape == (80, 10)

    def test_exact_prediction_zero_loss(self):
        target = np.random.default_rng(1).normal(size=(80, 6))
        assert float(mse_loss(Tensor(target.copy()), target).data) == 0.0


class TestWaveformDecoder:
    def test_two_frames_give_320_samples(self):
        dec = WaveformDecoder(3 * BUS, small_choice(layers=2), stream(0, "w"))
        out = dec(Tensor(np.zeros((2, 3 * BUS))))
        assert out.data.shape == (320,)

    def test_zero_final_layer_zero_waveform(self):
        dec = WaveformDecoder(3 * BUS, small_choice(layers=2), stream(1, "w"))
        dec.out_conv.w.data[:] = 0.0
        dec.out_conv.b.data[:] = 0.0
        out = dec(Tensor(np.random.default_rng(0).normal(size=(3, 3 * BUS))))
        assert_array_equal(out.data, np.zeros(480))

    def test_receptive_field_probe(self):
        # dilation cycle (1,2,4,8), kernel 3: the conv stack's forward
        # influence from frame t ends at frame t+30; the upsampler chain
        # (stride s, kernel 2s) maps frame f to samples up to
        # 8*(5*(4*f+7)+9)+15. Perturbing frame t must change nothing before
        # sample 160*t and nothing after the analytic bound.
        dec = WaveformDecoder(3 * BUS, small_choice(layers=4), stream(2, "w"))
        rng = np.random.default_rng(5)
        x = rng.normal(size=(40, 3 * BUS))
        base = dec(Tensor(x)).data
        t = 20
        xp = x.copy()
        xp[t] += 1.0
        bumped = dec(Tensor(xp)).data
        diff = np.nonzero(base != bumped)[0]
        assert diff.size > 0
        assert diff.min() == 160 * t
        last_frame = t + 30
        bound = 8 * (5 * (4 * last_frame + 7) + 9) + 15
        assert diff.max() <= bound

    def test_causal_prefix_bitwise(self):
        dec = WaveformDecoder(3 * BUS, small_choice(layers=2), stream(3, "w"))
        rng = np.random.default_rng(7)
        x = rng.normal(size=(6, 3 * BUS))
        base = dec(Tensor(x)).data
        xp = x.copy()
        xp[4:] += rng.normal(size=(2, 3 * BUS))
        bumped = dec(Tensor(xp)).data
        assert_array_equal(base[:4 * 160], bumped[:4 * 160])

    def test_zero_layers_keeps_upsampler(self):
        dec = WaveformDecoder(3 * BUS, small_choice(layers=0), stream(4, "w"))
        assert len(dec.blocks) == 0
        out = dec(Tensor(np.zeros((2, 3 * BUS))))
        assert out.data.shape == (320,)


class TestAudioLoss:
    def test_perfect_prediction_zero_loss(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=800) * 0.1
        s = rng.normal(size=(80, 5))
        terms = loss_audio(Tensor(a.copy()), a, Tensor(s.copy()), s)
        assert float(terms["total"].data) == 0.0

    def test_lsgan_optimum(self):
        loss = lsgan_discriminator_loss(Tensor(np.float64(1.0)),
                                        Tensor(np.float64(0.0)))
        assert float(loss.data) == 0.0

    def test_stft_loss_matches_direct_dft(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=600) * 0.3
        fft, hop = 512, 256
        got = float(stft_loss_single(Tensor(2.0 * x), x, fft, hop).data)

        window = dsp.hann_window(fft)
        n_frames = dsp.frame_count(600, hop)
        xp = np.pad(x, (0, (n_frames - 1) * hop + fft - 600))
        mg = np.stack([naive_dft_magnitude(
            xp[i * hop:i * hop + fft] * window) for i in range(n_frames)])
        mh = 2.0 * mg
        sc = np.linalg.norm(mh - mg) / np.linalg.norm(mg)
        l1 = np.abs(np.log(mh + 1e-7) - np.log(mg + 1e-7)).mean()
        assert_allclose(got, sc + l1, rtol=1e-7)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            multi_resolution_stft_loss(Tensor(np.zeros(320)), np.zeros(480))

    def test_stft_loss_gradient(self):
        rng = np.random.default_rng(9)
        a = Tensor(rng.normal(size=64) * 0.5, requires_grad=True)
        gt = rng.normal(size=64)

        def fn():
            return stft_loss_single(a, gt, 32, 16)

        assert gradcheck(fn, [a], rtol=1e-4) < 1e-4

    def test_discriminator_scalar_and_adversarial_term(self):
        disc = Discriminator(stream(0, "disc"))
        rng = np.random.default_rng(1)
        a = rng.normal(size=640) * 0.2
        score = disc(Tensor(a))
        assert score.data.shape == ()
        terms = loss_audio(Tensor(a.copy()), a,
                           Tensor(np.zeros((80, 4))), np.zeros((80, 4)),
                           discriminator=disc, adversarial_weight=0.1)
        expected = 0.1 * float(terms["adversarial"].data)
        assert_allclose(float(terms["total"].data), expected, atol=1e-12)
