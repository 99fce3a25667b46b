"""End-to-end model tests: parameter accounting, loss wiring, causality,
inference duration rule, and a short optimization run."""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from fasttalker.frontend import PhonemeSequence, gesture_frame_count, \
    gesture_source_frames, synth_corpus
from fasttalker.model import FastTalker, count_params_analytic
from fasttalker.nas.space import ArchitectureConfig, ModuleChoice, \
    SearchSpace, searched_preset
from fasttalker.numerics import Adam
from fasttalker.rng import stream

LOSS_KEYS = ("duration", "pitch", "energy", "audio", "gesture")


def tiny_config(bus=16):
    def mc(layers):
        return ModuleChoice(channels=bus, layers=layers, groups=1, kernel=3)

    return ArchitectureConfig(choices=(
        mc(2), mc(2), mc(0), mc(2), mc(0), mc(2), mc(2)))


def make_sequence(tokens, words):
    return PhonemeSequence(tokens=tuple(tokens), source_words=tuple(words))


class TestParameterAccounting:
    def test_searched_preset_count(self):
        config = searched_preset()
        model = FastTalker(config, seed=1)
        analytic = count_params_analytic(config)
        assert model.param_count() == analytic == 5156576

    def test_random_configs_match_analytic(self):
        space = SearchSpace()
        rng = np.random.default_rng(0)
        for _ in range(3):
            indices = rng.integers(0, 4, size=space.decode_length)
            config = space.config_from_indices(indices.tolist())
            model = FastTalker(config, seed=0)
            assert model.param_count() == count_params_analytic(config)

    def test_frozen_parts_are_not_parameters(self):
        model = FastTalker(tiny_config(), seed=0)
        names = [n for n, _ in model.named_parameters()]
        assert not any("codebook" in n or "pose_decoder" in n for n in names)
        assert not model.codebook.flags.writeable


@pytest.fixture(scope="module")
def setup():
    corpus = synth_corpus(11, 4)
    sample = min(corpus, key=lambda s: s.m)
    model = FastTalker(tiny_config(), seed=2)
    return model, sample


class TestForwardTrain:
    def test_all_terms_finite_scalars(self, setup):
        model, sample = setup
        losses = model.forward_train(sample)
        for key in LOSS_KEYS + ("total",):
            value = float(losses[key].data)
            assert np.isfinite(value)
        m = sample.m
        assert losses["outputs"]["mel"].data.shape == (80, m)
        assert losses["outputs"]["waveform"].data.shape == (160 * m,)
        t_g = gesture_frame_count(m)
        assert losses["outputs"]["logits"].data.shape == (t_g, 256)

    def test_total_is_plain_sum(self, setup):
        model, sample = setup
        losses = model.forward_train(sample)
        total = float(losses["total"].data)
        parts = sum(float(losses[k].data) for k in LOSS_KEYS)
        assert abs(total - parts) <= 1e-12 * max(1.0, abs(total))

    def test_eval_forward_deterministic(self, setup):
        model, sample = setup
        a = float(model.forward_train(sample)["total"].data)
        b = float(model.forward_train(sample)["total"].data)
        assert a == b

    def test_dropout_rng_changes_losses(self, setup):
        model, sample = setup
        base = float(model.forward_train(sample)["total"].data)
        noisy = float(model.forward_train(
            sample, rng=stream(5, "drop"))["total"].data)
        assert noisy != base

    def test_backward_reaches_every_parameter(self, setup):
        model, sample = setup
        for p in model.parameters():
            p.grad = None
        model.forward_train(sample)["total"].backward()
        missing = [n for n, p in model.named_parameters() if p.grad is None]
        assert missing == []


class TestCausality:
    def make_inputs(self):
        tokens = [3, 7, 1, 9, 4, 2]
        words = [("ab", (0, 2)), ("cd", (2, 4)), ("ef", (4, 6))]
        durations = [2, 3, 1, 2, 3, 1]
        return tokens, words, durations

    def test_waveform_prefix_bitwise(self):
        model = FastTalker(tiny_config(), seed=3)
        tokens, _, durations = self.make_inputs()
        k = 4
        m_k = sum(durations[:k])

        _, _, f_r_full = model._rhythm(np.array(tokens), durations)
        full = model.waveform_decoder(f_r_full).data
        _, _, f_r_part = model._rhythm(np.array(tokens[:k]), durations[:k])
        part = model.waveform_decoder(f_r_part).data

        assert part.shape == (160 * m_k,)
        assert_array_equal(full[:160 * m_k], part)

    def test_gesture_logits_prefix_bitwise(self):
        model = FastTalker(tiny_config(), seed=4)
        tokens, words, durations = self.make_inputs()
        k = 4
        m_k = sum(durations[:k])
        m = sum(durations)

        seq_full = make_sequence(tokens, words)
        seq_part = make_sequence(tokens[:k], words[:2])

        f_pho, cas, _ = model._rhythm(np.array(tokens), durations)
        logits_full, _ = model._gesture(f_pho, cas, seq_full, durations)
        f_pho_p, cas_p, _ = model._rhythm(np.array(tokens[:k]), durations[:k])
        logits_part, _ = model._gesture(f_pho_p, cas_p, seq_part,
                                        durations[:k])

        src_full = gesture_source_frames(m)
        src_part = gesture_source_frames(m_k)
        shared = 0
        while (shared < len(src_part)
               and src_full[shared] == src_part[shared]):
            shared += 1
        assert shared >= 1
        assert_array_equal(logits_full.data[:shared],
                           logits_part.data[:shared])


class TestSynthesize:
    def test_duration_rule(self):
        model = FastTalker(tiny_config(), seed=5)
        model.cascade.duration.head.w.data[:] = 0.0
        model.cascade.duration.head.b.data[:] = np.log(2.4)
        out = model.synthesize("hello world")
        assert np.all(out["durations"] == 2)
        assert out["m"] == int(out["durations"].sum())
        assert out["waveform"].shape == (160 * out["m"],)
        assert out["poses"].shape == (gesture_frame_count(out["m"]), 24)

    def test_duration_floor_at_one(self):
        model = FastTalker(tiny_config(), seed=6)
        model.cascade.duration.head.w.data[:] = 0.0
        model.cascade.duration.head.b.data[:] = np.log(0.01)
        out = model.synthesize("a")
        assert np.all(out["durations"] == 1)

    def test_accepts_sequence(self):
        model = FastTalker(tiny_config(), seed=7)
        seq = make_sequence([1, 2], [("xy", (0, 2))])
        out = model.synthesize(seq)
        assert out["gesture_indices"].shape == (
            gesture_frame_count(out["m"]),)


class TestTraining:
    def test_short_run_decreases_loss(self):
        corpus = synth_corpus(21, 4)
        sample = min(corpus, key=lambda s: s.m)
        model = FastTalker(tiny_config(), seed=8, dropout=0.0)
        opt = Adam(model.parameters(), lr=3e-4)
        first = None
        last = None
        for _ in range(30):
            opt.zero_grad()
            total = model.forward_train(sample)["total"]
            total.backward()
            opt.step()
            value = float(total.data)
            first = value if first is None else first
            last = value
        assert last < first
