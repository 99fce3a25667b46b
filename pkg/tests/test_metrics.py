"""Metric tests: Frechet distance, diversity, beats, motion errors, speed."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from fasttalker.errors import MetricError, ShapeError
from fasttalker.frontend import synth_corpus
from fasttalker.metrics import COV_REGULARIZER, FeatureExtractor, \
    MetricReport, audio_beats_from_energy, beat_consistency, bench_speed, \
    diversity, evaluate_model, fgd, frechet_distance, lvd, \
    motion_beats_from_poses, nas_components, seconds_per_generated_second, \
    sqrtm_psd, vertex_mse
from fasttalker.model import FastTalker
from fasttalker.nas import ModuleChoice, ArchitectureConfig


def gaussian_features(rng, mean, std, n=400):
    return rng.normal(size=(n, len(mean))) * np.array(std) + np.array(mean)


class TestFrechetDistance:
    def test_identical_sets_zero(self):
        feats = np.random.default_rng(0).normal(size=(64, 32))
        assert frechet_distance(feats, feats) < 1e-8

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(50, 8))
        b = rng.normal(size=(50, 8)) + 0.5
        assert abs(frechet_distance(a, b) - frechet_distance(b, a)) < 1e-8

    def test_one_dimensional_closed_form(self):
        # sample mean/std exactly (0, 1) and (1, 1): shifted symmetric pairs
        base = np.array([-1.0, 1.0, -1.0, 1.0]) / np.sqrt(4.0 / 3.0)
        a = base[:, None]
        b = base[:, None] + 1.0
        assert_allclose(frechet_distance(a, b), 1.0, atol=1e-6)

    def test_two_dimensional_diagonal_closed_form(self):
        rng = np.random.default_rng(2)
        a = gaussian_features(rng, [0.0, 2.0], [1.0, 0.5])
        b = gaussian_features(rng, [1.0, 0.0], [2.0, 1.5])
        mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
        cov_a = np.cov(a, rowvar=False) + COV_REGULARIZER * np.eye(2)
        cov_b = np.cov(b, rowvar=False) + COV_REGULARIZER * np.eye(2)
        # oracle valid because both covariances commute only approximately;
        # evaluate the exact trace term by eigendecomposition of the product
        eigvals = np.linalg.eigvals(cov_a @ cov_b)
        expected = float(((mu_a - mu_b) ** 2).sum() + np.trace(cov_a)
                         + np.trace(cov_b)
                         - 2.0 * np.sqrt(np.abs(eigvals)).sum())
        assert_allclose(frechet_distance(a, b), expected, atol=1e-6)

    def test_singular_covariance_regularized(self):
        constant = np.ones((5, 3))
        value = frechet_distance(constant, constant + 2.0)
        assert np.isfinite(value)
        assert_allclose(value, 12.0, atol=1e-6)

    def test_too_few_rows(self):
        with pytest.raises(MetricError):
            frechet_distance(np.zeros((1, 4)), np.zeros((5, 4)))

    def test_sqrtm_round_trip(self):
        rng = np.random.default_rng(3)
        m = rng.normal(size=(6, 6))
        psd = m @ m.T
        root = sqrtm_psd(psd)
        assert_allclose(root @ root, psd, atol=1e-9)


class TestFeatureExtractor:
    def test_deterministic_across_instances(self):
        clip = np.random.default_rng(0).normal(size=(12, 24))
        a = FeatureExtractor(5).extract_clip(clip)
        b = FeatureExtractor(5).extract_clip(clip)
        assert_array_equal(a, b)
        assert a.shape == (32,)

    def test_seed_changes_features(self):
        clip = np.random.default_rng(1).normal(size=(12, 24))
        a = FeatureExtractor(5).extract_clip(clip)
        b = FeatureExtractor(6).extract_clip(clip)
        assert not np.array_equal(a, b)

    def test_variable_length_clips(self):
        ext = FeatureExtractor(7)
        rng = np.random.default_rng(2)
        feats = ext.extract([rng.normal(size=(t, 24)) for t in (3, 9, 30)])
        assert feats.shape == (3, 32)

    def test_pose_dim_checked(self):
        with pytest.raises(ShapeError):
            FeatureExtractor(0).extract_clip(np.zeros((4, 10)))

    def test_fgd_of_identical_clip_sets(self):
        ext = FeatureExtractor(8)
        rng = np.random.default_rng(3)
        clips = [rng.normal(size=(10, 24)) for _ in range(8)]
        assert fgd(clips, list(clips), ext) < 1e-8
        with pytest.raises(MetricError):
            fgd(clips[:1], clips, ext)


class TestDiversity:
    def test_identical_clips_zero(self):
        clips = [np.ones((4, 3))] * 3
        assert diversity(clips) == 0.0

    def test_constant_offset_pair(self):
        assert diversity([np.zeros((5, 2)), np.ones((5, 2))]) == 1.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(4)
        clips = [rng.normal(size=(6, 3)) for _ in range(4)]
        expected = np.mean([np.abs(clips[i] - clips[j]).mean()
                            for i in range(4) for j in range(i + 1, 4)])
        assert_allclose(diversity(clips), expected, rtol=1e-12)

    def test_order_invariance_and_scaling(self):
        rng = np.random.default_rng(5)
        clips = [rng.normal(size=(6, 3)) for _ in range(3)]
        base = diversity(clips)
        assert diversity(clips[::-1]) == base
        assert_allclose(diversity([3.0 * c for c in clips]), 3.0 * base,
                        rtol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(MetricError):
            diversity([np.zeros((4, 3)), np.zeros((5, 3))])


class TestBeatConsistency:
    def test_aligned_beats_score_one(self):
        beats = np.array([0.5, 1.0, 2.0])
        assert beat_consistency(beats, beats) == 1.0

    def test_single_pair_offset_sigma(self):
        got = beat_consistency([0.0], [0.1], sigma=0.1)
        assert_allclose(got, np.exp(-0.5), atol=1e-12)

    def test_shifted_beats_match_direct_formula(self):
        rng = np.random.default_rng(6)
        audio = np.sort(rng.uniform(0.0, 5.0, size=12))
        motion = audio + 0.07
        sigma = 0.1
        direct = np.mean([
            np.exp(-min((t - audio) ** 2) / (2 * sigma ** 2))
            for t in motion])
        assert_allclose(beat_consistency(audio, motion, sigma), direct,
                        rtol=1e-12)

    def test_bounds_and_errors(self):
        value = beat_consistency([0.0, 1.0], [0.4, 0.6])
        assert 0.0 < value <= 1.0
        with pytest.raises(MetricError):
            beat_consistency([], [0.1])
        with pytest.raises(MetricError):
            beat_consistency([0.1], [])

    def test_peak_picking(self):
        energy = np.array([0.0, 2.0, 1.0, 0.5, 3.0, 0.2])
        assert_allclose(audio_beats_from_energy(energy, 100.0),
                        [0.01, 0.04])
        poses = np.zeros((6, 2))
        poses[:, 0] = [0.0, 1.0, 1.1, 2.0, 2.1, 3.5]
        speed = np.abs(np.diff(poses[:, 0]))
        idx = [i for i in range(1, 4)
               if speed[i] < speed[i - 1] and speed[i] <= speed[i + 1]]
        assert_allclose(motion_beats_from_poses(poses, 30.0),
                        [i / 30.0 for i in idx])


class TestMotionErrors:
    def test_exact_match_zero(self):
        clip = np.random.default_rng(7).normal(size=(8, 24))
        assert vertex_mse(clip, clip) == 0.0
        assert lvd(clip, clip) == 0.0

    def test_constant_offset(self):
        clip = np.random.default_rng(8).normal(size=(8, 24))
        assert_allclose(vertex_mse(clip + 2.0, clip), 4.0, rtol=1e-12)
        assert_allclose(lvd(clip + 2.0, clip), 0.0, atol=1e-12)

    def test_linear_ramp_slopes(self):
        t = np.arange(10.0)[:, None]
        assert_allclose(lvd(0.7 * t, 0.2 * t), 0.5, rtol=1e-12)

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            vertex_mse(np.zeros((3, 2)), np.zeros((4, 2)))
        with pytest.raises(MetricError):
            lvd(np.zeros((1, 2)), np.zeros((1, 2)))


class TestBench:
    def test_arithmetic(self):
        assert seconds_per_generated_second([0.5, 0.4, 0.3], 2.0) == 0.2

    def test_minimum_repeats(self):
        model = tiny_model()
        with pytest.raises(MetricError):
            bench_speed(model, "a", repeats=2)

    def test_bench_runs(self):
        value = bench_speed(tiny_model(), "a", repeats=3)
        assert np.isfinite(value) and value > 0.0


def tiny_model(seed=0):
    def mc(layers):
        return ModuleChoice(channels=16, layers=layers, groups=1, kernel=3)

    config = ArchitectureConfig(choices=(
        mc(2), mc(0), mc(0), mc(0), mc(0), mc(2), mc(0)))
    return FastTalker(config, seed=seed)


class TestReport:
    def test_evaluate_model_produces_report(self):
        corpus = synth_corpus(31, 6)
        model = tiny_model(1)
        extractor = FeatureExtractor(0)
        report = evaluate_model(model, corpus, extractor, bench_script="ab",
                                bench_repeats=3)
        payload = report.to_json()
        assert set(payload) == {"fgd", "bc", "diversity", "mse", "lvd",
                                "utmos_proxy", "params", "sec_per_sec"}
        assert MetricReport.from_json(payload) == report
        assert report.params == model.param_count()
        assert 1.0 <= report.utmos_proxy <= 5.0
        assert 0.0 < report.bc <= 1.0

    def test_nas_components_consistent(self):
        corpus = synth_corpus(32, 4)
        model = tiny_model(2)
        extractor = FeatureExtractor(1)
        distance, utmos, params = nas_components(model, corpus, extractor)
        assert distance >= 0.0
        assert 1.0 <= utmos <= 5.0
        assert params == model.param_count()

    def test_report_rejects_negative(self):
        with pytest.raises(MetricError):
            MetricReport(fgd=-1.0, bc=0.5, diversity=0.1, mse=0.1, lvd=0.1,
                         utmos_proxy=3.0, params=10, sec_per_sec=0.1)
