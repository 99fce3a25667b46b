"""Evaluation metrics: distribution distances, motion quality, speed."""

from .bench import DEFAULT_SCRIPT, MIN_REPEATS, bench_speed, \
    seconds_per_generated_second
from .distribution import COV_REGULARIZER, diversity, fgd, frechet_distance, \
    sqrtm_psd
from .features import EXTRACTOR_KERNEL, FEATURE_DIM, FeatureExtractor
from .motion import BEAT_SIGMA, audio_beats_from_energy, beat_consistency, \
    lvd, motion_beats_from_poses, vertex_mse
from .report import MetricReport, REPORT_FIELDS, evaluate_model, \
    generation_stats, nas_components

__all__ = [
    "DEFAULT_SCRIPT", "MIN_REPEATS", "bench_speed",
    "seconds_per_generated_second", "COV_REGULARIZER", "diversity", "fgd",
    "frechet_distance", "sqrtm_psd", "EXTRACTOR_KERNEL", "FEATURE_DIM",
    "FeatureExtractor", "BEAT_SIGMA", "audio_beats_from_energy",
    "beat_consistency", "lvd", "motion_beats_from_poses", "vertex_mse",
    "MetricReport", "REPORT_FIELDS", "evaluate_model", "generation_stats",
    "nas_components",
]
