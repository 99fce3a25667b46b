"""Full evaluation protocol producing one MetricReport per model + corpus."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FormatError, MetricError
from .. import dsp
from ..gesture import reconstruct_gesture
from ..nas.reward import utmos_proxy
from .bench import DEFAULT_SCRIPT, bench_speed
from .distribution import diversity, fgd
from .motion import audio_beats_from_energy, beat_consistency, lvd, \
    motion_beats_from_poses, vertex_mse

REPORT_FIELDS = ("fgd", "bc", "diversity", "mse", "lvd", "utmos_proxy",
                 "params", "sec_per_sec")


@dataclass(frozen=True)
class MetricReport:
    """Table-style summary; every value measured, none estimated."""

    fgd: float
    bc: float
    diversity: float
    mse: float
    lvd: float
    utmos_proxy: float
    params: int
    sec_per_sec: float

    def __post_init__(self):
        for name in REPORT_FIELDS:
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0.0:
                raise MetricError(f"{name} must be finite and >= 0, "
                                  f"got {value}")

    def to_json(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_FIELDS}

    @staticmethod
    def from_json(obj: dict) -> "MetricReport":
        missing = [n for n in REPORT_FIELDS if n not in obj]
        if missing:
            raise FormatError(f"metric report missing fields {missing}")
        return MetricReport(**{n: obj[n] for n in REPORT_FIELDS})


def generation_stats(model, samples) -> dict:
    """Teacher-forced generations plus per-sample quality statistics."""
    if len(samples) == 0:
        raise MetricError("evaluation needs at least one sample")
    gen_clips, gt_clips, waveforms, utmos_values = [], [], [], []
    for sample in samples:
        out = model.generate(sample)
        gen_clips.append(out["poses"])
        waveforms.append(out["waveform"])
        gt_clips.append(reconstruct_gesture(
            sample.gesture_codes, model.codebook, model.pose_decoder))
        mel_gen = dsp.log_mel_spectrogram(out["waveform"])
        utmos_values.append(utmos_proxy(mel_gen, sample.mel))
    return {"gen_clips": gen_clips, "gt_clips": gt_clips,
            "waveforms": waveforms, "utmos": float(np.mean(utmos_values))}


def nas_components(model, samples, extractor):
    """(fgd, utmos_proxy, params) for the architecture-search reward."""
    stats = generation_stats(model, samples)
    distance = fgd(stats["gen_clips"], stats["gt_clips"], extractor)
    return distance, stats["utmos"], model.param_count()


def evaluate_model(model, samples, extractor, *,
                   bench_script: str = DEFAULT_SCRIPT,
                   bench_repeats: int = 5) -> MetricReport:
    """Complete metric sweep over an evaluation corpus."""
    stats = generation_stats(model, samples)
    gen_clips, gt_clips = stats["gen_clips"], stats["gt_clips"]

    mse_values = [vertex_mse(g, t) for g, t in zip(gen_clips, gt_clips)]
    lvd_pairs = [(g, t) for g, t in zip(gen_clips, gt_clips)
                 if g.shape[0] >= 2]
    if not lvd_pairs:
        raise MetricError("lvd needs at least one clip with >= 2 frames")
    lvd_values = [lvd(g, t) for g, t in lvd_pairs]

    bc_values = []
    for waveform, clip in zip(stats["waveforms"], gen_clips):
        audio = audio_beats_from_energy(dsp.frame_energy(waveform))
        motion = motion_beats_from_poses(clip)
        if audio.size and motion.size:
            bc_values.append(beat_consistency(audio, motion))
    if not bc_values:
        raise MetricError("no sample yielded both audio and motion beats")

    min_frames = min(c.shape[0] for c in gen_clips)
    trimmed = [c[:min_frames] for c in gen_clips]

    return MetricReport(
        fgd=fgd(gen_clips, gt_clips, extractor),
        bc=float(np.mean(bc_values)),
        diversity=diversity(trimmed),
        mse=float(np.mean(mse_values)),
        lvd=float(np.mean(lvd_values)),
        utmos_proxy=stats["utmos"],
        params=model.param_count(),
        sec_per_sec=bench_speed(model, bench_script, bench_repeats),
    )
