import time

import numpy as np

from fasttalker.frontend import synth_corpus
from fasttalker.model import FastTalker
from fasttalker.nas.space import ArchitectureConfig
from fasttalker.numerics.optim import Adam

NAMES = ("phoneme_encoder", "duration_pred", "energy_pred", "pitch_pred",
         "semantic_translator", "waveform_decoder", "gesture_latent_decoder")


def arch(channels, layers):
    return ArchitectureConfig.from_json(
        {n: {"channels": c, "layers": l, "groups": 1, "kernel": 3}
         for n, c, l in zip(NAMES, channels, layers)})


samples = sorted(synth_corpus(11, 40), key=lambda s: s.m)[:4]

ARMS = [
    ("dur-wide128", (32, 128, 32, 32, 32, 64, 32), (2, 4, 0, 2, 0, 4, 2)),
    ("dur-wide256", (32, 256, 32, 32, 32, 64, 32), (2, 4, 0, 2, 0, 4, 2)),
    ("all-heavier", (64, 128, 64, 64, 32, 64, 64), (4, 4, 0, 2, 0, 4, 2)),
]
for label, channels, layers in ARMS:
    model = FastTalker(arch(channels, layers), seed=3, dropout=0.0)
    opt = Adam(model.parameters(), lr=3e-4)
    start = time.time()
    for step in range(2000):
        sample = samples[step % 4]
        losses = model.forward_train(sample)
        opt.zero_grad()
        losses["total"].backward()
        opt.step()
        if step % 500 == 499:
            print(f"{label} step {step+1}: "
                  f"L_dur {float(losses['duration'].data):.2e} "
                  f"({time.time()-start:.0f}s)", flush=True)
    finals = np.array([
        [float(l["duration"].data),
         float(l["detail"]["audio"]["mel"].data),
         float(l["detail"]["gesture"]["code_ce"].data)]
        for l in (model.forward_train(s) for s in samples)])
    print(f"{label} FINAL mean: L_dur {finals[:,0].mean():.2e} "
          f"mel {finals[:,1].mean():.2e} ce {finals[:,2].mean():.2e} | "
          f"max: L_dur {finals[:,0].max():.2e} mel {finals[:,1].max():.2e} "
          f"ce {finals[:,2].max():.2e} ({time.time()-start:.0f}s)",
          flush=True)
