"""Full-batch interpretation: one step = one Adam update on the mean loss."""
import time

import numpy as np

from fasttalker.frontend import synth_corpus
from fasttalker.model import FastTalker
from fasttalker.nas.space import ArchitectureConfig
from fasttalker.numerics.optim import Adam
from fasttalker.numerics.tensor import add, mul

NAMES = ("phoneme_encoder", "duration_pred", "energy_pred", "pitch_pred",
         "semantic_translator", "waveform_decoder", "gesture_latent_decoder")


def arch(channels, layers):
    return ArchitectureConfig.from_json(
        {n: {"channels": c, "layers": l, "groups": 1, "kernel": 3}
         for n, c, l in zip(NAMES, channels, layers)})


samples = sorted(synth_corpus(11, 40), key=lambda s: s.m)[:4]

ARMS = [
    ("fb dur-heavy", (32, 64, 32, 32, 32, 32, 32), (2, 4, 0, 2, 0, 2, 2), 2000),
    ("fb bus32-mid", (32,) * 7, (2, 2, 0, 2, 0, 2, 2), 2000),
]
for label, channels, layers, steps in ARMS:
    model = FastTalker(arch(channels, layers), seed=3, dropout=0.0)
    opt = Adam(model.parameters(), lr=3e-4)
    start = time.time()
    for step in range(steps):
        total = None
        for sample in samples:
            term = model.forward_train(sample)["total"]
            total = term if total is None else add(total, term)
        loss = mul(total, 1.0 / len(samples))
        opt.zero_grad()
        loss.backward()
        opt.step()
        if step % 250 == 249:
            finals = np.array([
                [float(l["duration"].data),
                 float(l["detail"]["audio"]["mel"].data),
                 float(l["detail"]["gesture"]["code_ce"].data)]
                for l in (model.forward_train(s) for s in samples)])
            print(f"{label} step {step+1}: mean L_dur {finals[:,0].mean():.2e} "
                  f"mel {finals[:,1].mean():.2e} ce {finals[:,2].mean():.2e} "
                  f"| max L_dur {finals[:,0].max():.2e} "
                  f"({time.time()-start:.0f}s)", flush=True)
