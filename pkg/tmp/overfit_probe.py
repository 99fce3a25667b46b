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


samples = sorted(synth_corpus(11, 12), key=lambda s: s.m)[:4]
print("sample m:", [s.m for s in samples])

for label, channels, layers, steps in [
    ("bus16 thin", (16,) * 7, (2, 0, 0, 0, 0, 2, 0), 2000),
    ("bus32 mid", (32,) * 7, (2, 2, 0, 2, 0, 2, 2), 2000),
]:
    model = FastTalker(arch(channels, layers), seed=3, dropout=0.0)
    opt = Adam(model.parameters(), lr=3e-4)
    start = time.time()
    for step in range(steps):
        sample = samples[step % 4]
        losses = model.forward_train(sample)
        opt.zero_grad()
        losses["total"].backward()
        opt.step()
        if step % 400 == 399 or step == steps - 1:
            ld = float(losses["duration"].data)
            mel = float(losses["detail"]["audio"]["mel"].data)
            ce = float(losses["detail"]["gesture"]["code_ce"].data)
            print(f"{label} step {step+1}: L_dur {ld:.2e} mel {mel:.2e} "
                  f"ce {ce:.2e}  ({time.time()-start:.0f}s)", flush=True)
    # final: mean over the 4 samples
    finals = []
    for sample in samples:
        losses = model.forward_train(sample)
        finals.append((float(losses["duration"].data),
                       float(losses["detail"]["audio"]["mel"].data),
                       float(losses["detail"]["gesture"]["code_ce"].data)))
    arr = np.array(finals)
    print(f"{label} FINAL means: L_dur {arr[:,0].mean():.2e} "
          f"mel {arr[:,1].mean():.2e} ce {arr[:,2].mean():.2e} "
          f"max: {arr.max(axis=0)}  total {time.time()-start:.0f}s")
