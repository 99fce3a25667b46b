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


corpus = synth_corpus(11, 40)
samples = sorted(corpus, key=lambda s: s.m)[:4]
print("sample m:", [s.m for s in samples], "n_tok:",
      [len(s.sequence.tokens) for s in samples], flush=True)

ARMS = [
    ("bus32 mid", (32,) * 7, (2, 2, 0, 2, 0, 2, 2)),
    ("bus64 wide", (64,) * 7, (2, 2, 0, 2, 0, 2, 2)),
    ("dur-heavy", (32, 64, 32, 32, 32, 32, 32), (2, 4, 0, 2, 0, 2, 2)),
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
            ld = float(losses["duration"].data)
            mel = float(losses["detail"]["audio"]["mel"].data)
            ce = float(losses["detail"]["gesture"]["code_ce"].data)
            print(f"{label} step {step+1}: L_dur {ld:.2e} mel {mel:.2e} "
                  f"ce {ce:.2e}  ({time.time()-start:.0f}s)", flush=True)
    finals = np.array([
        [float(l["duration"].data),
         float(l["detail"]["audio"]["mel"].data),
         float(l["detail"]["gesture"]["code_ce"].data)]
        for l in (model.forward_train(s) for s in samples)])
    print(f"{label} FINAL max: L_dur {finals[:,0].max():.2e} "
          f"mel {finals[:,1].max():.2e} ce {finals[:,2].max():.2e} "
          f"({time.time()-start:.0f}s)", flush=True)
