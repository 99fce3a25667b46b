"""Training: deterministic corpus splits, the epoch loop, and the candidate
train/eval pair used by the architecture search."""

from __future__ import annotations

import hashlib
import json
import time

from .errors import FastTalkerError
from .metrics.report import nas_components
from .numerics.optim import Adam
from .numerics.tensor import Tensor
from .rng import stream
from .speech.losses import Discriminator, lsgan_discriminator_loss

TRAIN_FRACTION = 0.8
VAL_FRACTION = 0.1
LOSS_KEYS = ("total", "duration", "pitch", "energy", "audio", "gesture")


def split_corpus(samples):
    """8:1:1 train/val/test split, stable under corpus order: samples are
    ranked by the SHA-256 of their id, then sliced."""
    ranked = sorted(samples,
                    key=lambda s: hashlib.sha256(
                        s.sample_id.encode("utf-8")).hexdigest())
    n = len(ranked)
    n_train = int(TRAIN_FRACTION * n)
    n_val = int(VAL_FRACTION * n)
    return (ranked[:n_train], ranked[n_train:n_train + n_val],
            ranked[n_train + n_val:])


class Trainer:
    """Adam over every trainable parameter; one epoch is a full shuffled
    pass over the samples. All randomness comes from (seed, epoch) streams,
    so a rerun with the same arguments is bitwise identical."""

    def __init__(self, model, samples, *, lr: float = 3e-4,
                 betas=(0.9, 0.999), eps: float = 1e-8, seed: int = 0,
                 adversarial_weight: float = 0.0):
        if not samples:
            raise FastTalkerError("trainer: empty sample list")
        self.model = model
        self.samples = list(samples)
        self.seed = int(seed)
        self.adversarial_weight = float(adversarial_weight)
        self.optimizer = Adam(model.parameters(), lr=lr, betas=betas,
                              eps=eps)
        self.discriminator = None
        self.disc_optimizer = None
        if self.adversarial_weight > 0.0:
            self.discriminator = Discriminator(
                stream(seed, "train", "discriminator"))
            self.disc_optimizer = Adam(self.discriminator.parameters(),
                                       lr=lr, betas=betas, eps=eps)
        self.epochs_done = 0

    def _step(self, sample, rng) -> dict:
        losses = self.model.forward_train(
            sample, rng, discriminator=self.discriminator,
            adversarial_weight=self.adversarial_weight)
        self.optimizer.zero_grad()
        if self.discriminator is not None:
            self.disc_optimizer.zero_grad()
        losses["total"].backward()
        self.optimizer.step()
        scalars = {k: float(losses[k].data) for k in LOSS_KEYS}
        if self.discriminator is not None:
            # Critic update on the frozen copy of the generated waveform.
            fake = Tensor(losses["outputs"]["waveform"].data.copy())
            d_loss = lsgan_discriminator_loss(
                self.discriminator.forward(Tensor(sample.waveform)),
                self.discriminator.forward(fake))
            self.disc_optimizer.zero_grad()
            d_loss.backward()
            self.disc_optimizer.step()
            scalars["discriminator"] = float(d_loss.data)
        return scalars

    def train_epoch(self) -> dict:
        """One pass; returns the epoch record of mean losses."""
        epoch = self.epochs_done
        order = stream(self.seed, "train", "order",
                       str(epoch)).permutation(len(self.samples))
        dropout_rng = stream(self.seed, "train", "dropout", str(epoch))
        start = time.perf_counter()
        sums: dict[str, float] = {}
        for idx in order:
            scalars = self._step(self.samples[int(idx)], dropout_rng)
            for key, value in scalars.items():
                sums[key] = sums.get(key, 0.0) + value
        self.epochs_done += 1
        record = {"epoch": epoch}
        record.update({k: v / len(self.samples) for k, v in sums.items()})
        record["wall_ms"] = (time.perf_counter() - start) * 1000.0
        return record

    def train(self, epochs: int) -> list[dict]:
        if epochs < 1:
            raise FastTalkerError(f"trainer: epochs must be >= 1, got {epochs}")
        return [self.train_epoch() for _ in range(epochs)]


def write_loss_curve(path, records) -> None:
    """Loss curve as JSONL, one epoch record per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def load_loss_curve(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def make_candidate_trainer(train_samples, *, lr: float = 3e-4,
                           dropout: float = 0.1):
    """The trainer callable handed to the search loop: builds a fresh model
    for (config, seed) and trains it for a fixed number of epochs."""
    from .model import FastTalker

    def trainer(config, seed, epochs):
        model = FastTalker(config, seed=seed, dropout=dropout)
        Trainer(model, train_samples, lr=lr, seed=seed).train(epochs)
        return model

    return trainer


def make_candidate_evaluator(val_samples, extractor):
    """The evaluator callable handed to the search loop: reward components
    (fgd, utmos_proxy, params) on held-out samples."""

    def evaluator(model, config):
        return nas_components(model, val_samples, extractor)

    return evaluator
