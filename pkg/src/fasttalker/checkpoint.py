"""Binary checkpoints: model weights, optimizer state, and run metadata.

Layout (little-endian): magic ``FTLK`` | format version u32 | meta length
u64 | meta JSON (utf-8) | named tensor table.  The tensor table holds every
trainable parameter under ``model/<name>`` plus, when an optimizer is
saved, the Adam moments under ``adam/{m,v}/<name>``.  Frozen parts (the
gesture codebook and the pose decoder) are regenerated from the seed on
load and never stored.  Save followed by load is bitwise; a version other
than CHECKPOINT_VERSION is rejected loudly.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .errors import FormatError
from .nas.space import ArchitectureConfig
from .numerics.optim import Adam
from .numerics.serialize import read_named, write_named
from .rng import generator_state, restore_generator

CHECKPOINT_MAGIC = b"FTLK"
CHECKPOINT_VERSION = 1


def _model_entries(model) -> dict[str, np.ndarray]:
    return {f"model/{name}": p.data for name, p in model.named_parameters()}


def save_checkpoint(path, model, optimizer: Adam | None = None,
                    run_config: dict | None = None,
                    rng: np.random.Generator | None = None) -> None:
    """Write model (and optionally Adam + RNG) state to `path`."""
    names = [name for name, _ in model.named_parameters()]
    meta = {
        "arch": model.config.to_json(),
        "vocab_size": model.vocab_size,
        "seed": model.seed,
        "dropout": model.dropout,
        "num_pitch_scales": model.num_pitch_scales,
        "param_names": names,
        "run_config": run_config,
        "optimizer": None,
        "rng": generator_state(rng) if rng is not None else None,
    }
    entries = _model_entries(model)
    if optimizer is not None:
        meta["optimizer"] = {
            "lr": optimizer.lr,
            "betas": [optimizer.beta1, optimizer.beta2],
            "eps": optimizer.eps,
            "step_count": optimizer.step_count,
        }
        entries.update(optimizer.state_arrays(names))
    blob = json.dumps(meta).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", CHECKPOINT_VERSION))
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        write_named(fh, entries)


def load_checkpoint(path):
    """Rebuild (model, optimizer or None, meta dict) from a checkpoint."""
    from .model import FastTalker  # local import to avoid a cycle

    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise FormatError(f"bad checkpoint magic {magic!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != CHECKPOINT_VERSION:
            raise FormatError(
                f"checkpoint version {version} unsupported "
                f"(expected {CHECKPOINT_VERSION})")
        (meta_len,) = struct.unpack("<Q", fh.read(8))
        meta = json.loads(fh.read(meta_len).decode("utf-8"))
        arrays = read_named(fh)

    config = ArchitectureConfig.from_json(meta["arch"])
    model = FastTalker(config, vocab_size=meta["vocab_size"],
                       seed=meta["seed"], dropout=meta["dropout"],
                       num_pitch_scales=meta["num_pitch_scales"])
    names = [name for name, _ in model.named_parameters()]
    if names != meta["param_names"]:
        raise FormatError("checkpoint parameter names do not match model")
    for name, param in model.named_parameters():
        stored = arrays[f"model/{name}"]
        if stored.shape != param.data.shape:
            raise FormatError(f"checkpoint shape mismatch for {name}")
        param.data[...] = stored

    optimizer = None
    if meta["optimizer"] is not None:
        spec = meta["optimizer"]
        optimizer = Adam([p for _, p in model.named_parameters()],
                         lr=spec["lr"], betas=tuple(spec["betas"]),
                         eps=spec["eps"])
        optimizer.load_state_arrays(names, arrays, spec["step_count"])

    if meta.get("rng") is not None:
        meta["rng_generator"] = restore_generator(meta["rng"])
    return model, optimizer, meta
