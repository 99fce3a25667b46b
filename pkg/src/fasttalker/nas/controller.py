"""Autoregressive LSTM policy over architecture decisions.

A two-layer LSTM consumes an embedding of the previous choice (a learned
start token at step 0) and a per-step linear head of width 4 turns the top
hidden state into a softmax over that step's choices. Group choices that do
not divide the channels already sampled for the same module get zero
probability, so every emitted config satisfies the divisibility invariant.
"""

from __future__ import annotations

import numpy as np

from ..errors import SearchError
from ..numerics import Embedding, LSTMCell, Linear, Module, ModuleList, \
    Tensor, getitem, log, masked_softmax
from .space import ArchitectureConfig, SearchSpace

CONTROLLER_HIDDEN = 64
NUM_CHOICES = 4


class Controller(Module):
    """Policy P(choice_t | choices_{<t}) over a SearchSpace's decisions."""

    def __init__(self, space: SearchSpace, rng: np.random.Generator,
                 hidden: int = CONTROLLER_HIDDEN):
        super().__init__()
        self.space = space
        self.schedule = tuple(space.decision_schedule())
        self.hidden = hidden
        steps = len(self.schedule)
        # one embedding row per (step, choice) pair plus one start token
        self.embed = Embedding(steps * NUM_CHOICES + 1, hidden, rng)
        self.cell_a = LSTMCell(hidden, hidden, rng)
        self.cell_b = LSTMCell(hidden, hidden, rng)
        self.heads = ModuleList(
            [Linear(hidden, NUM_CHOICES, rng) for _ in range(steps)])

    @property
    def start_token(self) -> int:
        return len(self.schedule) * NUM_CHOICES

    def _mask(self, step: int, partial: dict) -> np.ndarray:
        module, hyper = self.schedule[step]
        if hyper != "groups":
            return np.ones(NUM_CHOICES, dtype=bool)
        channels = partial[module].get("channels")
        if channels is None:
            return np.ones(NUM_CHOICES, dtype=bool)
        mask = np.array([channels % g == 0 for g in self.space.groups])
        if not mask.any():
            raise SearchError(
                f"no group choice divides channels {channels}")
        return mask

    def step_probabilities(self, choose):
        """Decode all steps; `choose(step, probs, mask) -> int` picks each.

        Returns (config, log_probs, indices, probs_per_step) where log_probs
        is a list of scalar Tensors differentiable w.r.t. the policy.
        """
        h_a = Tensor(np.zeros((1, self.hidden)))
        c_a = Tensor(np.zeros((1, self.hidden)))
        h_b = Tensor(np.zeros((1, self.hidden)))
        c_b = Tensor(np.zeros((1, self.hidden)))
        prev = self.start_token
        partial = {m: {} for m in self.space.modules}
        log_probs, indices, all_probs = [], [], []
        for step, (module, hyper) in enumerate(self.schedule):
            x = self.embed(np.array([prev]))
            h_a, c_a = self.cell_a.step(x, h_a, c_a)
            h_b, c_b = self.cell_b.step(h_a, h_b, c_b)
            logits = self.heads[step](h_b)
            mask = self._mask(step, partial)
            probs = masked_softmax(logits, mask[None, :])
            choice = int(choose(step, probs.data[0].copy(), mask))
            if not mask[choice]:
                raise SearchError(
                    f"choice {choice} masked out at step {step}")
            log_probs.append(log(getitem(probs, (0, choice))))
            indices.append(choice)
            all_probs.append(probs.data[0].copy())
            partial[module][hyper] = self.space.choice_values(hyper)[choice]
            prev = step * NUM_CHOICES + choice
        config = self.space.config_from_indices(indices)
        return config, log_probs, indices, all_probs

    def sample(self, rng: np.random.Generator):
        """Stochastic decode; returns (config, log_probs, indices)."""

        def choose(step, probs, mask):
            p = probs / probs.sum()
            return rng.choice(NUM_CHOICES, p=p)

        config, log_probs, indices, _ = self.step_probabilities(choose)
        return config, log_probs, indices

    def greedy(self):
        """Deterministic decode taking the argmax at every step."""

        def choose(step, probs, mask):
            return int(np.argmax(probs))

        config, log_probs, indices, _ = self.step_probabilities(choose)
        return config, log_probs, indices
