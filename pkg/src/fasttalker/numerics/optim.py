"""Adam with bias correction. Parameter order is fixed by the caller and must
match between save and restore (checkpoints key the state by parameter name)."""

from __future__ import annotations

import numpy as np

from ..errors import FormatError
from .tensor import Tensor


class Adam:
    def __init__(self, params: list[Tensor], lr: float = 3e-4,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8):
        self.params = list(params)
        self.lr = float(lr)
        self.beta1, self.beta2 = float(betas[0]), float(betas[1])
        self.eps = float(eps)
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self):
        for p in self.params:
            p.grad = None

    def step(self):
        self.step_count += 1
        bc1 = 1.0 - self.beta1 ** self.step_count
        bc2 = 1.0 - self.beta2 ** self.step_count
        for i, p in enumerate(self.params):
            if p.grad is None:
                continue
            g = p.grad
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * (g * g)
            m_hat = self.m[i] / bc1
            v_hat = self.v[i] / bc2
            p.data -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def state_arrays(self, names: list[str]) -> dict[str, np.ndarray]:
        """Flatten optimizer state under adam/{m,v}/<param name>."""
        if len(names) != len(self.params):
            raise FormatError("optimizer state: name count mismatch")
        out = {}
        for name, m, v in zip(names, self.m, self.v):
            out[f"adam/m/{name}"] = m
            out[f"adam/v/{name}"] = v
        return out

    def load_state_arrays(self, names: list[str], arrays: dict[str, np.ndarray],
                          step_count: int):
        for i, name in enumerate(names):
            try:
                m = arrays[f"adam/m/{name}"]
                v = arrays[f"adam/v/{name}"]
            except KeyError as exc:
                raise FormatError(f"optimizer state missing {exc}") from exc
            if m.shape != self.params[i].data.shape:
                raise FormatError(f"optimizer state shape mismatch for {name}")
            self.m[i] = m.astype(np.float64)
            self.v[i] = v.astype(np.float64)
        self.step_count = int(step_count)
