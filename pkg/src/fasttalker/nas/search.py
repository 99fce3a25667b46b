"""REINFORCE search loop: sample candidates, train with a fixed-stop policy,
score with the aggregate reward, and ascend the policy against an EMA
baseline. History is appended to JSONL one candidate at a time; the search
state (controller weights, baseline, sampling RNG, pending batch) round-trips
through save/load so an interrupted run continues bit-identically."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import FormatError, SearchError
from ..numerics import add, mul
from ..numerics.serialize import read_named, write_named
from ..rng import generator_state, restore_generator, stream
from .controller import Controller
from .reward import CALIBRATION_SAMPLES, baseline_update, \
    calibrate_normalizers, compute_reward
from .space import ArchitectureConfig, SearchSpace

SEARCH_MAGIC = b"FTNS"
DEFAULT_BATCH = 4
DEFAULT_GAMMA = 0.9
DEFAULT_LR = 0.2


def reinforce_loss(batch, baseline: float):
    """Surrogate whose gradient is -(1/o) sum_k (R_k - b) sum_t grad log P."""
    if not batch:
        raise SearchError("reinforce_loss needs a non-empty batch")
    scale = 1.0 / len(batch)
    total = None
    for log_probs, reward in batch:
        seq = log_probs[0]
        for lp in log_probs[1:]:
            seq = add(seq, lp)
        term = mul(seq, -scale * (float(reward) - float(baseline)))
        total = term if total is None else add(total, term)
    return total


def reinforce_update(controller: Controller, batch, baseline: float,
                     lr: float = DEFAULT_LR) -> float:
    """One ascent step on the policy; returns the surrogate loss value."""
    for p in controller.parameters():
        p.grad = None
    loss = reinforce_loss(batch, baseline)
    loss.backward()
    for p in controller.parameters():
        if p.grad is not None:
            p.data -= lr * p.grad
    return float(loss.data)


def random_config(space: SearchSpace, rng) -> ArchitectureConfig:
    """Uniform valid sample: channels first, then only divisible groups."""
    indices = []
    for module, hyper in space.decision_schedule():
        values = space.choice_values(hyper)
        if hyper == "groups":
            channels = indices_to_partial(space, indices)[module]["channels"]
            valid = [i for i, g in enumerate(values) if channels % g == 0]
        else:
            valid = list(range(len(values)))
        indices.append(int(rng.choice(valid)))
    return space.config_from_indices(indices)


def indices_to_partial(space: SearchSpace, indices) -> dict:
    partial = {m: {} for m in space.modules}
    for (module, hyper), idx in zip(space.decision_schedule(), indices):
        partial[module][hyper] = space.choice_values(hyper)[idx]
    return partial


def candidate_seed(master_seed: int, index: int) -> int:
    """Stable per-candidate seed; independent of resume points."""
    return int(stream(master_seed, "search", f"candidate{index}")
               .integers(0, 2 ** 31))


@dataclass
class SearchState:
    """Everything needed to continue a search bit-identically."""

    space: SearchSpace
    controller: Controller
    baseline: float
    completed: int
    alpha: float
    beta: float
    sampler: object
    pending: list = field(default_factory=list)  # (indices, reward) pairs


def save_search_state(state: SearchState, path) -> None:
    meta = {
        "baseline": state.baseline,
        "completed": state.completed,
        "alpha": state.alpha,
        "beta": state.beta,
        "hidden": state.controller.hidden,
        "include_kernel": state.space.include_kernel,
        "space": {h: list(state.space.choice_values(h))
                  for h in ("channels", "layers", "groups", "kernel")},
        "sampler": generator_state(state.sampler),
        "pending": [{"indices": list(i), "reward": r}
                    for i, r in state.pending],
    }
    payload = json.dumps(meta).encode("utf-8")
    arrays = {name: p.data for name, p in
              state.controller.named_parameters()}
    with open(path, "wb") as fh:
        fh.write(SEARCH_MAGIC)
        fh.write(len(payload).to_bytes(8, "little"))
        fh.write(payload)
        write_named(fh, arrays)


def load_search_state(path) -> SearchState:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SEARCH_MAGIC:
            raise FormatError(f"bad search-state magic {magic!r}")
        size = int.from_bytes(fh.read(8), "little")
        meta = json.loads(fh.read(size).decode("utf-8"))
        arrays = read_named(fh)
    space = SearchSpace(include_kernel=meta["include_kernel"],
                        **{k: tuple(v) for k, v in meta["space"].items()})
    controller = Controller(space, stream(0, "search", "controller-init"),
                            hidden=meta["hidden"])
    named = dict(controller.named_parameters())
    if set(named) != set(arrays):
        raise FormatError("search state parameter names do not match")
    for name, p in named.items():
        if p.data.shape != arrays[name].shape:
            raise FormatError(f"shape mismatch for {name}")
        p.data = arrays[name].astype(p.data.dtype)
    return SearchState(
        space=space, controller=controller, baseline=meta["baseline"],
        completed=meta["completed"], alpha=meta["alpha"], beta=meta["beta"],
        sampler=restore_generator(meta["sampler"]),
        pending=[(list(p["indices"]), float(p["reward"]))
                 for p in meta["pending"]])


def _replay_log_probs(controller: Controller, indices):
    """Re-decode with forced choices; exact because updates happen only at
    batch boundaries, so the policy is unchanged since the sample."""
    forced = list(indices)

    def choose(step, probs, mask):
        return forced[step]

    _, log_probs, _, _ = controller.step_probabilities(choose)
    return log_probs


def history_record(config, seed, record, epochs, wall_ms) -> dict:
    return {"config": config.to_json(), "seed": int(seed),
            "reward": record.reward, "components": record.components(),
            "epochs": int(epochs), "wall_ms": int(wall_ms)}


def load_history(path) -> list:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [json.loads(line) for line in lines if line.strip()]


@dataclass(frozen=True)
class SearchResult:
    best_config: ArchitectureConfig
    best_reward: float
    history: list
    alpha: float
    beta: float


def search_loop(space: SearchSpace, budget: int, trainer, evaluator, *,
                master_seed: int = 0, epochs: int = 30,
                batch_size: int = DEFAULT_BATCH, gamma: float = DEFAULT_GAMMA,
                lr: float = DEFAULT_LR, alpha: float = None,
                beta: float = None, history_path=None, state_path=None,
                resume: bool = False) -> SearchResult:
    """Run (or continue) a candidate search.

    trainer(config, seed, epochs) -> model; evaluator(model, config) ->
    (fgd, utmos_proxy, params). When alpha/beta are omitted they are
    calibrated from CALIBRATION_SAMPLES uniform random architectures, which
    costs that many extra trainer/evaluator calls before the search starts.

    Policy updates happen every batch_size candidates; a trailing partial
    batch is carried inside the saved state, so a run split across resumes
    takes identical update steps to an uninterrupted one.
    """
    if budget <= 0:
        raise SearchError(f"budget must be positive, got {budget}")
    if batch_size < 1:
        raise SearchError(f"batch size must be >= 1, got {batch_size}")
    if not 0.0 <= gamma < 1.0:
        raise SearchError(f"gamma must lie in [0, 1), got {gamma}")

    history = []
    if resume:
        if state_path is None or not Path(state_path).exists():
            raise SearchError("resume requested without a saved state")
        state = load_search_state(state_path)
        if history_path is not None and Path(history_path).exists():
            history = load_history(history_path)
    else:
        if alpha is None or beta is None:
            cal_rng = stream(master_seed, "search", "calibration")
            fgds, params_list = [], []
            for i in range(CALIBRATION_SAMPLES):
                config = random_config(space, cal_rng)
                seed = candidate_seed(master_seed, -(i + 1))
                model = trainer(config, seed, epochs)
                fgd, _, params = evaluator(model, config)
                fgds.append(fgd)
                params_list.append(params)
            cal_alpha, cal_beta = calibrate_normalizers(fgds, params_list)
            alpha = cal_alpha if alpha is None else alpha
            beta = cal_beta if beta is None else beta
        state = SearchState(
            space=space,
            controller=Controller(
                space, stream(master_seed, "search", "controller-init")),
            baseline=0.0, completed=0, alpha=float(alpha), beta=float(beta),
            sampler=stream(master_seed, "search", "controller-sampling"))

    history_fh = None
    if history_path is not None:
        history_fh = open(history_path, "a", encoding="utf-8")

    try:
        batch = [(_replay_log_probs(state.controller, idx), r)
                 for idx, r in state.pending]
        while state.completed < budget:
            config, log_probs, indices = state.controller.sample(
                state.sampler)
            seed = candidate_seed(master_seed, state.completed)
            started = time.perf_counter()
            model = trainer(config, seed, epochs)
            fgd, utmos, params = evaluator(model, config)
            wall_ms = round((time.perf_counter() - started) * 1000.0)
            record = compute_reward(fgd, utmos, params, state.alpha,
                                    state.beta)
            entry = history_record(config, seed, record, epochs, wall_ms)
            history.append(entry)
            if history_fh is not None:
                history_fh.write(json.dumps(entry) + "\n")
                history_fh.flush()
            batch.append((log_probs, record.reward))
            state.pending.append((indices, record.reward))
            state.completed += 1
            if len(batch) == batch_size:
                rewards = [r for _, r in batch]
                reinforce_update(state.controller, batch, state.baseline, lr)
                state.baseline = baseline_update(state.baseline, rewards,
                                                 gamma)
                batch = []
                state.pending = []
        if state_path is not None:
            save_search_state(state, state_path)
    finally:
        if history_fh is not None:
            history_fh.close()

    if not history:
        raise SearchError("no candidates evaluated; budget already met")
    best = max(history, key=lambda e: e["reward"])
    return SearchResult(
        best_config=ArchitectureConfig.from_json(best["config"]),
        best_reward=best["reward"], history=history,
        alpha=state.alpha, beta=state.beta)
