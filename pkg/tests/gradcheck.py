"""Shared test utilities: central-difference gradient checking and naive
reference implementations used as oracles."""

from __future__ import annotations

import numpy as np

from fasttalker.numerics import Tensor


def rel_err(a: float, b: float, floor: float = 1e-6) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)


def central_difference(fn, t: Tensor, idx, h: float = 1e-5) -> float:
    orig = t.data[idx]
    t.data[idx] = orig + h
    hi = fn().item()
    t.data[idx] = orig - h
    lo = fn().item()
    t.data[idx] = orig
    return (hi - lo) / (2.0 * h)


def gradcheck(fn, tensors: list[Tensor], *, h: float = 1e-5, rtol: float = 1e-4,
              max_entries: int | None = None, rng: np.random.Generator | None = None):
    """Compare analytic grads of the scalar fn() against central differences.

    Checks every entry unless max_entries caps it (then entries are sampled
    with rng). Returns the worst relative error seen.
    """
    for t in tensors:
        t.grad = None
    fn().backward()
    worst = 0.0
    for t in tensors:
        assert t.grad is not None, "leaf missing grad after backward"
        assert t.grad.shape == t.data.shape
        entries = list(np.ndindex(t.data.shape))
        if max_entries is not None and len(entries) > max_entries:
            assert rng is not None
            pick = rng.choice(len(entries), size=max_entries, replace=False)
            entries = [entries[i] for i in pick]
        for idx in entries:
            fd = central_difference(fn, t, idx, h)
            err = rel_err(float(t.grad[idx]), fd)
            worst = max(worst, err)
            assert err < rtol, (
                f"grad mismatch at {idx}: analytic {t.grad[idx]:.6e} vs fd {fd:.6e} "
                f"(rel {err:.2e})")
    return worst


# ---- naive conv references (independent of the kernel backends) ----


def naive_conv1d(x, w, groups, dilation, pad_left, pad_right):
    cin, t_in = x.shape
    cout, cin_g, k = w.shape
    t_out = t_in + pad_left + pad_right - (k - 1) * dilation
    cout_g = cout // groups
    y = np.zeros((cout, t_out))
    for o in range(cout):
        g = o // cout_g
        for t in range(t_out):
            acc = 0.0
            for i in range(cin_g):
                for kk in range(k):
                    src = t + kk * dilation - pad_left
                    if 0 <= src < t_in:
                        acc += w[o, i, kk] * x[g * cin_g + i, src]
            y[o, t] = acc
    return y


def naive_conv_transpose1d(x, w, stride):
    cin, t_in = x.shape
    _, cout, k = w.shape
    t_out = t_in * stride
    y = np.zeros((cout, t_out))
    for i in range(cin):
        for s in range(t_in):
            for o in range(cout):
                for kk in range(k):
                    dst = s * stride + kk
                    if dst < t_out:
                        y[o, dst] += w[i, o, kk] * x[i, s]
    return y


def op_gradient_suite(seed: int, rtol: float = 1e-4) -> float:
    """Run central-difference checks over every differentiable op at one seed.

    Returns the worst relative error; raises AssertionError past rtol.
    """
    from fasttalker.numerics import (CausalSelfAttention, LSTMCell, Tensor,
                                     absval, add, causal_softmax, concat,
                                     conv1d, conv_transpose1d, cross_entropy,
                                     div, embedding, exp, gather_rows, getitem,
                                     layer_norm, log, masked_softmax, matmul,
                                     mean, mul, pad1d, power, relu, repeat_rows,
                                     reshape, rfft_magnitude, sigmoid, sum_,
                                     take_flat, tanh, transpose)

    rng = np.random.default_rng(seed)

    def t(*shape, positive=False, away_from_zero=False):
        data = rng.normal(size=shape)
        if positive:
            data = np.abs(data) + 0.5
        if away_from_zero:
            data = data + np.sign(data) * 0.05
        return Tensor(data, requires_grad=True)

    worst = 0.0

    def run(build, leaves):
        # Freeze a random projection so the objective is scalar + deterministic.
        nonlocal worst
        w = Tensor(rng.normal(size=build().data.shape))
        worst = max(worst, gradcheck(lambda: sum_(mul(build(), w)), leaves, rtol=rtol))

    a, b = t(3, 4), t(4)
    run(lambda: (add(a, b)), [a, b])
    c, d = t(3, 4), t(3, 1)
    run(lambda: (mul(c, d)), [c, d])
    e, f = t(3, 4), t(4, positive=True)
    run(lambda: (div(e, f)), [e, f])
    g = t(2, 3, positive=True)
    run(lambda: (power(g, 1.7)), [g])
    run(lambda: (power(g, 0.5)), [g])
    m1, m2 = t(3, 4), t(4, 2)
    run(lambda: (matmul(m1, m2)), [m1, m2])
    run(lambda: (transpose(m1)), [m1])
    run(lambda: (reshape(m1, (2, 6))), [m1])
    run(lambda: (getitem(m1, (slice(1, 3), slice(0, 2)))), [m1])
    c1, c2 = t(2, 3), t(2, 3)
    run(lambda: (concat([c1, c2], axis=1)), [c1, c2])
    run(lambda: (sum_(m1, axis=0)), [m1])
    run(lambda: (mean(m1, axis=1, keepdims=True)), [m1])
    r = t(3, 4, away_from_zero=True)
    run(lambda: (relu(r)), [r])
    run(lambda: (absval(r)), [r])
    run(lambda: (tanh(m1)), [m1])
    run(lambda: (sigmoid(m1)), [m1])
    run(lambda: (exp(m1)), [m1])
    p = t(3, 4, positive=True)
    run(lambda: (log(p)), [p])
    s = t(4, 5)
    mask = rng.random((4, 5)) < 0.6
    mask[:, 0] = True
    run(lambda: (masked_softmax(s, mask)), [s])
    cs = t(4, 4)
    run(lambda: (causal_softmax(cs)), [cs])
    x, gam, bet = t(3, 5), t(5), t(5)
    run(lambda: (layer_norm(x, gam, bet)), [x, gam, bet])
    table = t(6, 3)
    ids = rng.integers(0, 6, size=4)
    run(lambda: (embedding(table, ids)), [table])
    rr = t(3, 2)
    run(lambda: (repeat_rows(rr, np.array([2, 1, 3]))), [rr])
    run(lambda: (gather_rows(rr, np.array([2, 0, 0, 1]))), [rr])
    flat = t(10)
    idx = rng.integers(0, 10, size=(3, 4))
    run(lambda: (take_flat(flat, idx)), [flat])
    run(lambda: (pad1d(flat, 2, 3)), [flat])
    logits = t(4, 6)
    targets = rng.integers(0, 6, size=4)
    run(lambda: cross_entropy(logits, targets), [logits])
    fr = t(2, 8)
    run(lambda: (rfft_magnitude(fr)), [fr])
    cx, cw, cb = t(4, 7), t(6, 2, 3), t(6)
    run(lambda: (conv1d(cx, cw, cb, groups=2, dilation=2,
                                padding="causal")), [cx, cw, cb])
    run(lambda: (conv1d(cx, cw, cb, groups=2, dilation=1,
                                padding="same")), [cx, cw, cb])
    tx, tw, tb = t(3, 4), t(3, 2, 6), t(2)
    run(lambda: (conv_transpose1d(tx, tw, tb, stride=3)), [tx, tw, tb])

    att = CausalSelfAttention(6, 2, np.random.default_rng(seed + 1000))
    ax = t(4, 6)
    run(lambda: (att(ax)), [ax] + att.parameters())
    cell = LSTMCell(3, 4, np.random.default_rng(seed + 2000))
    lx, lh, lc = t(1, 3), t(1, 4), t(1, 4)
    run(lambda: (add(cell.step(lx, lh, lc)[0],
                             cell.step(lx, lh, lc)[1])),
        [lx, lh, lc] + cell.parameters())
    return worst


def naive_dft_magnitude(frame: np.ndarray) -> np.ndarray:
    """O(N^2) DFT magnitude of one real frame, positive frequencies."""
    n = frame.shape[0]
    bins = n // 2 + 1
    out = np.zeros(bins)
    for k in range(bins):
        re = 0.0
        im = 0.0
        for t in range(n):
            ang = 2.0 * np.pi * k * t / n
            re += frame[t] * np.cos(ang)
            im -= frame[t] * np.sin(ang)
        out[k] = np.hypot(re, im)
    return out


def exact_choice_probability(controller, step: int, choice: int) -> float:
    """Exact marginal P(decision at `step` == choice) by enumerating every
    prefix path. Cost 4**step replays; use only for small step values and
    spaces without masking."""
    from itertools import product

    total = 0.0
    steps = len(controller.schedule)
    for prefix in product(range(4), repeat=step):
        forced = list(prefix) + [choice] + [0] * (steps - step - 1)
        _, _, _, probs = controller.step_probabilities(
            lambda s, p, m: forced[s])
        p_prefix = 1.0
        for i, c in enumerate(prefix):
            p_prefix *= probs[i][c]
        total += p_prefix * probs[step][choice]
    return total


def run_planted_bandit(seed: int, *, o: int = 8, gamma: float = 0.9,
                       lr: float = 0.2, max_updates: int = 200,
                       target: float = 0.9, probe_every: int = 5):
    """Reward 1 iff phoneme_encoder.layers picks its highest option; returns
    (updates_to_target or None, final probed probability)."""
    from fasttalker.nas import Controller, SearchSpace, baseline_update, \
        reinforce_update
    from fasttalker.rng import stream

    space = SearchSpace()
    controller = Controller(space, stream(seed, "bandit", "init"))
    sampler = stream(seed, "bandit", "sampling")
    baseline = 0.0
    best_step, best_choice = 1, 3
    prob = exact_choice_probability(controller, best_step, best_choice)
    for update in range(1, max_updates + 1):
        batch = []
        for _ in range(o):
            _, log_probs, indices = controller.sample(sampler)
            reward = 1.0 if indices[best_step] == best_choice else 0.0
            batch.append((log_probs, reward))
        rewards = [r for _, r in batch]
        reinforce_update(controller, batch, baseline, lr)
        baseline = baseline_update(baseline, rewards, gamma)
        if update % probe_every == 0 or update == max_updates:
            prob = exact_choice_probability(controller, best_step,
                                            best_choice)
            if prob > target:
                return update, prob
    return None, prob
