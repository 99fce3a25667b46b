"""Benchmark the compiled conv kernels against the numpy fallback.

Runs every kernel entry point on shapes taken from the hot paths of the
model (encoder stacks, dilated waveform convs, strided upsampling) and
prints median wall times plus the speedup. Usage:

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fasttalker.numerics.kernels import available_backends, get_impl

CASES = [
    # (label, function, args builder)
    ("encoder conv  c=256 g=4 k=3 T=64",
     "conv1d", dict(c_in=256, c_out=256, groups=4, kernel=3, dilation=1,
                    t=64)),
    ("predictor conv c=32 g=1 k=3 T=64",
     "conv1d", dict(c_in=32, c_out=32, groups=1, kernel=3, dilation=1,
                    t=64)),
    ("waveform conv c=128 g=1 k=3 d=8 T=512",
     "conv1d", dict(c_in=128, c_out=128, groups=1, kernel=3, dilation=8,
                    t=512)),
    ("upsample x4   c=128->64 k=8 T=128",
     "conv_transpose", dict(c_in=128, c_out=64, kernel=8, stride=4, t=128)),
    ("upsample x8   c=64->32 k=16 T=512",
     "conv_transpose", dict(c_in=64, c_out=32, kernel=16, stride=8, t=512)),
]


def build_conv1d(spec, rng):
    x = rng.standard_normal((spec["c_in"], spec["t"]))
    w = rng.standard_normal((spec["c_out"], spec["c_in"] // spec["groups"],
                             spec["kernel"]))
    pad = (spec["kernel"] - 1) * spec["dilation"]
    args = (x, w, spec["groups"], spec["dilation"], pad, 0)
    dy_shape = (spec["c_out"], spec["t"])
    return args, dy_shape


def build_conv_transpose(spec, rng):
    x = rng.standard_normal((spec["c_in"], spec["t"]))
    w = rng.standard_normal((spec["c_in"], spec["c_out"], spec["kernel"]))
    args = (x, w, spec["stride"])
    t_out = (spec["t"] - 1) * spec["stride"] + spec["kernel"]
    dy_shape = (spec["c_out"], t_out)
    return args, dy_shape


def median_time(fn, repeats):
    times = []
    fn()  # warm-up
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def calls_for(kind, impl, inputs):
    """All entry points of one family as zero-arg closures over shared
    inputs, so every backend computes on identical data."""
    if kind == "conv1d":
        (x, w, groups, dilation, pad, _), dy = inputs
        return {
            "forward": lambda: impl.conv1d_forward(x, w, groups, dilation,
                                                   pad, 0),
            "grad_input": lambda: impl.conv1d_grad_input(
                dy, w, groups, dilation, pad, x.shape[1]),
            "grad_weight": lambda: impl.conv1d_grad_weight(
                dy, x, w.shape, groups, dilation, pad, 0),
        }
    (x, w, stride), dy = inputs
    return {
        "forward": lambda: impl.conv_transpose1d_forward(x, w, stride),
        "grad_input": lambda: impl.conv_transpose1d_grad_input(dy, w, stride),
        "grad_weight": lambda: impl.conv_transpose1d_grad_weight(
            dy, x, w.shape, stride),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=9)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    if "compiled" not in backends:
        print("compiled extension not built; timing numpy only")

    header = f"{'case':<42}{'entry':<12}" + "".join(
        f"{b + ' (ms)':>14}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    for label, kind, spec in CASES:
        rng = np.random.default_rng(0)
        build = build_conv1d if kind == "conv1d" else build_conv_transpose
        call_args, dy_shape = build(spec, rng)
        inputs = (call_args, rng.standard_normal(dy_shape))
        per_backend = {b: calls_for(kind, get_impl(b), inputs)
                       for b in backends}
        # check parity while we are here
        for entry in per_backend[backends[0]]:
            outs = [per_backend[b][entry]() for b in backends]
            for out in outs[1:]:
                np.testing.assert_allclose(out, outs[0], rtol=1e-10,
                                           atol=1e-12)
        for entry in per_backend[backends[0]]:
            row = f"{label:<42}{entry:<12}"
            times = {b: median_time(per_backend[b][entry], args.repeats)
                     for b in backends}
            for b in backends:
                row += f"{times[b] * 1e3:>14.3f}"
            if len(backends) == 2:
                row += f"{times['numpy'] / times['compiled']:>10.2f}x"
            print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
