"""Conv kernel backend selection.

The compiled Cython module is preferred when importable; otherwise the numpy
fallback is used. FASTTALKER_KERNELS forces a choice:

  auto (default) | compiled | numpy

Forcing `compiled` when the extension was not built raises at import. Both
backends expose the same six functions and can be fetched explicitly via
get_impl() for parity tests and benchmarks.
"""

from __future__ import annotations

import os

from ...errors import ConfigError
from . import numpy_impl

_FUNCS = (
    "conv1d_forward",
    "conv1d_grad_input",
    "conv1d_grad_weight",
    "conv_transpose1d_forward",
    "conv_transpose1d_grad_input",
    "conv_transpose1d_grad_weight",
)

try:
    from . import _conv as _compiled
except ImportError:
    _compiled = None


def _select():
    choice = os.environ.get("FASTTALKER_KERNELS", "auto")
    if choice in ("auto", ""):
        return (_compiled, "compiled") if _compiled is not None else (numpy_impl, "numpy")
    if choice in ("compiled", "c", "cython"):
        if _compiled is None:
            raise ConfigError("FASTTALKER_KERNELS=compiled but the extension is not built")
        return _compiled, "compiled"
    if choice in ("numpy", "py", "python"):
        return numpy_impl, "numpy"
    raise ConfigError(f"FASTTALKER_KERNELS={choice!r} not one of auto|compiled|numpy")


_impl, _backend_name = _select()


def backend() -> str:
    """Name of the active backend ('compiled' or 'numpy')."""
    return _backend_name


def available_backends() -> tuple[str, ...]:
    return ("numpy", "compiled") if _compiled is not None else ("numpy",)


def get_impl(name: str):
    if name == "numpy":
        return numpy_impl
    if name == "compiled":
        if _compiled is None:
            raise ConfigError("compiled kernels are not built")
        return _compiled
    raise ConfigError(f"unknown kernel backend {name!r}")


conv1d_forward = _impl.conv1d_forward
conv1d_grad_input = _impl.conv1d_grad_input
conv1d_grad_weight = _impl.conv1d_grad_weight
conv_transpose1d_forward = _impl.conv_transpose1d_forward
conv_transpose1d_grad_input = _impl.conv_transpose1d_grad_input
conv_transpose1d_grad_weight = _impl.conv_transpose1d_grad_weight

__all__ = list(_FUNCS) + ["backend", "available_backends", "get_impl"]
