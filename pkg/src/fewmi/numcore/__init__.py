"""Minimal dense tensor arithmetic with reverse-mode differentiation."""

from .ops import (
    concat_channels,
    conv2d,
    dense,
    global_avg_pool_time,
    glorot_uniform,
    maxpool_time,
    relu,
    sigmoid,
    softmax,
    stack_scalars,
)
from .optim import AdamState, ParamStore, adam_step
from .tensor import Tensor, debug_checks_enabled, set_debug_checks

__all__ = [
    "AdamState",
    "ParamStore",
    "Tensor",
    "adam_step",
    "concat_channels",
    "conv2d",
    "debug_checks_enabled",
    "dense",
    "global_avg_pool_time",
    "glorot_uniform",
    "maxpool_time",
    "relu",
    "sigmoid",
    "set_debug_checks",
    "softmax",
    "stack_scalars",
]
