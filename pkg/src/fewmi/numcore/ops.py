"""Layer primitives on top of the autodiff tensor.

All ops accept either a single sample or a batch (one extra leading axis);
shapes below are written for the single-sample case. Convolutions are
stride-1 cross-correlations, the convention used throughout deep learning.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError
from .tensor import Tensor

PADDING_MODES = ("valid", "same-time")


def conv2d(x: Tensor, kernel: Tensor, bias: Tensor, padding: str = "valid") -> Tensor:
    """2D convolution over [T, E, Cin] with kernel [kT, kE, Cin, Cout].

    "valid" shrinks both axes; "same-time" zero-pads the time axis
    symmetrically so T is preserved (the electrode axis always shrinks).
    """
    if padding not in PADDING_MODES:
        raise DimensionError(f"conv2d: unknown padding {padding!r}")
    if kernel.data.ndim != 4:
        raise DimensionError(
            f"conv2d: kernel must be rank 4 [kT,kE,Cin,Cout], got {kernel.shape}"
        )
    batched = x.data.ndim == 4
    if not batched and x.data.ndim != 3:
        raise DimensionError(
            f"conv2d: input must be rank 3 [T,E,Cin] (or batched rank 4), got {x.shape}"
        )
    xd = x.data if batched else x.data[None]
    nb, t_in, e_in, c_in = xd.shape
    k_t, k_e, k_cin, c_out = kernel.data.shape
    if k_cin != c_in:
        raise DimensionError(
            f"conv2d: channel axis mismatch, kernel expects Cin={k_cin}, input has {c_in}"
        )
    if bias.data.shape != (c_out,):
        raise DimensionError(
            f"conv2d: bias shape {bias.shape} != ({c_out},) on channel axis"
        )
    if k_e > e_in:
        raise DimensionError(
            f"conv2d: kernel electrode extent {k_e} exceeds input extent {e_in}"
        )
    if padding == "same-time":
        pad = k_t - 1
        pad_lo, pad_hi = pad // 2, pad - pad // 2
        xp = np.pad(xd, ((0, 0), (pad_lo, pad_hi), (0, 0), (0, 0)))
    else:
        if k_t > t_in:
            raise DimensionError(
                f"conv2d: kernel time extent {k_t} exceeds input extent {t_in}"
            )
        pad_lo = pad_hi = 0
        xp = xd
    t_pad = xp.shape[1]
    t_out = t_pad - k_t + 1
    e_out = e_in - k_e + 1

    win = sliding_window_view(xp, (k_t, k_e), axis=(1, 2))  # [B,To,Eo,Cin,kT,kE]
    cols = win.transpose(0, 1, 2, 4, 5, 3).reshape(nb * t_out * e_out, k_t * k_e * c_in)
    kflat = kernel.data.reshape(k_t * k_e * c_in, c_out)
    out_data = (cols @ kflat + bias.data).reshape(nb, t_out, e_out, c_out)
    if not batched:
        out_data = out_data[0]
    out = Tensor._from_op(out_data, (x, kernel, bias), None, "conv2d")

    def _bwd():
        gy = out.grad.reshape(nb * t_out * e_out, c_out)
        kernel._acc((cols.T @ gy).reshape(kernel.data.shape))
        bias._acc(gy.sum(axis=0))
        if x.requires_grad:
            dcols = (gy @ kflat.T).reshape(nb, t_out, e_out, k_t, k_e, c_in)
            dxp = np.zeros_like(xp)
            for i in range(k_t):
                for j in range(k_e):
                    dxp[:, i : i + t_out, j : j + e_out, :] += dcols[:, :, :, i, j, :]
            dx = dxp[:, pad_lo : t_pad - pad_hi, :, :]
            x._acc(dx if batched else dx[0])

    out._backward = _bwd
    return out


def maxpool_time(x: Tensor, window: int, stride: int) -> Tensor:
    """Max pooling along the time axis of [T, E, C]."""
    if window < 1 or stride < 1:
        raise DimensionError("maxpool_time: window and stride must be >= 1")
    batched = x.data.ndim == 4
    if not batched and x.data.ndim != 3:
        raise DimensionError(
            f"maxpool_time: input must be rank 3 [T,E,C] (or batched), got {x.shape}"
        )
    xd = x.data if batched else x.data[None]
    nb, t_in, e_in, c_in = xd.shape
    if window > t_in:
        raise DimensionError(
            f"maxpool_time: window {window} exceeds time extent {t_in}"
        )
    win = sliding_window_view(xd, window, axis=1)[:, ::stride]  # [B,To,E,C,w]
    out_data = win.max(axis=-1)
    arg = win.argmax(axis=-1)  # argmax recorded for backward; ties pick lowest index
    t_out = out_data.shape[1]
    out = Tensor._from_op(out_data if batched else out_data[0], (x,), None, "maxpool")

    def _bwd():
        gy = out.grad if batched else out.grad[None]
        dxd = np.zeros_like(xd)
        t_idx = arg + (np.arange(t_out) * stride)[None, :, None, None]
        b_idx = np.arange(nb)[:, None, None, None]
        e_idx = np.arange(e_in)[None, None, :, None]
        c_idx = np.arange(c_in)[None, None, None, :]
        np.add.at(dxd, (b_idx, t_idx, e_idx, c_idx), gy)
        x._acc(dxd if batched else dxd[0])

    out._backward = _bwd
    return out


def dense(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Affine map of a vector [D] (or batch [B, D]) by weight [D, M]."""
    if weight.data.ndim != 2:
        raise DimensionError(f"dense: weight must be rank 2, got {weight.shape}")
    d_in, m_out = weight.data.shape
    if x.data.ndim not in (1, 2) or x.data.shape[-1] != d_in:
        raise DimensionError(
            f"dense: input shape {x.shape} incompatible with weight rows {d_in}"
        )
    if bias.data.shape != (m_out,):
        raise DimensionError(f"dense: bias shape {bias.shape} != ({m_out},)")
    out = Tensor._from_op(x.data @ weight.data + bias.data, (x, weight, bias), None, "dense")

    def _bwd():
        gy = out.grad
        if x.data.ndim == 1:
            weight._acc(np.outer(x.data, gy))
            bias._acc(gy)
        else:
            weight._acc(x.data.T @ gy)
            bias._acc(gy.sum(axis=0))
        if x.requires_grad:
            x._acc(gy @ weight.data.T)

    out._backward = _bwd
    return out


def relu(x: Tensor) -> Tensor:
    out = Tensor._from_op(np.maximum(x.data, 0.0), (x,), None, "relu")

    def _bwd():
        x._acc(out.grad * (x.data > 0.0))

    out._backward = _bwd
    return out


def sigmoid(x: Tensor) -> Tensor:
    xd = x.data
    out_data = np.empty_like(xd)
    pos = xd >= 0
    out_data[pos] = 1.0 / (1.0 + np.exp(-xd[pos]))
    ex = np.exp(xd[~pos])
    out_data[~pos] = ex / (1.0 + ex)
    out = Tensor._from_op(out_data, (x,), None, "sigmoid")

    def _bwd():
        x._acc(out.grad * out_data * (1.0 - out_data))

    out._backward = _bwd
    return out


def softmax(x: Tensor) -> Tensor:
    """Softmax along the last axis, stabilized by max subtraction."""
    if x.data.ndim < 1 or x.data.shape[-1] < 1:
        raise DimensionError(f"softmax: need at least one entry, got shape {x.shape}")
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    ex = np.exp(shifted)
    out_data = ex / ex.sum(axis=-1, keepdims=True)
    out = Tensor._from_op(out_data, (x,), None, "softmax")

    def _bwd():
        gy = out.grad
        dot = (gy * out_data).sum(axis=-1, keepdims=True)
        x._acc(out_data * (gy - dot))

    out._backward = _bwd
    return out


def global_avg_pool_time(x: Tensor) -> Tensor:
    """Mean over the time axis of [T, E, C], flattened to [E*C]."""
    batched = x.data.ndim == 4
    if not batched and x.data.ndim != 3:
        raise DimensionError(
            f"global_avg_pool_time: input must be rank 3 [T,E,C] (or batched), got {x.shape}"
        )
    xd = x.data if batched else x.data[None]
    nb, t_in, e_in, c_in = xd.shape
    out_data = xd.mean(axis=1).reshape(nb, e_in * c_in)
    out = Tensor._from_op(out_data if batched else out_data[0], (x,), None, "gap_time")

    def _bwd():
        gy = (out.grad if batched else out.grad[None]).reshape(nb, 1, e_in, c_in)
        x._acc(
            np.broadcast_to(gy / t_in, xd.shape).copy()
            if batched
            else np.broadcast_to(gy / t_in, xd.shape)[0].copy()
        )

    out._backward = _bwd
    return out


def concat_channels(parts: Sequence[Tensor]) -> Tensor:
    """Concatenate tensors along the last (channel) axis."""
    if not parts:
        raise DimensionError("concat_channels: need at least one tensor")
    lead = parts[0].data.shape[:-1]
    for p in parts:
        if p.data.shape[:-1] != lead:
            raise DimensionError(
                f"concat_channels: leading shape {p.data.shape[:-1]} != {lead}"
            )
    out_data = np.concatenate([p.data for p in parts], axis=-1)
    out = Tensor._from_op(out_data, tuple(parts), None, "concat")
    widths = [p.data.shape[-1] for p in parts]

    def _bwd():
        offset = 0
        for p, w in zip(parts, widths):
            p._acc(out.grad[..., offset : offset + w])
            offset += w

    out._backward = _bwd
    return out


def stack_scalars(scalars: Sequence[Tensor]) -> Tensor:
    """Stack scalar tensors into a vector [N]."""
    for s in scalars:
        if s.data.shape != ():
            raise DimensionError(
                f"stack_scalars: expected scalars, got shape {s.shape}"
            )
    out = Tensor._from_op(
        np.stack([s.data for s in scalars]), tuple(scalars), None, "stack"
    )

    def _bwd():
        for i, s in enumerate(scalars):
            s._acc(out.grad[i])

    out._backward = _bwd
    return out


def glorot_uniform(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Variance-stable uniform init in +-sqrt(6 / (fan_in + fan_out))."""
    if len(shape) == 4:  # conv kernel [kT,kE,Cin,Cout]
        k_t, k_e, c_in, c_out = shape
        fan_in, fan_out = k_t * k_e * c_in, k_t * k_e * c_out
    elif len(shape) == 2:  # dense weight [D,M]
        fan_in, fan_out = shape
    else:
        fan_in = fan_out = int(np.prod(shape))
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)
