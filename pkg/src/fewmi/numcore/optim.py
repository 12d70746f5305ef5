"""Named parameter storage and the Adam optimizer."""

from __future__ import annotations

import numpy as np

from ..errors import UsageError
from .tensor import Tensor


class AdamState:
    """First/second moment estimates and step counter for one parameter."""

    __slots__ = ("m", "v", "step")

    def __init__(self, m: np.ndarray, v: np.ndarray, step: int = 0):
        self.m = m
        self.v = v
        self.step = step


class ParamStore:
    """Maps stable string paths to parameter tensors plus their Adam state.

    Iteration order is registration order, which fixes the (deterministic)
    order of optimizer updates and checkpoint layout.
    """

    def __init__(self):
        self._params: dict[str, Tensor] = {}
        self._state: dict[str, AdamState] = {}

    def register(self, name: str, values) -> Tensor:
        if name in self._params:
            raise UsageError(f"duplicate parameter path '{name}'")
        t = Tensor(np.array(values, dtype=np.float64), requires_grad=True)
        self._params[name] = t
        self._state[name] = AdamState(np.zeros_like(t.data), np.zeros_like(t.data))
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> tuple[str, ...]:
        return tuple(self._params)

    def items(self):
        return self._params.items()

    def state(self, name: str) -> AdamState:
        return self._state[name]

    def zero_grad(self) -> None:
        """Reset all gradients to zero arrays (populating missing ones)."""
        for t in self._params.values():
            t.grad = np.zeros_like(t.data)

    def clear_grad(self) -> None:
        for t in self._params.values():
            t.grad = None

    def value_dict(self) -> dict[str, np.ndarray]:
        return {name: t.data.copy() for name, t in self._params.items()}

    def load_values(self, values: dict[str, np.ndarray]) -> None:
        if set(values) != set(self._params):
            missing = set(self._params) - set(values)
            extra = set(values) - set(self._params)
            raise UsageError(
                f"parameter set mismatch (missing={sorted(missing)}, extra={sorted(extra)})"
            )
        for name, arr in values.items():
            t = self._params[name]
            arr = np.asarray(arr, dtype=np.float64)
            if arr.shape != t.data.shape:
                raise UsageError(
                    f"shape mismatch for '{name}': {arr.shape} != {t.data.shape}"
                )
            t.data = arr.copy()

    def adam_dict(self) -> dict[str, tuple[np.ndarray, np.ndarray, int]]:
        return {
            name: (st.m.copy(), st.v.copy(), st.step)
            for name, st in self._state.items()
        }

    def load_adam(self, state: dict[str, tuple[np.ndarray, np.ndarray, int]]) -> None:
        for name, (m, v, step) in state.items():
            if name not in self._state:
                raise UsageError(f"adam state for unknown parameter '{name}'")
            slot = self._state[name]
            slot.m = np.asarray(m, dtype=np.float64).copy()
            slot.v = np.asarray(v, dtype=np.float64).copy()
            slot.step = int(step)

    def snapshot(self) -> dict:
        """Deep copy of values and optimizer state, for checkpointing."""
        return {"values": self.value_dict(), "adam": self.adam_dict()}

    def restore(self, snap: dict) -> None:
        self.load_values(snap["values"])
        self.load_adam(snap["adam"])


def adam_step(
    store: ParamStore,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """One Adam update with bias correction over every parameter."""
    for name, p in store.items():
        g = p.grad
        if g is None:
            raise UsageError(f"adam_step: missing gradient for parameter '{name}'")
        st = store.state(name)
        st.step += 1
        st.m = beta1 * st.m + (1.0 - beta1) * g
        st.v = beta2 * st.v + (1.0 - beta2) * (g * g)
        m_hat = st.m / (1.0 - beta1**st.step)
        v_hat = st.v / (1.0 - beta2**st.step)
        p.data = p.data - lr * m_hat / (np.sqrt(v_hat) + eps)
