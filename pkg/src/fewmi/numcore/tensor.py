"""Dense float64 tensors with reverse-mode automatic differentiation.

Values are numpy arrays; the computation graph is held by the tensors
themselves (each op output keeps references to its inputs plus a closure
that pushes gradients backwards). ``loss.backward()`` topologically sorts
the graph and runs the closures.

Op outputs skip finiteness validation unless debug checks are enabled via
:func:`set_debug_checks`; user-constructed tensors are always validated.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import DimensionError, NumericalError, UsageError

_DEBUG_CHECKS = False


def set_debug_checks(enabled: bool) -> None:
    """Validate every op output for NaN/Inf (slow; off by default)."""
    global _DEBUG_CHECKS
    _DEBUG_CHECKS = bool(enabled)


def debug_checks_enabled() -> bool:
    return _DEBUG_CHECKS


class Tensor:
    """A float64 array plus the bookkeeping needed for backprop.

    Tensors are immutable values: ops return new tensors and never write
    into their inputs. Parameter tensors (``requires_grad=True`` leaves)
    are the one exception -- the optimizer rebinds their ``data``.
    """

    __slots__ = ("data", "grad", "requires_grad", "_prev", "_backward", "_op")

    def __init__(self, values, requires_grad: bool = False):
        data = np.asarray(values, dtype=np.float64)
        if not np.all(np.isfinite(data)):
            raise NumericalError("tensor construction rejected non-finite values")
        self.data = data
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._prev: tuple[Tensor, ...] = ()
        self._backward: Callable[[], None] | None = None
        self._op = "leaf"

    @classmethod
    def _from_op(
        cls,
        data: np.ndarray,
        parents: Sequence["Tensor"],
        backward: Callable[[], None],
        op: str,
    ) -> "Tensor":
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.requires_grad = any(p.requires_grad for p in parents)
        out._prev = tuple(parents) if out.requires_grad else ()
        out._backward = backward if out.requires_grad else None
        out._op = op
        if _DEBUG_CHECKS and not np.all(np.isfinite(data)):
            raise NumericalError(f"non-finite values produced by op '{op}'")
        return out

    # -- graph -----------------------------------------------------------

    def _acc(self, g: np.ndarray) -> None:
        """Accumulate a gradient contribution (shape must already match)."""
        if not self.requires_grad:
            return
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def backward(self, seed: float = 1.0) -> None:
        """Backpropagate from a scalar node, accumulating into ``.grad``."""
        if self.data.shape != ():
            raise UsageError(
                f"backward requires a scalar node, got shape {self.shape}"
            )
        if not self.requires_grad:
            raise UsageError(
                "backward called on a node with no trainable inputs "
                "(no forward graph was recorded)"
            )
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._prev:
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))
        self._acc(np.asarray(seed, dtype=np.float64))
        for node in reversed(order):
            if node._backward is not None:
                node._backward()

    # -- introspection ---------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise UsageError(f"item() on tensor of shape {self.shape}")
        return float(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self._op!r})"

    # -- elementwise arithmetic -------------------------------------------

    def __add__(self, other: "Tensor") -> "Tensor":
        other = _as_tensor(other)
        if self.data.shape != other.data.shape:
            raise DimensionError(
                f"add: shapes {self.shape} and {other.shape} differ"
            )
        a, b = self, other
        out = Tensor._from_op(a.data + b.data, (a, b), None, "add")

        def _bwd():
            a._acc(out.grad)
            b._acc(out.grad)

        out._backward = _bwd
        return out

    def __neg__(self) -> "Tensor":
        a = self
        out = Tensor._from_op(-a.data, (a,), None, "neg")

        def _bwd():
            a._acc(-out.grad)

        out._backward = _bwd
        return out

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-_as_tensor(other))

    def __mul__(self, other) -> "Tensor":
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        other = _as_tensor(other)
        a, b = self, other
        if a.data.shape != b.data.shape and a.data.shape != () and b.data.shape != ():
            raise DimensionError(
                f"mul: shapes {a.shape} and {b.shape} are neither equal nor scalar"
            )
        out = Tensor._from_op(a.data * b.data, (a, b), None, "mul")

        def _bwd():
            ga = out.grad * b.data
            gb = out.grad * a.data
            a._acc(ga if a.data.shape == out.data.shape else np.sum(ga))
            b._acc(gb if b.data.shape == out.data.shape else np.sum(gb))

        out._backward = _bwd
        return out

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Tensor":
        if isinstance(other, (int, float)):
            return self.scale(1.0 / float(other))
        other = _as_tensor(other)
        if other.data.shape != ():
            raise DimensionError(
                f"div: divisor must be a scalar tensor, got shape {other.shape}"
            )
        a, b = self, other
        out = Tensor._from_op(a.data / b.data, (a, b), None, "div")

        def _bwd():
            a._acc(out.grad / b.data)
            b._acc(-np.sum(out.grad * a.data) / (b.data * b.data))

        out._backward = _bwd
        return out

    def scale(self, c: float) -> "Tensor":
        a = self
        out = Tensor._from_op(a.data * c, (a,), None, "scale")

        def _bwd():
            a._acc(out.grad * c)

        out._backward = _bwd
        return out

    def sum(self) -> "Tensor":
        a = self
        out = Tensor._from_op(np.asarray(a.data.sum()), (a,), None, "sum")

        def _bwd():
            a._acc(np.broadcast_to(out.grad, a.data.shape).copy()
                   if a.data.shape != () else out.grad)

        out._backward = _bwd
        return out

    def log(self, floor: float = 1e-30) -> "Tensor":
        """Natural log with an underflow floor on the argument."""
        a = self
        clamped = np.maximum(a.data, floor)
        out = Tensor._from_op(np.log(clamped), (a,), None, "log")

        def _bwd():
            a._acc(out.grad / clamped)

        out._backward = _bwd
        return out

    def reshape(self, *shape: int) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        a = self
        try:
            data = a.data.reshape(shape)
        except ValueError as exc:
            raise DimensionError(
                f"reshape: cannot view {a.shape} as {shape}"
            ) from exc
        out = Tensor._from_op(data, (a,), None, "reshape")

        def _bwd():
            a._acc(out.grad.reshape(a.data.shape))

        out._backward = _bwd
        return out


def _as_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value)
