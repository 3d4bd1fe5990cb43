"""
tape - define-by-run reverse-mode gradients over float64 numpy arrays.

A Tensor wraps an array. A Tensor that belongs to a Tape records every
primitive applied to it; `backward` replays those records newest-first and
pushes the gradients of watched parameters into a ParamStore.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from tensor.errors import ContractError

if TYPE_CHECKING:
    from .params import ParamStore

# A vector-Jacobian product: output gradient -> one gradient (or None) per input.
VJP = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """A float64 array, optionally attached to a Tape."""

    __slots__ = ("data", "tape", "uid")
    # ndarray op Tensor defers to the reflected Tensor operator.
    __array_ufunc__ = None

    def __init__(self, data, tape: Optional["Tape"] = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.tape = tape
        self.uid = tape._next_uid() if tape is not None else -1

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def __repr__(self) -> str:
        where = "constant" if self.tape is None else f"uid={self.uid}"
        return f"Tensor(shape={self.shape}, {where})"

    # Operator sugar; the primitives live in tensor.ops.

    def __add__(self, other):
        from tensor.ops import add
        return add(self, other)

    def __radd__(self, other):
        from tensor.ops import add
        return add(other, self)

    def __sub__(self, other):
        from tensor.ops import sub
        return sub(self, other)

    def __rsub__(self, other):
        from tensor.ops import sub
        return sub(other, self)

    def __mul__(self, other):
        from tensor.ops import mul
        return mul(self, other)

    def __rmul__(self, other):
        from tensor.ops import mul
        return mul(other, self)

    def __truediv__(self, other):
        from tensor.ops import div
        return div(self, other)

    def __rtruediv__(self, other):
        from tensor.ops import div
        return div(other, self)

    def __neg__(self):
        from tensor.ops import neg
        return neg(self)


@dataclass(frozen=True)
class Record:
    """One primitive application: op id, input uids, output uid and its VJP.

    The activations needed for the backward pass are captured by `vjp`.
    An input uid of -1 marks a constant operand.
    """
    op: str
    inputs: Tuple[int, ...]
    output: int
    vjp: VJP = field(repr=False, compare=False)


class Tape:
    """Ordered record of primitive applications for one forward pass."""

    def __init__(self) -> None:
        self.records: List[Record] = []
        self.params: Dict[int, str] = {}
        self.visited: List[int] = []
        self._leaves: Dict[str, Tensor] = {}
        self._uid = 0

    def _next_uid(self) -> int:
        self._uid += 1
        return self._uid

    def __len__(self) -> int:
        return len(self.records)

    def watch(self, value: np.ndarray, name: str) -> Tensor:
        """Return the leaf Tensor standing for parameter `name` on this tape."""
        leaf = self._leaves.get(name)
        if leaf is None or leaf.data is not value:
            leaf = Tensor(value, self)
            self._leaves[name] = leaf
            self.params[leaf.uid] = name
        return leaf

    def record(self, op: str, inputs: Sequence[Tensor], output: np.ndarray, vjp: VJP) -> Tensor:
        out = Tensor(output, self)
        ids = tuple(t.uid if t.tape is self else -1 for t in inputs)
        self.records.append(Record(op, ids, out.uid, vjp))
        return out

    def gradients(self, loss: Tensor) -> Dict[int, np.ndarray]:
        """Gradient of the scalar `loss` with respect to every node on the tape."""
        if loss.tape is not self:
            raise ContractError("Loss node was not recorded on this tape.")
        if loss.size != 1:
            raise ContractError(f"Loss node must be scalar, got shape {loss.shape}.")

        grads: Dict[int, np.ndarray] = {loss.uid: np.ones_like(loss.data)}
        self.visited = []
        for index in range(len(self.records) - 1, -1, -1):
            record = self.records[index]
            upstream = grads.get(record.output)
            if upstream is None:
                continue
            self.visited.append(index)
            for uid, grad in zip(record.inputs, record.vjp(upstream)):
                if uid < 0 or grad is None:
                    continue
                if uid in grads:
                    grads[uid] = grads[uid] + grad
                else:
                    grads[uid] = grad
        return grads


def backward(tape: Tape, loss: Tensor, store: "ParamStore") -> "ParamStore":
    """
    Accumulate d(loss)/d(theta) into `store.grads` for every watched parameter.

    Calling twice without `store.zero_grad()` accumulates. Parameters that
    the loss does not depend on keep their current (zero) buffers.
    """
    grads = tape.gradients(loss)
    for uid, name in tape.params.items():
        grad = grads.get(uid)
        if grad is not None:
            store.accumulate(name, grad)
    return store
