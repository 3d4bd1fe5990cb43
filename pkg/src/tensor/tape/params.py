from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from tensor.errors import ShapeError, ConfigError
from .core import Tape, Tensor

# "uniform" | "kaiming" | "zeros" | "ones" | a constant fill value
Init = Union[str, float]


def _key(seed: int, name: str) -> int:
    digest = hashlib.sha256(f"{seed}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "little")


def named_generator(seed: int, name: str) -> np.random.Generator:
    """A counter-based (Philox) generator keyed by (seed, name) only."""
    return np.random.Generator(np.random.Philox(key=_key(seed, name)))


class ParamStore:
    """
    Named learnable arrays plus one gradient buffer of identical shape each.

    Parameters are created lazily on first request. Initialization depends
    only on (name, shape, seed), so the order in which a forward pass asks
    for parameters never changes their values.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self.values: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self.frozen: Set[str] = set()

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.values))

    def names(self) -> List[str]:
        return sorted(self.values)

    def get(self, name: str, shape: Sequence[int], init: Init = "uniform",
            fan_in: Optional[int] = None) -> np.ndarray:
        shape = tuple(int(s) for s in shape)
        value = self.values.get(name)
        if value is not None:
            if value.shape != shape:
                raise ShapeError(
                    f"Parameter '{name}' exists with shape {value.shape}, requested {shape}."
                )
            return value
        value = self._initial(name, shape, init, fan_in)
        self.values[name] = value
        self.grads[name] = np.zeros_like(value)
        return value

    def set(self, name: str, value) -> None:
        """Overwrite (or create) a parameter with an explicit value."""
        array = np.array(value, dtype=np.float64)
        current = self.values.get(name)
        if current is not None and current.shape != array.shape:
            raise ShapeError(
                f"Parameter '{name}' has shape {current.shape}, cannot assign {array.shape}."
            )
        self.values[name] = array
        self.grads[name] = np.zeros_like(array)

    def _initial(self, name: str, shape: Tuple[int, ...], init: Init,
                 fan_in: Optional[int]) -> np.ndarray:
        if init in ("uniform", "kaiming"):
            if fan_in is None:
                fan_in = int(np.prod(shape[1:])) if len(shape) > 1 else (shape[0] if shape else 1)
            # kaiming: He-uniform for ReLU stacks, variance 2 / fan_in
            gain = np.sqrt(6.0) if init == "kaiming" else 1.0
            bound = gain / np.sqrt(max(fan_in, 1))
            return named_generator(self.seed, name).uniform(-bound, bound, size=shape)
        if init == "zeros":
            return np.zeros(shape)
        if init == "ones":
            return np.ones(shape)
        if isinstance(init, (int, float)):
            return np.full(shape, float(init))
        raise ConfigError(f"Unknown initializer for '{name}': {init!r}")

    # --- gradients ---

    def accumulate(self, name: str, grad: np.ndarray) -> None:
        buffer = self.grads[name]
        buffer += np.reshape(grad, buffer.shape)

    def zero_grad(self) -> None:
        for buffer in self.grads.values():
            buffer.fill(0.0)

    # --- freezing ---

    def freeze(self, *prefixes: str) -> None:
        self.frozen.update(prefixes)

    def is_frozen(self, name: str) -> bool:
        return any(name == p or name.startswith(p + ".") for p in self.frozen)

    def trainable(self) -> List[str]:
        return [n for n in self.names() if not self.is_frozen(n)]

    # --- persistence ---

    def copy(self) -> "ParamStore":
        clone = ParamStore(self.seed)
        clone.values = {k: v.copy() for k, v in self.values.items()}
        clone.grads = {k: v.copy() for k, v in self.grads.items()}
        clone.frozen = set(self.frozen)
        return clone

    def save(self, path: Union[str, Path]) -> None:
        arrays = {f"param:{name}": value for name, value in self.values.items()}
        arrays["meta:seed"] = np.array(self.seed)
        arrays["meta:frozen"] = np.array(sorted(self.frozen), dtype=str)
        with open(path, "wb") as f:
            np.savez(f, **arrays)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ParamStore":
        with np.load(path) as archive:
            store = cls(int(archive["meta:seed"]))
            store.frozen = set(str(p) for p in archive["meta:frozen"])
            for key in archive.files:
                if key.startswith("param:"):
                    store.set(key[len("param:"):], archive[key])
        return store


@dataclass(frozen=True)
class ParamScope:
    """
    A view on a ParamStore under a name prefix, optionally recording on a tape.

    Forward functions take a scope instead of a store so the same code runs
    with gradients (tape given) or as a plain evaluation (tape None).
    """
    store: ParamStore
    tape: Optional[Tape] = None
    prefix: str = ""

    def key(self, name: str) -> str:
        return f"{self.prefix}.{name}" if self.prefix else name

    def child(self, name: str) -> "ParamScope":
        return ParamScope(self.store, self.tape, self.key(name))

    def detached(self) -> "ParamScope":
        return ParamScope(self.store, None, self.prefix)

    def get(self, name: str, shape: Sequence[int], init: Init = "uniform",
            fan_in: Optional[int] = None) -> Tensor:
        full = self.key(name)
        value = self.store.get(full, shape, init, fan_in)
        if self.tape is None:
            return Tensor(value)
        return self.tape.watch(value, full)
