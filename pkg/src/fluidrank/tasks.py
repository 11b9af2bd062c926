"""Latent task-information spaces: axis cardinalities and prior.

A task presents a latent value theta drawn from a prior over the product of
its axes. Theta values are indexed lexicographically (first axis major), so
flat index 0 is the all-zeros value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product


@dataclass(frozen=True)
class TaskSpec:
    id: str
    axes: tuple[int, ...]
    prior: tuple[float, ...]

    def __post_init__(self):
        if any(k < 2 for k in self.axes):
            raise ValueError(f"every axis needs at least 2 values, got {self.axes}")
        size = self.size
        if len(self.prior) != size:
            raise ValueError(f"prior length {len(self.prior)} != theta space size {size}")
        if any(p < 0 for p in self.prior):
            raise ValueError("prior entries must be non-negative")
        total = math.fsum(self.prior)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"prior must sum to 1 within 1e-12, got {total}")

    @property
    def size(self) -> int:
        out = 1
        for k in self.axes:
            out *= k
        return out

    def theta_values(self) -> list[tuple[int, ...]]:
        return [tuple(v) for v in product(*(range(k) for k in self.axes))]

    def flat_index(self, theta) -> int:
        idx = 0
        for k, t in zip(self.axes, theta):
            if not (0 <= t < k):
                raise ValueError(f"theta {theta} out of range for axes {self.axes}")
            idx = idx * k + int(t)
        return idx

    def unflatten(self, idx: int) -> tuple[int, ...]:
        out = []
        for k in reversed(self.axes):
            out.append(idx % k)
            idx //= k
        return tuple(reversed(out))

    def prior_entropy_nats(self) -> float:
        return -math.fsum(p * math.log(p) for p in self.prior if p > 0)


def uniform_task(task_id: str, axes) -> TaskSpec:
    axes = tuple(int(k) for k in axes)
    size = 1
    for k in axes:
        size *= k
    return TaskSpec(id=task_id, axes=axes, prior=tuple(1.0 / size for _ in range(size)))
