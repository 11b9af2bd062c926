"""Human model: saliency weights, maximum-entropy likelihood, Bayesian decoding.

The model connects a latent task value theta to the signal the person
expects: each task axis maps onto its assigned channel through the monotone
normalized-coordinate map h, and the probability of perceiving signal s
when theta is intended falls off exponentially with the saliency-weighted
squared distance between s and h(theta). beta scales overall sensitivity;
the per-channel weights come from the user's preference sliders.

Numerical notes: coordinate differences are computed from exact integer
numerators over a common denominator, which makes mirror-symmetric values
bitwise equal; row normalization subtracts the row's minimum exponent
before exponentiation so arbitrarily large beta cannot underflow a whole
row; sums use math.fsum so results do not depend on summation order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingPreference
from .signals import Configuration, SignalPoint, make_point, signal_space
from .tasks import TaskSpec

DEFAULT_ALPHA = 0.25

# Default sensitivity in normalized coordinates. Exact enumeration over the
# default catalog shows the pressure-area pair overtakes the coarser pairs
# only once beta * w exceeds roughly 15.3; below that the nearly noiseless
# 2-level channel dominates and the ranking inverts. 24 sits comfortably in
# the band where the fine-channel ordering holds while a preference slider
# at zero (weight floor 0.2) still flips the ranking away from that channel.
DEFAULT_BETA = 24.0


@dataclass(frozen=True)
class PerceptionProfile:
    """Per-user sensitivity and modality preferences.

    preferences maps modality kind to the slider position in [0, 1]; alpha
    floors the derived saliency weights so no channel is weighted to zero.
    """

    preferences: dict[str, float] = field(default_factory=dict)
    beta: float = DEFAULT_BETA
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not (0 < self.alpha < 1):
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        for kind, p in self.preferences.items():
            if not (0 <= p <= 1):
                raise ValueError(f"preference for {kind!r} must be in [0, 1], got {p}")

    def to_dict(self) -> dict:
        out = {kind: val for kind, val in sorted(self.preferences.items())}
        out["alpha"] = self.alpha
        out["beta"] = self.beta
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PerceptionProfile":
        data = dict(data)
        alpha = data.pop("alpha", DEFAULT_ALPHA)
        beta = data.pop("beta", DEFAULT_BETA)
        return cls(preferences=data, beta=beta, alpha=alpha)

    @classmethod
    def load(cls, path) -> "PerceptionProfile":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def saliency_matrix(profile: PerceptionProfile, config: Configuration) -> tuple[float, ...]:
    """Diagonal saliency weights, one per channel: (P + alpha) / (1 + alpha).

    Weights land in [alpha/(1+alpha), 1]; a slider at 1 gives full weight.
    """
    weights = []
    for m in config.channels:
        if m.kind not in profile.preferences:
            raise MissingPreference(f"profile has no preference for modality {m.kind!r}")
        p = profile.preferences[m.kind]
        weights.append((p + profile.alpha) / (1.0 + profile.alpha))
    return tuple(weights)


def _check_binding(config: Configuration, task: TaskSpec) -> None:
    if config.dimensions != len(task.axes):
        raise ValueError(
            f"configuration {config.id} has {config.dimensions} channels but task "
            f"{task.id} has {len(task.axes)} axes"
        )


def expectation_coord(theta_j: int, cardinality: int) -> float:
    """Normalized channel coordinate the user expects for one axis value."""
    return theta_j / (cardinality - 1)


def likelihood_table(
    config: Configuration, task: TaskSpec, profile: PerceptionProfile
) -> list[list[float]]:
    """p(s | theta) for every theta (rows) and signal point (columns).

    Each row is normalized over the configuration's signal space and sums
    to 1 within 1e-12.
    """
    _check_binding(config, task)
    weights = saliency_matrix(profile, config)
    points = signal_space(config)
    level_counts = [m.level_count for m in config.channels]

    rows: list[list[float]] = []
    for theta in task.theta_values():
        exponents = []
        for pt in points:
            acc = 0.0
            for j, (k_j, l_j) in enumerate(zip(task.axes, level_counts)):
                # h(theta)_j - s_j as an exact integer numerator over a
                # common denominator; mirror images negate exactly.
                num = theta[j] * (l_j - 1) - pt.indices[j] * (k_j - 1)
                diff = num / ((k_j - 1) * (l_j - 1))
                acc += weights[j] * diff * diff
            exponents.append(profile.beta * acc)
        low = min(exponents)
        raw = [math.exp(low - e) for e in exponents]
        total = math.fsum(raw)
        rows.append([r / total for r in raw])
    return rows


def likelihood(
    point: SignalPoint,
    theta,
    config: Configuration,
    task: TaskSpec,
    profile: PerceptionProfile,
) -> float:
    """Probability of perceiving `point` when `theta` is intended."""
    table = likelihood_table(config, task, profile)
    points = signal_space(config)
    col = next(i for i, p in enumerate(points) if p.indices == tuple(point.indices))
    return table[task.flat_index(theta)][col]


@dataclass(frozen=True)
class DecodeResult:
    theta: tuple[int, ...]
    posterior: tuple[float, ...]  # over flat theta indices


def posterior_over_theta(
    col: int, table: list[list[float]], task: TaskSpec
) -> list[float]:
    raw = [task.prior[i] * table[i][col] for i in range(task.size)]
    total = math.fsum(raw)
    if total <= 0:
        # Degenerate column (zero prior mass everywhere): fall back to prior.
        return list(task.prior)
    return [r / total for r in raw]


def decode(
    point: SignalPoint,
    config: Configuration,
    task: TaskSpec,
    profile: PerceptionProfile,
    mode: str = "map",
    rng_seed=None,
) -> DecodeResult:
    """Infer theta from a perceived signal point.

    `map` returns the posterior argmax with deterministic lowest-flat-index
    tie-breaking; `sample` draws from the posterior using the seeded
    generator.
    """
    _check_binding(config, task)
    table = likelihood_table(config, task, profile)
    points = signal_space(config)
    col = next(i for i, p in enumerate(points) if p.indices == tuple(point.indices))
    post = posterior_over_theta(col, table, task)
    if mode == "map":
        best = max(range(task.size), key=lambda i: (post[i], -i))
        idx = best
    elif mode == "sample":
        rng = np.random.default_rng(rng_seed)
        idx = int(rng.choice(task.size, p=np.asarray(post) / math.fsum(post)))
    else:
        raise ValueError(f"unknown decode mode {mode!r}")
    return DecodeResult(theta=task.unflatten(idx), posterior=tuple(post))


def encode_nearest(config: Configuration, task: TaskSpec, theta) -> SignalPoint:
    """Per-channel nearest grid point to h(theta), ties toward lower index.

    This is what the hardware presents: each axis value quantized onto its
    assigned channel's level grid. Exact integer arithmetic, so ties are
    ties regardless of float rounding.
    """
    _check_binding(config, task)
    indices = []
    for j, (k_j, m) in enumerate(zip(task.axes, config.channels)):
        if not (0 <= theta[j] < k_j):
            raise ValueError(f"theta {tuple(theta)} out of range for task axes {task.axes}")
        l_j = m.level_count
        best_i, best_num = 0, None
        for i in range(l_j):
            num = abs(theta[j] * (l_j - 1) - i * (k_j - 1))
            if best_num is None or num < best_num:
                best_i, best_num = i, num
        indices.append(best_i)
    return make_point(config, indices)
