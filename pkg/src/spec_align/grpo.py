"""Group-relative advantages: standardize rewards within a rollout group."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_EPSILON = 1e-8


@dataclass(frozen=True)
class RewardGroup:
    """Rewards for one prompt's rollout group."""

    rewards: tuple[float, ...]
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        values = tuple(float(r) for r in self.rewards)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("rewards must be finite")
        object.__setattr__(self, "rewards", values)


def group_advantages(rewards: Sequence[float], epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Per-sample advantages (r - mean) / std over one group.

    Uses the population standard deviation; a group with (near-)zero spread
    collapses to all-zero advantages instead of dividing by noise.
    """
    arr = np.asarray(rewards, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a flat reward list, got shape {arr.shape}")
    if arr.size == 0:
        return arr.copy()
    if not np.all(np.isfinite(arr)):
        raise ValueError("rewards must be finite")
    std = float(np.std(arr))
    if std < epsilon:
        return np.zeros_like(arr)
    return (arr - float(np.mean(arr))) / std
