"""Entropy, poverty, wealth histograms and condensation diagnostics."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .engine import ExchangeRule, PopulationState, is_bankrupt


@dataclass(frozen=True)
class WealthHistogram:
    counts: dict[int, int]
    t: int = 0

    def __post_init__(self):
        if any(k < 0 for k in self.counts):
            raise ValueError("wealth values must be non-negative")

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    @classmethod
    def from_wealth(cls, wealth, t: int = 0) -> "WealthHistogram":
        vals, cnts = np.unique(np.asarray(wealth), return_counts=True)
        return cls(dict(zip(vals.tolist(), cnts.tolist())), t)

    def pooled(self, other: "WealthHistogram") -> "WealthHistogram":
        c = Counter(self.counts)
        c.update(other.counts)
        return WealthHistogram(dict(sorted(c.items())), self.t)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        keys = sorted(self.counts)
        return (np.array(keys, dtype=np.int64),
                np.array([self.counts[k] for k in keys], dtype=np.int64))

    def total_wealth(self) -> int:
        return sum(w * c for w, c in self.counts.items())


@dataclass(frozen=True)
class CondensationResult:
    t_c: int | None
    final_poverty: int
    final_entropy: float

    @property
    def reached(self) -> bool:
        return self.t_c is not None


def _entropy_terms(counts, n: int) -> float:
    s = 0.0
    for c in counts:
        if c > 0:
            p = c / n
            s -= p * math.log(p)
    return s


def shannon_entropy(h: WealthHistogram) -> float:
    """``-sum P_k ln P_k`` over occupied wealth values, in ascending wealth order."""
    n = h.n
    if n == 0:
        raise ValueError("empty histogram")
    return _entropy_terms((h.counts[k] for k in sorted(h.counts)), n)


def condensation_entropy(n: int) -> float:
    """Entropy of ``n - 1`` agents in one state and a single agent in another."""
    if n < 2:
        raise ValueError("need n >= 2")
    return _entropy_terms((n - 1, 1), n)


def poverty_count(state: PopulationState | np.ndarray, rule: ExchangeRule) -> int:
    wealth = state.wealth if isinstance(state, PopulationState) else np.asarray(state)
    if rule.kind == "additive":
        return int(np.count_nonzero(wealth < rule.c))
    return sum(1 for w in wealth.tolist() if is_bankrupt(rule, w))


def detect_condensation(times, poverty, n: int, entropy=None) -> CondensationResult:
    times = list(times)
    poverty = list(poverty)
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be non-decreasing")
    t_c = next((t for t, p in zip(times, poverty) if p == n - 1), None)
    final_entropy = float(entropy[-1]) if entropy is not None and len(entropy) else float("nan")
    return CondensationResult(t_c, int(poverty[-1]) if poverty else 0, final_entropy)


def histogram(state: PopulationState | np.ndarray, t: int | None = None) -> WealthHistogram:
    if isinstance(state, PopulationState):
        return WealthHistogram.from_wealth(state.wealth, state.t if t is None else t)
    return WealthHistogram.from_wealth(state, 0 if t is None else t)


def poverty_threshold(rule: ExchangeRule) -> int:
    """Smallest wealth that is not in poverty under ``rule``."""
    if rule.kind == "additive":
        return rule.c
    w = 0
    while is_bankrupt(rule, w):
        w += 1
    return w
