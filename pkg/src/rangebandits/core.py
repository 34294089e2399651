"""Shared domain primitives: seeded RNG streams, probability vectors, regret accounting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Probability vectors are validated to this tolerance on input. Construction
# sites may renormalize; sampling never does.
DIST_SUM_ATOL = 1e-9


class ContractViolation(ValueError):
    """An input broke a documented contract (interval, budget, or range)."""


@dataclass
class RngHandle:
    """A named random stream: identical (seed, stream) pairs reproduce draws bit for bit.

    One independent stream per (replica, role), so the number of draws a
    learner makes can never perturb the environment's losses.
    """

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self._gen = np.random.default_rng(ss)

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def uniform(self) -> float:
        return float(self._gen.random())


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngHandle):
        return rng.generator
    return rng


def check_distribution(probs, atol: float = DIST_SUM_ATOL) -> np.ndarray:
    """Validate a probability vector; raises on negative mass or bad total."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError(f"distribution must be a nonempty 1-d array, got shape {p.shape}")
    if np.any(p < 0):
        raise ValueError(f"distribution has a negative entry: {p.min()}")
    total = p.sum()
    if abs(total - 1.0) > atol:
        raise ValueError(f"distribution sums to {total}, off by more than {atol}")
    return p


def sample(dist, rng) -> int:
    """Draw an arm index from ``dist`` by inverse CDF over the stored order.

    Consumes exactly one uniform draw, so a trace of uniforms fully determines
    the arm sequence.
    """
    p = check_distribution(dist)
    u = _as_generator(rng).random()
    cdf = np.cumsum(p)
    i = int(np.searchsorted(cdf, u, side="right"))
    return min(i, p.size - 1)


@dataclass
class RegretTrace:
    """Per-round record of play plus cumulative regret against the best fixed arm."""

    n_arms: int
    rounds: list = field(default_factory=list)  # (t, arm, incurred, anchor)
    arm_totals: np.ndarray = None
    incurred_total: float = 0.0
    cum_regret: list = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.arm_totals is None:
            self.arm_totals = np.zeros(self.n_arms)

    def record(self, t: int, arm: int, incurred: float, loss_vector, anchor=None) -> None:
        lv = np.asarray(loss_vector, dtype=float)
        if lv.shape != (self.n_arms,):
            raise ValueError(f"loss vector shape {lv.shape} != ({self.n_arms},)")
        self.rounds.append((t, int(arm), float(incurred), anchor))
        self.arm_totals = self.arm_totals + lv
        self.incurred_total += float(incurred)
        self.cum_regret.append(self.incurred_total - float(self.arm_totals.min()))

    @property
    def T(self) -> int:
        return len(self.rounds)


def regret(trace: RegretTrace) -> float:
    """Cumulative loss of the played arms minus the best fixed arm in hindsight."""
    if trace.T == 0:
        raise ValueError("empty trace")
    return trace.incurred_total - float(trace.arm_totals.min())
