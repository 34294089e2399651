"""Interval-side-information meta-algorithm.

Given per-arm intervals [m(i) - eps(i), m(i) + eps(i)] guaranteed to contain the
losses, transform losses so their range depends only on the radii, route play
away from arms that cannot be this round's best, and feed the inner learner the
transformed feedback.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractViolation, sample
from .learners import DoublingState, ExpWeightsState, bandit_observe, exp_weights_update

# Slack for floating-point noise when checking transformed losses against their
# proven range; anything beyond this is a genuine interval-contract breach.
_RANGE_TOL = 1e-9


@dataclass(frozen=True)
class SideInfo:
    """Per-arm interval centers and radii for one round."""

    m: np.ndarray
    eps: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.m, dtype=float)
        eps = np.asarray(self.eps, dtype=float)
        if m.shape != eps.shape or m.ndim != 1 or m.size < 1:
            raise ValueError(f"bad side info shapes: {m.shape}, {eps.shape}")
        if np.any(eps < 0):
            raise ValueError(f"negative interval radius {eps.min()}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "eps", eps)

    @property
    def n_arms(self) -> int:
        return self.m.size


@dataclass(frozen=True)
class ArmClassification:
    """Reference arm and the good/bad partition induced by one round's intervals."""

    reference: int
    good: np.ndarray  # boolean mask; bad arms are the complement

    @property
    def bad(self) -> np.ndarray:
        return ~self.good


def select_reference_arm(side: SideInfo) -> int:
    """Arm minimizing m - eps; ties broken by smaller eps, then lower index."""
    lower = side.m - side.eps
    order = np.lexsort((np.arange(side.n_arms), side.eps, lower))
    return int(order[0])


def classify_arms(side: SideInfo) -> ArmClassification:
    """Bad arms are those whose whole interval sits strictly above the
    reference arm's interval top; they cannot have the round's smallest loss."""
    j = select_reference_arm(side)
    top = side.m[j] + side.eps[j]
    bad = (side.m - side.eps) > top  # exact float comparison, no tolerance
    return ArmClassification(reference=j, good=~bad)


def transform_loss(loss: float, arm: int, side: SideInfo, cls: ArmClassification) -> float:
    """Transformed loss: good arms are shifted by the reference interval's
    lower edge; bad arms get the constant 2 eps(j) regardless of their loss."""
    j = cls.reference
    if not cls.good[arm]:
        return 2.0 * side.eps[j]
    value = loss - side.m[j] + side.eps[j]
    upper = 2.0 * (side.eps[arm] + side.eps[j])
    if value < -_RANGE_TOL or value > upper + _RANGE_TOL:
        raise ContractViolation(
            f"transformed loss {value} for arm {arm} outside [0, {upper}]; "
            "the environment violated its interval side information"
        )
    return float(min(max(value, 0.0), upper))


def transform_vector(losses, side: SideInfo, cls: ArmClassification) -> np.ndarray:
    lv = np.asarray(losses, dtype=float)
    return np.array([transform_loss(lv[i], i, side, cls) for i in range(side.n_arms)])


def induced_distribution(p_tilde, cls: ArmClassification) -> np.ndarray:
    """Actual play distribution: bad-arm mass is rerouted to the reference arm."""
    p = np.asarray(p_tilde, dtype=float).copy()
    bad = cls.bad
    p[cls.reference] += p[bad].sum()
    p[bad] = 0.0
    # The reference arm is good, so its own mass was never zeroed.
    return p


def meta_round(learner, side: SideInfo, t: int, env, rng, feedback: str = "bandit"):
    """One round of the meta-algorithm.

    1. draw a recommendation from the inner learner,
    2. play it if good, else play the reference arm,
    3. observe the environment's feedback for the played arm,
    4. feed the inner learner the transformed feedback at the recommended arm.

    ``env`` must expose ``loss(t, arm)`` and, for full-information feedback,
    ``loss_vector(t)``. Returns (played arm, updated learner).
    """
    cls = classify_arms(side)
    p_tilde = learner.distribution()
    recommended = sample(p_tilde, rng)
    played = recommended if cls.good[recommended] else cls.reference

    if feedback == "bandit":
        if cls.good[recommended]:
            tl = transform_loss(env.loss(t, played), recommended, side, cls)
        else:
            # Bad branch needs no loss query: the transformed value is fixed
            # by the side information alone.
            tl = 2.0 * side.eps[cls.reference]
        learner = bandit_observe(learner, recommended, tl, p_tilde)
    elif feedback == "full":
        tlv = transform_vector(env.loss_vector(t), side, cls)
        if isinstance(learner, (ExpWeightsState,)):
            learner = exp_weights_update(learner, tlv)
        elif isinstance(learner, DoublingState):
            raise ValueError("doubling wrapper is bandit-only")
        else:
            raise TypeError(f"unsupported inner learner {type(learner)}")
    else:
        raise ValueError(f"unknown feedback mode {feedback!r}")

    return played, learner
