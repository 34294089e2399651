"""Exponential-weights learners: Exp3 (bandit), Hedge (full information), and a
restart-on-budget ("doubling") step-size wrapper around Exp3."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import check_distribution


@dataclass(frozen=True)
class ExpWeightsState:
    """Log-domain exponential-weights state shared by Exp3 and Hedge."""

    log_weights: np.ndarray
    eta: float
    rounds_seen: int = 0

    @property
    def n_arms(self) -> int:
        return self.log_weights.size

    def distribution(self) -> np.ndarray:
        # Max-subtraction keeps the softmax finite even when importance
        # weights have driven log-weights far apart.
        lw = self.log_weights - self.log_weights.max()
        w = np.exp(lw)
        return w / w.sum()


def exp3_init(n_arms: int, eta: float) -> ExpWeightsState:
    """Fresh state with uniform play distribution."""
    if n_arms < 2:
        raise ValueError(f"need at least 2 arms, got {n_arms}")
    if eta <= 0:
        raise ValueError(f"step size must be positive, got {eta}")
    return ExpWeightsState(log_weights=np.zeros(n_arms), eta=float(eta))


def exp3_estimate(observed_loss: float, chosen: int, dist) -> np.ndarray:
    """Importance-weighted loss estimate: observed/p at the chosen arm, 0 elsewhere."""
    p = check_distribution(dist)
    if observed_loss < 0:
        raise ValueError(f"observed loss must be nonnegative, got {observed_loss}")
    if p[chosen] <= 0:
        raise ValueError(f"arm {chosen} has zero play probability; estimator undefined")
    est = np.zeros_like(p)
    est[chosen] = observed_loss / p[chosen]
    return est


def exp_weights_update(state: ExpWeightsState, losses) -> ExpWeightsState:
    """Multiplicative update w(i) *= exp(-eta * loss(i)), kept in log domain.

    Losses must be nonnegative; callers with signed losses shift first.
    """
    lv = np.asarray(losses, dtype=float)
    if lv.shape != state.log_weights.shape:
        raise ValueError(f"loss shape {lv.shape} != state shape {state.log_weights.shape}")
    if np.any(lv < 0):
        raise ValueError(f"negative loss entry {lv.min()}; shift losses before updating")
    return replace(
        state,
        log_weights=state.log_weights - state.eta * lv,
        rounds_seen=state.rounds_seen + 1,
    )


def hedge_step(state: ExpWeightsState, losses) -> tuple[ExpWeightsState, np.ndarray]:
    """One full-information round: returns the updated state and the
    pre-update distribution used for this round's play."""
    played = state.distribution()
    return exp_weights_update(state, losses), played


def doubling_eta(n_arms: int, epoch: int) -> float:
    """Step size sqrt(2 log K / 2^r) for epoch r."""
    return math.sqrt(2.0 * math.log(n_arms) / 2.0**epoch)


def doubling_first_epoch(n_arms: int) -> int:
    """Smallest epoch index keeping every scheduled step size at most 1."""
    return math.ceil(math.log2(math.log(n_arms)) + 1)


@dataclass(frozen=True)
class DoublingState:
    """Exp3 wrapped in a restart schedule driven by the observable second moment."""

    epoch: int
    q_accum: float
    inner: ExpWeightsState
    restarts: int = 0

    @property
    def n_arms(self) -> int:
        return self.inner.n_arms

    def distribution(self) -> np.ndarray:
        return self.inner.distribution()


def doubling_init(n_arms: int) -> DoublingState:
    r0 = doubling_first_epoch(n_arms)
    return DoublingState(epoch=r0, q_accum=0.0, inner=exp3_init(n_arms, doubling_eta(n_arms, r0)))


def doubling_step(dstate: DoublingState, q: float) -> DoublingState:
    """Accumulate one round's observable Q = sum_i p(i) est(i)^2; restart when
    the epoch budget 2^r is exceeded.

    The triggering round's Q is charged to the old epoch (it was observed under
    the old step size); the restart wipes the inner state entirely.
    """
    if q < 0:
        raise ValueError(f"observable must be nonnegative, got {q}")
    total = dstate.q_accum + q
    if total > 2.0**dstate.epoch:
        r = dstate.epoch + 1
        return DoublingState(
            epoch=r,
            q_accum=0.0,
            inner=exp3_init(dstate.n_arms, doubling_eta(dstate.n_arms, r)),
            restarts=dstate.restarts + 1,
        )
    return replace(dstate, q_accum=total)


def bandit_observe(learner, chosen: int, observed_loss: float, dist):
    """Feed one bandit observation into an Exp3 or doubling-wrapped state.

    Returns the updated learner. ``dist`` must be the distribution the arm was
    actually drawn from.
    """
    est = exp3_estimate(observed_loss, chosen, dist)
    if isinstance(learner, DoublingState):
        p = np.asarray(dist, dtype=float)
        q = float(np.sum(p * est**2))
        inner = exp_weights_update(learner.inner, est)
        return doubling_step(replace(learner, inner=inner), q)
    return exp_weights_update(learner, est)
