"""The doubling wrapper vs. a fixed step-size grid.

The wrapper watches the observable second-moment sum Q = sum p(i) est(i)^2,
and restarts Exp3 with a halved step size whenever the current epoch's budget
2^r is exhausted. It needs no horizon or range knowledge, yet stays within a
small constant factor of the best fixed step size in hindsight.
"""

import numpy as np

from rangebandits import (
    RegretTrace,
    RngHandle,
    bandit_lower_bound_env,
    bandit_observe,
    doubling_init,
    exp3_init,
    regret,
    sample,
)

K, T = 10, 5000
REPLICAS = 5
EPS = 0.3  # all loss values are 0.3 +- 0.3


def run_learner(make, rep):
    env = bandit_lower_bound_env(np.full(K, EPS), T, RngHandle(rep, 0))
    learner = make()
    rng = RngHandle(rep, 1)
    tr = RegretTrace(K)
    for t in range(T):
        dist = learner.distribution()
        arm = sample(dist, rng)
        loss = env.loss(t, arm)
        learner = bandit_observe(learner, arm, loss, dist)
        tr.record(t, arm, loss, env.loss_vector(t))
    return regret(tr)


print(f"{'step size':>12} {'mean regret':>12}")
results = {}
for e in range(8, -1, -1):
    eta = 2.0**-e
    mean = np.mean([run_learner(lambda: exp3_init(K, eta), rep) for rep in range(REPLICAS)])
    results[eta] = mean
    print(f"{eta:>12.4f} {mean:>12.1f}")

doubling = np.mean([run_learner(lambda: doubling_init(K), rep) for rep in range(REPLICAS)])
best = min(results.values())
print(f"{'doubling':>12} {doubling:>12.1f}")
print(f"\nbest fixed: {best:.1f}; doubling is within a factor {doubling / best:.2f} of it")
