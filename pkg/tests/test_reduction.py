import numpy as np
import pytest

from rangebandits.core import ContractViolation, RngHandle
from rangebandits.learners import exp3_init
from rangebandits.reduction import (
    SideInfo,
    classify_arms,
    induced_distribution,
    meta_round,
    select_reference_arm,
    transform_loss,
    transform_vector,
)


def side(m, eps):
    return SideInfo(np.asarray(m, float), np.asarray(eps, float))


def test_reference_arm_lowest_potential_loss():
    assert select_reference_arm(side([0.5, 0.9], [0.1, 0.1])) == 0
    assert select_reference_arm(side([0.9, 0.5], [0.1, 0.1])) == 1


def test_reference_arm_tie_breaks():
    # lower edge tied (exactly representable values): smaller radius wins
    assert select_reference_arm(side([0.5, 0.75], [0.25, 0.5])) == 0
    assert select_reference_arm(side([0.75, 0.5], [0.5, 0.25])) == 1
    # fully tied: lowest index
    assert select_reference_arm(side([0.5] * 4, [0.1] * 4)) == 0


def test_classification_hand_cases():
    cls = classify_arms(side([0.5, 0.9], [0.1, 0.1]))
    assert cls.reference == 0 and not cls.good[1]

    cls = classify_arms(side([0.5] * 3, [0.5] * 3))  # the standard [0,1] setting
    assert cls.good.all()

    cls = classify_arms(side([0.1, 0.2, 0.3], [0.0, 0.0, 0.0]))
    assert cls.reference == 0
    assert list(cls.good) == [True, False, False]


def test_classification_boundary_is_good():
    # interval bottom exactly at the reference top: strict > keeps it good
    cls = classify_arms(side([0.5, 0.7], [0.1, 0.1]))
    assert cls.good.all()


def test_transform_hand_values():
    s = side([0.5, 0.9], [0.1, 0.1])
    cls = classify_arms(s)
    # reference arm at its center
    assert transform_loss(0.5, 0, s, cls) == pytest.approx(0.1)
    # bad arm: constant, loss argument ignored
    assert transform_loss(123.0, 1, s, cls) == pytest.approx(0.2)

    s0 = side([0.4, 0.9], [0.0, 0.1])
    cls0 = classify_arms(s0)
    assert transform_loss(0.4, 0, s0, cls0) == pytest.approx(0.0)


def test_transform_range_and_violation():
    s = side([0.5, 0.55], [0.1, 0.1])
    cls = classify_arms(s)
    upper = 2 * (0.1 + 0.1)
    for loss in np.linspace(0.4, 0.6, 9):
        assert 0.0 <= transform_loss(loss, 0, s, cls) <= upper
    with pytest.raises(ContractViolation):
        transform_loss(0.95, 0, s, cls)  # far above the declared interval
    with pytest.raises(ContractViolation):
        transform_loss(0.1, 0, s, cls)  # far below


def test_induced_distribution():
    all_good = classify_arms(side([0.5, 0.5], [0.2, 0.2]))
    assert np.allclose(induced_distribution([0.3, 0.7], all_good), [0.3, 0.7])

    cls = classify_arms(side([0.5, 0.9], [0.1, 0.1]))
    assert np.allclose(induced_distribution([0.5, 0.5], cls), [1.0, 0.0])

    cls3 = classify_arms(side([0.5, 0.6, 0.9], [0.1, 0.1, 0.1]))
    assert np.allclose(induced_distribution([0.2, 0.3, 0.5], cls3), [0.7, 0.3, 0.0])


class MatrixEnv:
    def __init__(self, losses):
        self.losses = np.asarray(losses, float)

    def loss(self, t, arm):
        return float(self.losses[t, arm])

    def loss_vector(self, t):
        return self.losses[t]


def _random_truthful_instance(rng, K, T):
    m = rng.uniform(0.2, 0.8, size=(T, K))
    eps = rng.uniform(0.0, 0.2, size=(T, K))
    losses = m + eps * rng.uniform(-1, 1, size=(T, K))
    return m, eps, losses


def test_pathwise_reduction_inequality_random_inner_distributions():
    # The transformed-loss comparison dominates the true-loss comparison on
    # every trajectory, for ANY inner distribution sequence and comparator.
    rng = np.random.default_rng(12)
    for _ in range(100):
        K = int(rng.integers(2, 6))
        T = int(rng.integers(1, 51))
        m, eps, losses = _random_truthful_instance(rng, K, T)
        lhs = np.full(K, 0.0)
        rhs = np.full(K, 0.0)
        for t in range(T):
            s = SideInfo(m[t], eps[t])
            cls = classify_arms(s)
            tl = transform_vector(losses[t], s, cls)
            p_tilde = rng.dirichlet(np.ones(K))
            p = induced_distribution(p_tilde, cls)
            lhs += p @ losses[t] - losses[t]
            rhs += p_tilde @ tl - tl
            # Claim: per-arm transformed loss never exceeds the shifted true loss
            j = cls.reference
            assert np.all(tl <= losses[t] - m[t, j] + eps[t, j] + 1e-9)
            assert np.all(p[cls.bad] == 0.0)
        assert np.all(lhs <= rhs + 1e-9)


def test_meta_round_bad_recommendation_routes_to_reference():
    # Arm 1 is bad; force the inner learner to recommend it and check the
    # played arm and the fed coordinate.
    s = side([0.5, 0.9], [0.1, 0.0])
    env = MatrixEnv([[0.5, 0.9]])
    learner = exp3_init(2, 0.5)
    learner = type(learner)(log_weights=np.array([-50.0, 0.0]), eta=0.5)  # ~always arm 1
    played, updated = meta_round(learner, s, 0, env, RngHandle(0, 1))
    assert played == 0  # rerouted to the reference arm
    # inner feedback was 2*eps(j)=0.2 at coordinate 1, importance weighted
    assert updated.log_weights[1] < learner.log_weights[1]
    assert updated.log_weights[0] == learner.log_weights[0]


def test_meta_round_all_good_is_passthrough():
    s = side([0.5, 0.5], [0.3, 0.3])
    env = MatrixEnv([[0.4, 0.6]])
    learner = exp3_init(2, 0.5)
    played, updated = meta_round(learner, s, 0, env, RngHandle(3, 1))
    assert played in (0, 1)
    # the update used loss - m(j) + eps(j) = loss + const shift of -0.2
    est_loss = env.loss(0, played) - 0.5 + 0.3
    expect = learner.log_weights.copy()
    expect[played] -= 0.5 * est_loss / 0.5
    assert np.allclose(updated.log_weights, expect)


def test_meta_round_full_information_feeds_whole_vector():
    s = side([0.5, 0.9], [0.1, 0.1])
    env = MatrixEnv([[0.5, 0.9]])
    learner = exp3_init(2, 1.0)
    played, updated = meta_round(learner, s, 0, env, RngHandle(1, 1), feedback="full")
    cls = classify_arms(s)
    tl = transform_vector(env.loss_vector(0), s, cls)
    assert np.allclose(updated.log_weights, -tl)


def test_zero_radius_side_info_gives_zero_regret():
    # eps == 0 everywhere: the meta-algorithm knows the losses in advance and
    # always plays the reference arm's value.
    rng = np.random.default_rng(4)
    K, T = 4, 40
    m = rng.uniform(0, 1, size=(T, K))
    env = MatrixEnv(m)  # truthful: losses equal the centers exactly
    learner = exp3_init(K, 0.3)
    incurred = 0.0
    for t in range(T):
        s = SideInfo(m[t], np.zeros(K))
        played, learner = meta_round(learner, s, t, env, RngHandle(t, 1))
        incurred += env.loss(t, played)
    assert incurred == pytest.approx(m.min(axis=1).sum(), abs=1e-12)


def test_pathwise_inequality_with_exp3_inner_sampled_trajectories():
    # Drive the actual meta_round loop with an Exp3 inner learner over many
    # sampled trajectories of one fixed instance.
    rng = np.random.default_rng(77)
    K, T = 3, 50
    m, eps, losses = _random_truthful_instance(rng, K, T)
    env = MatrixEnv(losses)
    for rep in range(200):
        learner = exp3_init(K, 0.4)
        lrng = RngHandle(rep, 1)
        lhs = np.zeros(K)
        rhs = np.zeros(K)
        for t in range(T):
            s = SideInfo(m[t], eps[t])
            cls = classify_arms(s)
            p_tilde = learner.distribution()
            p = induced_distribution(p_tilde, cls)
            tl = transform_vector(losses[t], s, cls)
            lhs += p @ losses[t] - losses[t]
            rhs += p_tilde @ tl - tl
            _, learner = meta_round(learner, s, t, env, lrng)
        assert np.all(lhs <= rhs + 1e-9)
