"""Range-aware nonstochastic bandits: interval-side-information reduction,
anchored Exp3 for Laplacian-smooth losses, adversarial environments, and a
reproducible experiment harness."""

from .anchor import (
    ANY_ARM,
    MIN_LOSS,
    anchored_exp3_round,
    multicomponent_sideinfo,
    shift_losses,
)
from .core import ContractViolation, RegretTrace, RngHandle, regret, sample
from .environments import (
    ENVIRONMENT_KINDS,
    EnvironmentInstance,
    bandit_lower_bound_env,
    fullinfo_lower_bound_env,
    interval_random_env,
    multicomponent_smooth_env,
    octopus_adversary,
    oscillating_env,
    smooth_random_env,
)
from .learners import (
    DoublingState,
    ExpWeightsState,
    bandit_observe,
    doubling_init,
    doubling_step,
    exp3_estimate,
    exp3_init,
    exp_weights_update,
    hedge_step,
)
from .reduction import (
    ArmClassification,
    SideInfo,
    classify_arms,
    induced_distribution,
    meta_round,
    select_reference_arm,
    transform_loss,
    transform_vector,
)
from .spectral import (
    GraphSpec,
    LaplacianView,
    algebraic_connectivity,
    extremal_range,
    grounded_minor,
    laplacian,
    octopus,
    smoothness,
)

__all__ = [name for name in dir() if not name.startswith("_")]
