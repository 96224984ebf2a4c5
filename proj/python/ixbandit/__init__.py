"""Adversarial bandits with implicit-exploration loss estimates.

Arms are 0-based in this API.
"""

from ._core import (  # noqa: F401
    ConfigError,
    IoError,
    NumericError,
    best_switching_value,
    bound_thm1_anytime,
    bound_thm1_fixed,
    bound_thm2,
    bound_thm3,
    bound_thm4,
    estimate_biased_reward,
    estimate_importance,
    estimate_ix,
    estimate_ix_alt_a,
    estimate_ix_alt_log,
    independence_number,
    observation_probs,
    run_experiment,
    softmax_from_losses,
    verify_corollary1,
    verify_supermartingale,
)
