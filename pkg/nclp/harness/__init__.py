# =============================================================================
# FILE: nclp/harness/__init__.py
# PURPOSE: Expose the experiment runner
# =============================================================================
#
#   from nclp.harness import ExperimentConfig, run
#
#   config = ExperimentConfig(check_name="schur-half", trials=50).resolve()
#   state = run(config)
#
# =============================================================================

from .experiment import ExperimentConfig, Trial, plan_trials
from .graph import records_of, run

__all__ = ('ExperimentConfig', 'Trial', 'plan_trials', 'records_of', 'run')
