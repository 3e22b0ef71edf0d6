"""Linear-bandit simulation library: multi-level confidence-set policies
(SparseLinUCB, AdaLinUCB), OFUL and greedy baselines, and a seeded
benchmark harness."""

__version__ = "0.1.0"

from .confidence import (ConversionParams, LadderMode, RadiusLadder,
                         gamma_delta, safe_index, seqsew_regret_bound,
                         sized_fixed_horizon_ladder)
from .covariance import CovarianceState
from .environment import (BanditInstance, FixedSetProvider,
                          generate_fixed_sphere_instance, instantaneous_regret,
                          min_gap, reward)
from .errors import CorruptionError, LadderTooShortError, ProtocolError
from .harness import (AggregateResult, ExperimentConfig, PolicySpec,
                      RegretTrace, aggregate, run_episode, run_experiment,
                      run_sparsity_experiment)
from .policies import (AdaLinUcbPolicy, Exp3State, FixedLevelPolicy,
                       GreedyPolicy, OfulPolicy, SelectionDistribution,
                       SparseLinUcbPolicy, exp3_probs, exp3_update,
                       point_mass, sample_level, theory_distribution,
                       ucb_argmax, uniform_distribution)
from .regressors import (OnlineRegressor, PassthroughRegressor,
                         RidgeRegressor, passthrough_predict)
