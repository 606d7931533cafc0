"""Online load balancing through Blackwell approachability and EG+- learners."""

from .allocation import (AllocationResult, DualWeight, compute_allocation, game_value,
                         grid_allocation_oracle, worst_case_load)
from .engine import (Algorithm1, GameOracles, GenericReductionPlayer, RegretTrace, RoundRecord,
                     blackwell_check, generic_reduction_round, linf_game, regret, regret_bound,
                     run_game)
from .norms import (LINF, NormFamily, combined_norm, cstar_inf, cstar_minimizer_inf, cstar_p,
                    dual_combined_norm, linf_norm)
from .olo import (EGPlusMinus, EgState, PnormLearner, PnormState, RegretMeter, default_eta,
                  eg_init, eg_predict, eg_regret_bound, eg_update, pnorm_predict)
from .support import (SocpProblem, SupportResult, TargetPoint, build_socp_data,
                      grid_support_oracle, h_value, hyperbolic_rewrite_check, support_point_inf)

__version__ = "0.1.0"
