"""Global maximization of arbitrary set functions.

Any bounded set function splits, after positive scaling, into a submodular
part minus the cut function of a graph; the difference is maximized exactly
by a branch and bound over canonically keyed star-union graph nodes, with
exact or approximate submodular subproblem engines, optional subset-system
constraints, and anytime gap bounds on interruption.
"""

from .bits import better, full_mask, popcount, subset_str
from .ground import (GroundSet, SetFunction, brute_force_argmax, coverage_function,
                     evaluate, is_modular, is_submodular, is_supermodular,
                     modular_function, table_function)
from .graph import (Graph, bicut, cut, cut_function, cut_identity_holds, degree,
                    induced_edges, is_dominating)
from .decompose import (Decomposition, DecompositionError, decompose, default_alpha,
                        from_parts, lift_empty, maximizer_dominates, min_alpha,
                        min_alpha_pairwise, modularity_gap)
from .astral import Astral, delta_hat, verify_unique_independent_set
from .submax import Interval, LSResult, interval_max, ls_max, maximize_modular, preservation_check
from .bb import (BBConfig, BBResult, BBStats, SubproblemResult, bb_interrupt_bound,
                 bb_maximize, solve_subproblem)
from .constrained import (BBCConfig, LSAResult, PenalizedFunction, SubsetSystem,
                          bbc_maximize, choose_M, constrained_brute_force,
                          greedy_extend, lsa_bound_factor, lsa_max, q_of, reformulate)

__version__ = "0.1.0"
