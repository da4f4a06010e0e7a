"""Weak orthogonal matching pursuit with exact coherence and RIP certificates."""
from .coherence import (ChainReport, CoherenceProfile, coherence_profile,
                        global_2_coherence, global_2_coherence_brute,
                        lemma1_chain, mutual_coherence, nu_sequence, ric_bounds,
                        ric_exact, ric_gershgorin_upper)
from .dictionary import (Dictionary, GramView, Observation, SparseVector,
                         correlations, least_squares, normalize_columns,
                         synthesize)
from .guarantees import (GuaranteeReport, Lemma2Bounds, compare_with_prior_bound,
                         corollary1_check, corollary2_check, error_bound_check,
                         lemma2_bounds, projected_iterates, theorem1_check,
                         theorem1_condition)
from .pursuit import (PursuitConfig, RecoveryResult, SelectionPolicy,
                      StopReason, omp, womp)

__version__ = "0.1.0"
