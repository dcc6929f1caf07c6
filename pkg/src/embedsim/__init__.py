"""embedsim: decide, construct and certify pooled-embedding simulations
of monotonic and ranked-default attribute dependencies."""

from .certifier import (Certificate, ConicalRequirement, FarkasCertificate,
                        FeasibilityOutcome, LinearSystem, PairRequirement,
                        build_avg_dist_relaxation, build_avg_dot_system,
                        certify_nonmonotonic_failure, certify_strategy_failure,
                        conical_closure_certify, decide_avg_dot, lp_feasible,
                        realize_from_matrix, reverify_certificate)
from .constructors import (ConstructionResult, DeltaConfig, construct,
                           construct_avg_relu, construct_avg_relu_nm,
                           construct_had_dot, construct_had_dot_nm,
                           construct_ord)
from .fixtures import FIXTURE_NAMES, FIXTURE_SOURCES, fixture
from .logic import (CapExceededError, Formula, KBError, KnowledgeBase,
                    ParseError, Signature, StratifiedKB, entails,
                    enumerate_models, evaluate, format_formula, kb_digest,
                    nm_consequence_def, nm_consequence_rank, parse_kb,
                    rank_mu)
from .strategies import (TABLE1_STRATEGIES, AttributeEmbedding, StrategyId,
                         emb_avg, emb_had, emb_norm, emb_ord, emb_sig_numeric,
                         lab_dist, lab_dot, lab_dot_on_norm, lab_ord,
                         lab_relu, strategy_accepts, strategy_from_name)
from .table1 import Table1Report, run_table1
from .verifier import (PropertyReport, VerificationReport,
                       check_ord_monotonicity, check_tied_hadamard_symmetry,
                       verify_monotonic, verify_nonmonotonic)

__version__ = "0.1.0"
