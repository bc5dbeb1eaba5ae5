"""oraclelab: exact circuit learning and adversarial oracle constructions.

Desk-scale, exhaustively verified simulators: canonical Boolean circuit
enumeration and minimization, an NP oracle realized by complete witness
search with adaptive/parallel round accounting, pairwise-independent-hash
gap counting, version-space halving and one-round parallel learners, two
adversarial oracle-table constructions driven by exact rational progress
measures, and a majority-halving diagonalizer.
"""

from .circuits import (
    Circuit,
    GateRecord,
    Op,
    TruthTable,
    circuit_from_text,
    circuit_to_text,
    decode,
    encode,
    encoding_key,
    encoding_length,
    enumerate_circuits,
    eval_circuit,
    lex_first_matching,
    majority_compose,
    majority_overhead,
    min_size,
    truth_table,
)
from .diagonalizer import HardLanguage, build_hard_language, verify_hardness
from .learner import (
    LearnInstance,
    LearnerOutput,
    SurvivorState,
    at_predicate,
    find_hard_input,
    is_minimal,
    learn_adaptive,
    learn_nplog,
    learn_parallel,
    lex_circuit,
    minimize_blackbox,
    qt_accepts,
)
from .npengine import NPEngine, OracleFun, QueryLedger, WitnessQuery
from .approxcount import (
    AffineHash,
    GapVerdict,
    Verdict,
    all_hashes,
    exact_count,
    gap_decide,
    sample_hash,
    tuple_membership,
)

__all__ = [name for name in dir() if not name.startswith("_")]
