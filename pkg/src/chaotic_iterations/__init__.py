"""Chaotic iterations on Boolean vectors, chaos certification, and a keyed
hash post-treatment built on them."""
from .core import (
    CallbackFunction,
    Negation,
    StateVector,
    Strategy,
    Subset,
    SystemPoint,
    ToggleFunction,
    TruthTable,
    Unary,
    UpdateFunction,
    apply_term,
    ci_step_subset,
    ff_step,
    gf_step,
    head,
    iterate_gf,
    make_constant,
    make_identity,
    make_negation,
    shift,
    trajectory,
)
from .errors import (
    ArityMismatch,
    ChaosError,
    FrameError,
    IndexOutOfRange,
    NotCertified,
    ScaleLimitExceeded,
    StrategyExhausted,
    TruthTableError,
)
from .tables import parse_truth_table, read_truth_table, write_truth_table

__version__ = "0.1.0"
