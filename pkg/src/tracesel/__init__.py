"""Greedy removal algorithms for trace-of-inverse subset selection."""

__version__ = "0.1.0"

from .bounds import (
    bound_corollary3,
    bound_corollary6,
    bound_theorem1,
    bound_theorem2,
    bound_theorem2_minimal,
)
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import *  # noqa: F401,F403
from .linalg import (
    PsdBlock,
    TraceFunctionals,
    invert_psd,
    sherman_morrison_downdate,
    smw_downdate,
    sym_sqrt,
    trace_functionals,
)
from .oracle import OracleResult, exhaustive_min_trace, verify_report
from .problem import BlockProblem, ColumnProblem, validate_block_problem
from .selection import (
    SelectionReport,
    StepRecord,
    choose_removal_block,
    choose_removal_column,
    column_minimal_k,
    minimal_k,
    run_block_selection,
    run_column_selection,
)
