"""Discord detection from partial-transpose minors, with spectral GQD bounds."""

from .bounds import GqdBoundResult, gqd_lower_bound, quadratic_min_on_interval, work_deficit_lower_bound
from .criteria import CriterionVerdict, MinorReport, Verdict, discord_witness, minor_report, ppt_min_eigenvalue
from .matops import (
    ConvergenceError,
    DensityMatrix,
    DimensionError,
    InvalidStateError,
    eigenvalues_descending,
    partial_trace_A,
    partial_trace_B,
    partial_transpose,
    principal_minor_2,
    relative_entropy,
    von_neumann_entropy,
)
from .policy import POLICY, NumericPolicy

__version__ = "0.1.0"
