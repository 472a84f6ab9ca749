"""Numeric tolerances shared by the library, the tests and the CLI."""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_TOL = "DISCORDLAB_TOL"


@dataclass(frozen=True)
class NumericPolicy:
    hermiticity: float = 1e-12
    trace: float = 1e-10
    psd_slack: float = 1e-10
    comparison: float = 1e-9
    entropy_zero: float = 1e-15
    support: float = 1e-9
    jacobi_offdiag: float = 1e-12
    jacobi_max_sweeps: int = 100
    min_probability: float = 1e-14
    mass_exhausted: float = 1e-12
    interval_slack: float = 1e-12
    vertex_tie: float = 1e-15
    angle_tie: float = 1e-12


POLICY = NumericPolicy()


def resolve_tolerance(flag: float | None = None, env: dict[str, str] | None = None) -> float:
    """Comparison tolerance with precedence flag > ``DISCORDLAB_TOL`` > default."""
    if flag is not None:
        tol = float(flag)
    else:
        env = os.environ if env is None else env
        raw = env.get(ENV_TOL)
        tol = float(raw) if raw not in (None, "") else POLICY.comparison
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    return tol

