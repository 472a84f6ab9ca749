"""Principal-minor discord witness and the PPT check.

A classical-quantum state keeps every 2x2 principal minor after partial
transposition on B.  A changed minor therefore certifies nonzero discord;
unchanged minors prove nothing, hence there is no "zero discord" verdict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

from .matops import DensityMatrix, DimensionError, eigenvalues_descending, partial_transpose, principal_minor_2
from .policy import POLICY

__all__ = [
    "CriterionVerdict",
    "MinorPair",
    "MinorReport",
    "Verdict",
    "discord_witness",
    "minor_report",
    "ppt_min_eigenvalue",
]


class Verdict(str, enum.Enum):
    NONZERO_DISCORD = "NonzeroDiscord"
    INCONCLUSIVE = "Inconclusive"


class MinorPair(NamedTuple):
    n: int
    m: int
    pm_rho: float
    pm_pt: float
    delta: float


@dataclass(frozen=True)
class MinorReport:
    pairs: tuple[MinorPair, ...]
    max_delta: float
    tolerance: float

    @property
    def changed(self) -> tuple[MinorPair, ...]:
        return tuple(p for p in self.pairs if p.delta > self.tolerance)

    @property
    def witness_pair(self) -> tuple[int, int] | None:
        """First pair (lexicographic) attaining ``max_delta``, if it exceeds the tolerance."""
        if self.max_delta <= self.tolerance:
            return None
        for p in self.pairs:
            if p.delta >= self.max_delta - POLICY.vertex_tie:
                return (p.n, p.m)
        return None

    def delta(self, n: int, m: int) -> float:
        for p in self.pairs:
            if (p.n, p.m) == (n, m):
                return p.delta
        raise KeyError((n, m))


@dataclass(frozen=True)
class CriterionVerdict:
    verdict: Verdict
    witness_pair: tuple[int, int] | None
    max_delta: float

    @property
    def detected(self) -> bool:
        return self.verdict is Verdict.NONZERO_DISCORD


def _require_qubit_a(rho: DensityMatrix) -> None:
    if not isinstance(rho, DensityMatrix):
        raise TypeError("expected a DensityMatrix")
    if rho.dim_a != 2:
        raise DimensionError(
            f"minor criterion needs a qubit A side (dimA=2), got dimA={rho.dim_a}; swap subsystems explicitly"
        )
    if rho.dim_b < 2:
        raise DimensionError(f"need dimB >= 2, got {rho.dim_b}")


def minor_report(rho: DensityMatrix, tol: float = POLICY.comparison) -> MinorReport:
    """All ``C(2N, 2)`` second-order principal minors of ``rho`` and ``rho^T_B``."""
    _require_qubit_a(rho)
    pt = partial_transpose(rho)
    pairs = []
    for n, m in combinations(range(1, rho.dim + 1), 2):
        a = principal_minor_2(rho.mat, n, m)
        b = principal_minor_2(pt, n, m)
        pairs.append(MinorPair(n, m, a, b, abs(a - b)))
    return MinorReport(tuple(pairs), max(p.delta for p in pairs), tol)


def discord_witness(rho: DensityMatrix, tol: float = POLICY.comparison) -> CriterionVerdict:
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    rep = minor_report(rho, tol)
    verdict = Verdict.NONZERO_DISCORD if rep.max_delta > tol else Verdict.INCONCLUSIVE
    return CriterionVerdict(verdict, rep.witness_pair, rep.max_delta)


def ppt_min_eigenvalue(rho: DensityMatrix) -> float:
    """Smallest eigenvalue of ``rho^T_B``; negative means NPT, hence entangled."""
    if not isinstance(rho, DensityMatrix):
        raise TypeError("expected a DensityMatrix")
    return float(eigenvalues_descending(partial_transpose(rho))[-1])
