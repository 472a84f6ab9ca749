"""Spectral lower bounds on geometric discord and one-way work deficit.

A zero-discord state has the same spectrum as its partial transpose, so
comparing the sorted spectra of ``rho`` and ``rho^T_B`` against one common
candidate spectrum bounds the squared Hilbert-Schmidt distance to the
zero-discord set from below.  The candidate spectrum is built greedily, one
entry at a time, each entry minimizing a one-dimensional quadratic over an
interval that keeps the sequence sorted and normalizable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matops import DensityMatrix, eigenvalues_descending, partial_transpose
from .policy import POLICY

__all__ = [
    "GqdBoundResult",
    "IntervalError",
    "gqd_lower_bound",
    "quadratic_min_on_interval",
    "work_deficit_lower_bound",
]


class IntervalError(RuntimeError):
    """The greedy pass produced an empty interval; indicates a bug, not bad input."""


@dataclass(frozen=True)
class GqdBoundResult:
    lam: np.ndarray
    lam_prime: np.ndarray
    lam_min: np.ndarray
    L: np.ndarray
    intervals: tuple[tuple[float, float], ...]
    bound: float


def _objective(x: float, lam_i: float, lam_prime_i: float) -> float:
    return (x - lam_i) ** 2 + (x - lam_prime_i) ** 2


def quadratic_min_on_interval(lam_i: float, lam_prime_i: float, lo: float, hi: float) -> tuple[float, float]:
    """Minimize ``2x^2 - 2(lam_i + lam_prime_i) x + lam_i^2 + lam_prime_i^2`` on ``[lo, hi]``.

    Returns ``(argmin, min_value)``.
    """
    if lo > hi:
        if lo - hi > POLICY.interval_slack:
            raise IntervalError(f"empty interval [{lo!r}, {hi!r}]")
        lo = hi
    vertex = 0.5 * (lam_i + lam_prime_i)
    if abs(vertex - lo) <= POLICY.vertex_tie:
        x = lo
    elif abs(vertex - hi) <= POLICY.vertex_tie:
        x = hi
    else:
        x = min(max(vertex, lo), hi)
    return x, _objective(x, lam_i, lam_prime_i)


def gqd_lower_bound(rho: DensityMatrix) -> GqdBoundResult:
    """Sequential-minimization lower bound ``(1/2) sum_i L_i`` on geometric discord.

    Step ``i`` (1-based) minimizes over
    ``[(1 - S) / (MN - i + 1), min(1 - S, previous)]`` where ``S`` is the mass
    already assigned and ``previous`` the last minimizer (1 before the first
    step).  Once the mass is exhausted every remaining minimizer is zero.
    """
    lam = rho.spectrum.copy() if isinstance(rho, DensityMatrix) else eigenvalues_descending(rho)
    lam_prime = eigenvalues_descending(partial_transpose(rho))
    size = lam.size
    lam_min = np.zeros(size)
    L = np.zeros(size)
    intervals = []
    spent = 0.0
    previous = 1.0
    for i in range(size):
        remaining = 1.0 - spent
        if remaining <= POLICY.mass_exhausted:
            intervals.append((0.0, 0.0))
            L[i] = lam[i] ** 2 + lam_prime[i] ** 2
            continue
        lo = remaining / (size - i)
        hi = min(remaining, previous)
        x, val = quadratic_min_on_interval(lam[i], lam_prime[i], lo, hi)
        intervals.append((lo, hi))
        lam_min[i] = x
        L[i] = val
        spent += x
        previous = x
    for arr in (lam, lam_prime, lam_min, L):
        arr.setflags(write=False)
    return GqdBoundResult(lam, lam_prime, lam_min, L, tuple(intervals), 0.5 * float(L.sum()))


def work_deficit_lower_bound(rho: DensityMatrix) -> float:
    """``gqd_lower_bound / (2 ln 2)``, a lower bound on the work deficit in bits."""
    return gqd_lower_bound(rho).bound / (2.0 * math.log(2.0))
