"""Brute-force reference values for ``2 (x) N`` states.

Every quantity here is an optimization over a rank-1 projective measurement
on the qubit A, parameterized by Bloch angles ``(theta, phi)``.  The search
is a ``grid x 2*grid`` scan followed by a compass search whose step halves
``refine_iters`` times.  Inner loops use batched LAPACK eigenvalues so that
the oracle does not share an eigensolver with the code it checks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .matops import (
    DensityMatrix,
    DimensionError,
    partial_trace_A,
    partial_trace_B,
    relative_entropy,
    von_neumann_entropy,
)
from .policy import POLICY
from .states import qubit_basis

__all__ = [
    "DEFAULT_GRID",
    "DEFAULT_REFINE",
    "MeasurementAngles",
    "OracleResult",
    "ZeroProbabilityOutcome",
    "classical_correlation",
    "conditional_state",
    "dephase",
    "discord_A_exact",
    "gqd_brute",
    "minimize_over_angles",
    "mutual_information",
    "work_deficit_exact",
]

log = logging.getLogger(__name__)

DEFAULT_GRID = 64
DEFAULT_REFINE = 20
_LN2 = math.log(2.0)
_MAX_MOVES = 64


class ZeroProbabilityOutcome(ValueError):
    """Requested measurement outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class MeasurementAngles:
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if not (0.0 <= self.phi < 2.0 * math.pi):
            raise ValueError(f"phi={self.phi} outside [0, 2pi)")

    def basis(self) -> np.ndarray:
        return qubit_basis(self.theta, self.phi)


@dataclass(frozen=True)
class OracleResult:
    value: float
    argmin_angles: MeasurementAngles
    grid_resolution: int
    refined: bool
    unit: str = ""
    clamped_by: float = 0.0

    @property
    def bits(self) -> float:
        if self.unit != "nats":
            raise ValueError(f"value is in {self.unit or 'no unit'}, not nats")
        return self.value / _LN2


def _require_qubit_a(rho: DensityMatrix) -> None:
    if not isinstance(rho, DensityMatrix):
        raise TypeError("expected a DensityMatrix")
    if rho.dim_a != 2:
        raise DimensionError(f"oracle measures a qubit A side; got dimA={rho.dim_a}")


def _as_angles(angles) -> MeasurementAngles:
    return angles if isinstance(angles, MeasurementAngles) else MeasurementAngles(*angles)


# ----------------------------------------------------------------------------
# single-measurement quantities


def conditional_state(rho: DensityMatrix, angles, outcome: int) -> tuple[float, DensityMatrix]:
    """Outcome probability and post-measurement state ``(E_i x I) rho (E_i x I) / p_i``.

    The returned state lives on the full ``2 (x) N`` space.  Raises
    :class:`ZeroProbabilityOutcome` when ``p_i <= 1e-14``.
    """
    _require_qubit_a(rho)
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    v = _as_angles(angles).basis()[:, outcome]
    proj = np.kron(np.outer(v, v.conj()), np.eye(rho.dim_b))
    unnorm = proj @ rho.mat @ proj
    p = float(np.trace(unnorm).real)
    if p <= POLICY.min_probability:
        raise ZeroProbabilityOutcome(f"outcome {outcome} has probability {p:.3e}")
    return p, DensityMatrix(unnorm / p, 2, rho.dim_b)


def dephase(rho: DensityMatrix, angles) -> DensityMatrix:
    """``sum_i (Pi_i x I) rho (Pi_i x I)`` for the measurement basis given by ``angles``."""
    _require_qubit_a(rho)
    u = _as_angles(angles).basis()
    out = np.zeros_like(rho.mat)
    for k in range(2):
        proj = np.kron(np.outer(u[:, k], u[:, k].conj()), np.eye(rho.dim_b))
        out += proj @ rho.mat @ proj
    return DensityMatrix(out, 2, rho.dim_b)


def mutual_information(rho: DensityMatrix) -> float:
    """``S(rho_A) + S(rho_B) - S(rho)`` in bits."""
    s_a = von_neumann_entropy(DensityMatrix(partial_trace_B(rho), 1, rho.dim_a))
    s_b = von_neumann_entropy(DensityMatrix(partial_trace_A(rho), 1, rho.dim_b))
    return max(0.0, s_a + s_b - von_neumann_entropy(rho))


# ----------------------------------------------------------------------------
# batched objectives over angle arrays


def _basis_columns(theta: np.ndarray, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ct, st = np.cos(theta / 2.0), np.sin(theta / 2.0)
    e = np.exp(1j * phi)
    v = np.stack([ct + 0j, e * st], axis=-1)
    w = np.stack([-e.conj() * st, ct + 0j], axis=-1)
    return v, w


def _blocks(rho: DensityMatrix, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """``<left| rho |right>`` as ``N x N`` operators on B, batched over angles."""
    n = rho.dim_b
    r = rho.mat.reshape(2, n, 2, n).transpose(0, 2, 1, 3).reshape(4, n * n)
    weights = (left.conj()[:, :, None] * right[:, None, :]).reshape(-1, 4)
    return (weights @ r).reshape(-1, n, n)


def _entropy_terms(mats: np.ndarray) -> np.ndarray:
    """``-Tr X ln X`` for a batch of PSD (unnormalized) Hermitian matrices."""
    ev = np.clip(np.linalg.eigvalsh(mats), 0.0, None)
    safe = np.where(ev > POLICY.entropy_zero, ev, 1.0)
    return -np.sum(ev * np.log(safe), axis=-1)


def _conditional_entropy_nats(rho: DensityMatrix) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """``sum_i p_i S(rho_i)`` in nats, skipping outcomes with ``p_i <= 1e-14``."""

    def objective(theta, phi):
        v, w = _basis_columns(theta, phi)
        total = np.zeros(theta.shape)
        for vec in (v, w):
            x = _blocks(rho, vec, vec)
            p = np.trace(x, axis1=1, axis2=2).real
            ok = p > POLICY.min_probability
            term = _entropy_terms(x) + np.where(ok, p * np.log(np.where(ok, p, 1.0)), 0.0)
            total += np.where(ok, term, 0.0)
        return total

    return objective


def _offdiag_hs(rho: DensityMatrix) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """``||rho - dephase(rho)||_2^2``: twice the HS weight of the off-diagonal A block."""

    def objective(theta, phi):
        v, w = _basis_columns(theta, phi)
        y = _blocks(rho, v, w)
        return 2.0 * np.sum(np.abs(y) ** 2, axis=(1, 2))

    return objective


def _dephased_entropy_nats(rho: DensityMatrix) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    def objective(theta, phi):
        v, w = _basis_columns(theta, phi)
        return _entropy_terms(_blocks(rho, v, v)) + _entropy_terms(_blocks(rho, w, w))

    return objective


# ----------------------------------------------------------------------------
# optimizer


def _pick(values: np.ndarray, theta: np.ndarray, phi: np.ndarray) -> int:
    """Index of the minimum; ties within 1e-12 go to the lexicographically smallest angles."""
    best = values.min()
    ties = np.flatnonzero(values <= best + POLICY.angle_tie)
    return int(ties[np.lexsort((phi[ties], theta[ties]))[0]])


def minimize_over_angles(
    objective: Callable[[np.ndarray, np.ndarray], np.ndarray],
    grid: int = DEFAULT_GRID,
    refine_iters: int = DEFAULT_REFINE,
) -> tuple[float, MeasurementAngles]:
    """Grid scan plus compass refinement of a vectorized objective ``f(theta, phi)``."""
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    t = np.linspace(0.0, math.pi, grid)
    p = np.linspace(0.0, 2.0 * math.pi, 2 * grid, endpoint=False)
    tt, pp = (a.ravel() for a in np.meshgrid(t, p, indexing="ij"))
    vals = objective(tt, pp)
    k = _pick(vals, tt, pp)
    theta, phi, best = float(tt[k]), float(pp[k]), float(vals[k])

    h_t, h_p = math.pi / (grid - 1), math.pi / grid
    for _ in range(refine_iters):
        for _ in range(_MAX_MOVES):
            ct = np.clip(np.array([theta - h_t, theta + h_t, theta, theta]), 0.0, math.pi)
            cp = np.mod(np.array([phi, phi, phi - h_p, phi + h_p]), 2.0 * math.pi)
            cv = objective(ct, cp)
            j = int(np.argmin(cv))
            if cv[j] < best:
                theta, phi, best = float(ct[j]), float(cp[j]), float(cv[j])
            else:
                break
        h_t *= 0.5
        h_p *= 0.5
    phi = phi % (2.0 * math.pi)
    return best, MeasurementAngles(theta, phi if phi < 2.0 * math.pi else 0.0)


# ----------------------------------------------------------------------------
# reference quantities


def classical_correlation(rho: DensityMatrix, grid: int = DEFAULT_GRID, refine_iters: int = DEFAULT_REFINE) -> OracleResult:
    """``C_A = S(rho_B) - min sum_i p_i S(rho_i)`` in bits."""
    _require_qubit_a(rho)
    s_b = von_neumann_entropy(DensityMatrix(partial_trace_A(rho), 1, rho.dim_b))
    cond, angles = minimize_over_angles(_conditional_entropy_nats(rho), grid, refine_iters)
    raw = s_b - cond / _LN2
    return OracleResult(max(0.0, raw), angles, grid, refine_iters > 0, "bits", max(0.0, -raw))


def discord_A_exact(rho: DensityMatrix, grid: int = DEFAULT_GRID, refine_iters: int = DEFAULT_REFINE) -> OracleResult:
    """Quantum discord ``I(rho) - C_A(rho)`` in bits, measuring A."""
    if grid < 32:
        raise ValueError(f"discord oracle needs grid >= 32, got {grid}")
    cc = classical_correlation(rho, grid, refine_iters)
    raw = mutual_information(rho) - cc.value
    clamp = max(0.0, -raw)
    if clamp > 1e-6:
        log.warning("discord clamped by %.3e; optimizer may have failed", clamp)
    return OracleResult(max(0.0, raw), cc.argmin_angles, grid, refine_iters > 0, "bits", clamp)


def gqd_brute(rho: DensityMatrix, grid: int = DEFAULT_GRID, refine_iters: int = DEFAULT_REFINE) -> OracleResult:
    """Geometric discord: min over A bases of ``||rho - dephase(rho)||_2^2``.

    For a fixed basis the dephased state is the HS-orthogonal projection of
    ``rho`` onto states block-diagonal in that basis, so only the basis is
    searched.
    """
    _require_qubit_a(rho)
    val, angles = minimize_over_angles(_offdiag_hs(rho), grid, refine_iters)
    return OracleResult(max(0.0, val), angles, grid, refine_iters > 0, "hs")


def work_deficit_exact(rho: DensityMatrix, grid: int = DEFAULT_GRID, refine_iters: int = DEFAULT_REFINE) -> OracleResult:
    """One-way work deficit ``min S(rho || dephase(rho))`` in nats.

    Dephasing commutes with its own output, so the objective reduces to
    ``S(dephase(rho)) - S(rho)`` during the search; the reported value is the
    full relative entropy at the optimal basis.
    """
    _require_qubit_a(rho)
    _, angles = minimize_over_angles(_dephased_entropy_nats(rho), grid, refine_iters)
    value = relative_entropy(rho, dephase(rho, angles))
    if not math.isfinite(value):
        raise AssertionError("dephased state lost support of rho")
    return OracleResult(value, angles, grid, refine_iters > 0, "nats")
