"""Dense Hermitian matrix algebra for bipartite states.

Matrices are plain complex ``numpy`` arrays.  Bipartite operators use the
A-major Kronecker layout: row ``(i, j)`` of an ``M x N`` system sits at
``i * N + j``.  Minor indices in the public interface are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .policy import POLICY

__all__ = [
    "ConvergenceError",
    "DensityMatrix",
    "DimensionError",
    "InvalidStateError",
    "eigh_descending",
    "eigenvalues_descending",
    "hs_norm_sq",
    "is_hermitian",
    "partial_trace_A",
    "partial_trace_B",
    "partial_transpose",
    "principal_minor_2",
    "relative_entropy",
    "shannon_entropy",
    "trace_norm",
    "von_neumann_entropy",
]


class DimensionError(ValueError):
    """Matrix shape does not match the declared subsystem dimensions."""


class InvalidStateError(ValueError):
    """Matrix fails density-matrix validation."""


class ConvergenceError(RuntimeError):
    """Jacobi iteration hit the sweep cap."""

    def __init__(self, residual: float, sweeps: int):
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps "
            f"(max off-diagonal residual {residual:.3e})"
        )
        self.residual = residual
        self.sweeps = sweeps


def _as_square(mat) -> np.ndarray:
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def is_hermitian(mat, tol: float = POLICY.hermiticity) -> bool:
    a = _as_square(mat)
    return bool(np.all(np.abs(a - a.conj().T) <= tol))


def _check_hermitian(a: np.ndarray, tol: float = POLICY.hermiticity) -> None:
    resid = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if resid > tol:
        raise ValueError(f"matrix is not Hermitian (max |A - A^H| = {resid:.3e})")


# ----------------------------------------------------------------------------
# eigensolver


def _jacobi(a: np.ndarray, want_vectors: bool, tol: float, max_sweeps: int):
    """Cyclic complex Jacobi.  Works in place on a copy of ``a``."""
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=complex) if want_vectors else None
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    skip = threshold * 1e-3
    off = 0.0
    for sweep in range(max_sweeps + 1):
        off = float(np.max(np.abs(a - np.diag(np.diag(a))))) if n > 1 else 0.0
        if off < threshold:
            return a.diagonal().real.copy(), v
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                mag = abs(g)
                if mag < skip:
                    continue
                w = g.conjugate() / mag
                theta = 0.5 * math.atan2(2.0 * mag, a[q, q].real - a[p, p].real)
                c, s = math.cos(theta), math.sin(theta)
                # U restricted to (p, q) is [[c, s], [-s w, c w]]
                cp, cq = a[:, p].copy(), a[:, q]
                a[:, p] = c * cp - (s * w) * cq
                a[:, q] = s * cp + (c * w) * cq
                rp, rq = a[p, :].copy(), a[q, :]
                wc = w.conjugate()
                a[p, :] = c * rp - (s * wc) * rq
                a[q, :] = s * rp + (c * wc) * rq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if v is not None:
                    vp, vq = v[:, p].copy(), v[:, q]
                    v[:, p] = c * vp - (s * w) * vq
                    v[:, q] = s * vp + (c * w) * vq
    raise ConvergenceError(off, max_sweeps)


def eigh_descending(
    mat,
    *,
    tol: float = POLICY.jacobi_offdiag,
    max_sweeps: int = POLICY.jacobi_max_sweeps,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and matching unit eigenvectors as columns."""
    a = _as_square(mat)
    _check_hermitian(a)
    a = 0.5 * (a + a.conj().T)
    w, v = _jacobi(a, True, tol, max_sweeps)
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigenvalues_descending(
    mat,
    *,
    tol: float = POLICY.jacobi_offdiag,
    max_sweeps: int = POLICY.jacobi_max_sweeps,
) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix sorted in non-increasing order.

    Raises ``ValueError`` for non-Hermitian input and ``ConvergenceError`` if
    the off-diagonal mass has not dropped below ``tol`` after ``max_sweeps``.
    """
    a = _as_square(mat)
    _check_hermitian(a)
    a = 0.5 * (a + a.conj().T)
    w, _ = _jacobi(a, False, tol, max_sweeps)
    return np.sort(w)[::-1]


# ----------------------------------------------------------------------------
# states


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated bipartite density matrix on ``C^dim_a (x) C^dim_b``.

    The stored array is a read-only copy.  Construction checks Hermiticity,
    unit trace and positive semidefiniteness against :data:`POLICY`.
    """

    mat: np.ndarray
    dim_a: int
    dim_b: int
    spectrum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.dim_a) < 1 or int(self.dim_b) < 1:
            raise DimensionError(f"dimensions must be positive, got ({self.dim_a}, {self.dim_b})")
        a = np.array(self.mat, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] != self.dim_a * self.dim_b:
            raise DimensionError(
                f"dimA*dimB = {self.dim_a * self.dim_b} does not match matrix dimension {a.shape[0]}"
            )
        herm = float(np.max(np.abs(a - a.conj().T)))
        if herm > POLICY.hermiticity:
            raise InvalidStateError(f"not Hermitian (max |A - A^H| = {herm:.3e})")
        tr = np.trace(a).real
        if abs(tr - 1.0) > POLICY.trace:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        spec = eigenvalues_descending(a)
        if spec[-1] < -POLICY.psd_slack:
            raise InvalidStateError(f"not positive semidefinite (min eigenvalue {spec[-1]:.3e})")
        a.setflags(write=False)
        spec.setflags(write=False)
        object.__setattr__(self, "mat", a)
        object.__setattr__(self, "dim_a", int(self.dim_a))
        object.__setattr__(self, "dim_b", int(self.dim_b))
        object.__setattr__(self, "spectrum", spec)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    def allclose(self, other, atol: float = POLICY.comparison) -> bool:
        b = other.mat if isinstance(other, DensityMatrix) else np.asarray(other)
        return self.mat.shape == b.shape and bool(np.allclose(self.mat, b, rtol=0, atol=atol))


def _unpack(rho, dims) -> tuple[np.ndarray, int, int]:
    if isinstance(rho, DensityMatrix):
        if dims is not None and tuple(dims) != rho.dims:
            raise DimensionError(f"dims {tuple(dims)} conflict with state dims {rho.dims}")
        return rho.mat, rho.dim_a, rho.dim_b
    a = _as_square(rho)
    if dims is None:
        raise DimensionError("dims=(M, N) is required for raw matrices")
    m, n = (int(d) for d in dims)
    if m < 1 or n < 1 or m * n != a.shape[0]:
        raise DimensionError(f"dims ({m}, {n}) do not match matrix dimension {a.shape[0]}")
    return a, m, n


def partial_transpose(rho, dims=None) -> np.ndarray:
    """Transpose the B indices: ``out[(i,j),(k,l)] = rho[(i,l),(k,j)]``.

    The result is Hermitian with the same trace but need not be positive, so
    it is returned as a bare array rather than a :class:`DensityMatrix`.
    """
    a, m, n = _unpack(rho, dims)
    return a.reshape(m, n, m, n).transpose(0, 3, 2, 1).reshape(m * n, m * n).copy()


def partial_trace_B(rho, dims=None) -> np.ndarray:
    a, m, n = _unpack(rho, dims)
    return np.einsum("ijkj->ik", a.reshape(m, n, m, n))


def partial_trace_A(rho, dims=None) -> np.ndarray:
    a, m, n = _unpack(rho, dims)
    return np.einsum("ijil->jl", a.reshape(m, n, m, n))


# ----------------------------------------------------------------------------
# entropies and norms


def shannon_entropy(probs, base: float = 2.0) -> float:
    """Shannon entropy of a probability vector; entries below 1e-15 count as 0."""
    p = np.clip(np.asarray(probs, dtype=float), 0.0, 1.0)
    p = p[p > POLICY.entropy_zero]
    if p.size == 0:
        return 0.0
    return float(max(0.0, -np.sum(p * np.log(p)) / math.log(base)))


def von_neumann_entropy(rho, base: float = 2.0) -> float:
    """``-Tr(rho log rho)``, in bits by default."""
    if isinstance(rho, DensityMatrix):
        spec = rho.spectrum
    else:
        a = _as_square(rho)
        spec = eigenvalues_descending(a)
        if spec[-1] < -POLICY.psd_slack or abs(spec.sum() - 1.0) > POLICY.trace:
            raise InvalidStateError("von_neumann_entropy needs a density matrix")
    return shannon_entropy(spec, base)


def relative_entropy(rho, sigma) -> float:
    """``Tr(rho ln rho - rho ln sigma)`` in nats.

    Returns ``math.inf`` when the support of ``rho`` leaks out of the support
    of ``sigma`` by more than the rank tolerance.
    """
    r = rho.mat if isinstance(rho, DensityMatrix) else _as_square(rho)
    s = sigma.mat if isinstance(sigma, DensityMatrix) else _as_square(sigma)
    if r.shape != s.shape:
        raise DimensionError(f"shape mismatch {r.shape} vs {s.shape}")
    lam_r = rho.spectrum if isinstance(rho, DensityMatrix) else eigenvalues_descending(r)
    lam_s, vec_s = eigh_descending(s)
    # weights of rho along the eigenvectors of sigma
    weights = np.einsum("ji,jk,ki->i", vec_s.conj(), r, vec_s).real
    null = lam_s <= POLICY.support
    # a PSD rho has weight <= 2*lam along a null direction of sigma when supports agree
    if np.any(weights[null] > POLICY.support + 2.0 * np.clip(lam_s[null], 0.0, None)):
        return math.inf
    lr = lam_r[lam_r > POLICY.entropy_zero]
    neg_entropy = float(np.sum(lr * np.log(lr)))
    cross = float(np.sum(weights[~null] * np.log(lam_s[~null])))
    return max(0.0, neg_entropy - cross)


def hs_norm_sq(mat) -> float:
    a = np.asarray(mat, dtype=complex)
    return float(np.sum(np.abs(a) ** 2))


def trace_norm(mat) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(eigenvalues_descending(mat))))


def principal_minor_2(mat, n: int, m: int) -> float:
    """Determinant of the 2x2 principal submatrix on rows/cols ``n``, ``m`` (1-based).

    For Hermitian input this equals ``A_nn A_mm - |A_nm|^2``; the real part is
    returned.
    """
    a = mat.mat if isinstance(mat, DensityMatrix) else _as_square(mat)
    dim = a.shape[0]
    if not (1 <= n < m <= dim):
        raise IndexError(f"need 1 <= n < m <= {dim}, got n={n}, m={m}")
    i, j = n - 1, m - 1
    return float((a[i, i] * a[j, j] - a[i, j] * a[j, i]).real)
