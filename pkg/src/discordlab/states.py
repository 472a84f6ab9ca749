"""State families and the JSON state-file format.

Random states come from ``numpy.random.Generator`` backed by PCG64 (seeded
through ``SeedSequence``, which is splittable via ``spawn``), so fixtures are
reproducible from an integer seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .matops import DensityMatrix, DimensionError, InvalidStateError
from .policy import POLICY

__all__ = [
    "BELL_KINDS",
    "StateFamily",
    "StateFileError",
    "bell",
    "bell_mixture",
    "bell_vector",
    "build_family",
    "canonical_family",
    "dump_state",
    "load_state",
    "make_rng",
    "max_entangled",
    "qubit_basis",
    "random_density",
    "random_zero_discord",
    "read_state",
    "uc_family",
    "uc_weight_f",
    "werner",
    "write_state",
    "zero_discord",
]

_SQRT_HALF = 1.0 / math.sqrt(2.0)

BELL_KINDS = ("phi+", "phi-", "psi+", "psi-")


def _check_range(name: str, value: float, lo: float, hi: float) -> float:
    value = float(value)
    if not (lo <= value <= hi):
        raise ValueError(f"{name}={value} outside [{lo}, {hi}]")
    return value


def _projector(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def bell_vector(kind: str, dim_b: int = 2) -> np.ndarray:
    """Bell vector on ``2 (x) dim_b``; B-side kets are ``|0>``, ``|1>``."""
    if kind not in BELL_KINDS:
        raise ValueError(f"unknown Bell state {kind!r}; expected one of {BELL_KINDS}")
    vec = np.zeros(2 * dim_b, dtype=complex)
    sign = 1.0 if kind.endswith("+") else -1.0
    if kind.startswith("phi"):
        vec[0 * dim_b + 0] = _SQRT_HALF
        vec[1 * dim_b + 1] = sign * _SQRT_HALF
    else:
        vec[0 * dim_b + 1] = _SQRT_HALF
        vec[1 * dim_b + 0] = sign * _SQRT_HALF
    return vec


def bell(kind: str) -> DensityMatrix:
    return DensityMatrix(_projector(bell_vector(kind)), 2, 2)


def werner(a: float) -> DensityMatrix:
    """``a |psi-><psi-| + (1 - a) I/4`` for ``0 <= a <= 1``."""
    a = _check_range("a", a, 0.0, 1.0)
    mat = a * _projector(bell_vector("psi-")) + (1.0 - a) / 4.0 * np.eye(4)
    return DensityMatrix(mat, 2, 2)


def bell_mixture(b: float) -> DensityMatrix:
    """``b |psi-><psi-| + (1 - b) |phi+><phi+|``."""
    b = _check_range("b", b, 0.0, 1.0)
    mat = b * _projector(bell_vector("psi-")) + (1.0 - b) * _projector(bell_vector("phi+"))
    return DensityMatrix(mat, 2, 2)


def uc_weight_f(u: float, c: float) -> float:
    """The dependent weight ``f = (1 - 2u - c) / 3`` of the (u, c) family."""
    return (1.0 - 2.0 * float(u) - float(c)) / 3.0


def uc_family(u: float, c: float) -> DensityMatrix:
    """Two-parameter ``2 (x) 3`` family.

    ``u (|02><02| + |12><12|) + f (phi+ + phi- + psi+) + c psi-`` with the
    Bell projectors embedded on the qutrit levels ``|0>``, ``|1>`` and
    ``2u + 3f + c = 1``.
    """
    u = _check_range("u", u, 0.0, 0.5)
    c = _check_range("c", c, 0.0, 1.0)
    f = uc_weight_f(u, c)
    slack = POLICY.interval_slack
    if not (-slack <= f <= 1.0 / 3.0 + slack):
        raise ValueError(f"infeasible (u, c) = ({u}, {c}): f = (1 - 2u - c)/3 = {f:.6g} not in [0, 1/3]")
    f = min(max(f, 0.0), 1.0 / 3.0)
    mat = np.zeros((6, 6), dtype=complex)
    mat[2, 2] = mat[5, 5] = u
    for kind in ("phi+", "phi-", "psi+"):
        mat += f * _projector(bell_vector(kind, 3))
    mat += c * _projector(bell_vector("psi-", 3))
    return DensityMatrix(mat, 2, 3)


def max_entangled(d: int) -> DensityMatrix:
    """``|phi+> = sum_i |ii> / sqrt(d)`` on ``d (x) d``."""
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    if d > 8:
        raise ValueError(f"d={d} too large (limit 8)")
    d = int(d)
    vec = np.zeros(d * d, dtype=complex)
    vec[[i * d + i for i in range(d)]] = 1.0 / math.sqrt(d)
    return DensityMatrix(_projector(vec), d, d)


def qubit_basis(theta: float, phi: float) -> np.ndarray:
    """Unitary whose columns are ``|v> = (cos(t/2), e^{i phi} sin(t/2))`` and ``|v_perp>``."""
    ct, st = math.cos(theta / 2.0), math.sin(theta / 2.0)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[ct, -e.conjugate() * st], [e * st, ct]], dtype=complex)


def zero_discord(
    p: Sequence[float],
    basis_angles: tuple[float, float],
    sigmas: Sequence[DensityMatrix | np.ndarray],
) -> DensityMatrix:
    """Classical-quantum state ``sum_k p_k |k><k| (x) sigma_k`` on ``2 (x) N``."""
    p = np.asarray(p, dtype=float)
    if p.shape != (2,) or np.any(p < -POLICY.trace) or abs(p.sum() - 1.0) > POLICY.trace:
        raise ValueError(f"p must be a probability pair, got {p.tolist()}")
    if len(sigmas) != 2:
        raise ValueError("need exactly two conditional states")
    blocks = []
    for s in sigmas:
        s = s if isinstance(s, DensityMatrix) else DensityMatrix(np.asarray(s), 1, len(s))
        blocks.append(s.mat)
    if blocks[0].shape != blocks[1].shape:
        raise DimensionError("conditional states must share a dimension")
    u = qubit_basis(*basis_angles)
    mat = sum(
        pk * np.kron(np.outer(u[:, k], u[:, k].conj()), blk) for k, (pk, blk) in enumerate(zip(p, blocks))
    )
    return DensityMatrix(mat, 2, blocks[0].shape[0])


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(seed))


def random_density(dim: int, rank: int | None = None, seed=None, dims: tuple[int, int] | None = None) -> DensityMatrix:
    """``G G^H / Tr(G G^H)`` for a complex Gaussian ``dim x rank`` matrix ``G``.

    ``seed`` may be an int or a ``Generator`` (which is then advanced).
    ``dims`` defaults to ``(1, dim)``.
    """
    rank = dim if rank is None else rank
    if not (1 <= rank <= dim):
        raise ValueError(f"need 1 <= rank <= dim, got rank={rank}, dim={dim}")
    rng = make_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    dims = (1, dim) if dims is None else dims
    return DensityMatrix(mat, *dims)


def random_zero_discord(dim_b: int, seed=None) -> DensityMatrix:
    """Random classical-quantum state on ``2 (x) dim_b`` in a random A basis."""
    rng = make_rng(seed)
    p0 = rng.uniform()
    theta = math.acos(rng.uniform(-1.0, 1.0))
    phi = rng.uniform(0.0, 2.0 * math.pi)
    sigmas = [random_density(dim_b, int(rng.integers(1, dim_b + 1)), rng) for _ in range(2)]
    return zero_discord((p0, 1.0 - p0), (theta, phi), sigmas)


# ----------------------------------------------------------------------------
# named families


@dataclass(frozen=True)
class StateFamily:
    """A named family member: ``tag`` plus its free parameters."""

    tag: str
    params: dict[str, float] = field(default_factory=dict)

    def build(self) -> DensityMatrix:
        return build_family(self.tag, **self.params)

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.tag}({inner})"


_ALIASES = {
    "bell-mixture": "bell_mixture",
    "max-entangled": "max_entangled",
    "u_c": "uc",
    "uc_family": "uc",
    "zero-discord": "zero_discord",
}


def canonical_family(tag: str) -> str:
    tag = tag.strip().lower()
    return _ALIASES.get(tag, tag)


def build_family(tag: str, **params) -> DensityMatrix:
    tag = canonical_family(tag)
    try:
        if tag == "werner":
            return werner(params["a"])
        if tag == "bell":
            return bell(params["kind"])
        if tag == "bell_mixture":
            return bell_mixture(params["b"])
        if tag == "uc":
            return uc_family(params["u"], params["c"])
        if tag == "max_entangled":
            return max_entangled(params["d"])
        if tag == "random":
            dim_b = int(params.get("dim_b", 2))
            rank = params.get("rank")
            return random_density(2 * dim_b, None if rank is None else int(rank), int(params.get("seed", 0)), (2, dim_b))
        if tag == "zero_discord":
            return random_zero_discord(int(params.get("dim_b", 2)), int(params.get("seed", 0)))
    except KeyError as exc:
        raise ValueError(f"family {tag!r} requires parameter {exc.args[0]!r}") from None
    raise ValueError(f"unknown family {tag!r}")


# ----------------------------------------------------------------------------
# state file: {"dimA": M, "dimB": N, "entries": [[re, im], ...]} row-major


class StateFileError(ValueError):
    """Malformed state file."""


def dump_state(rho: DensityMatrix) -> str:
    entries = ", ".join(f"[{z.real:.17g}, {z.imag:.17g}]" for z in rho.mat.ravel())
    return f'{{"dimA": {rho.dim_a}, "dimB": {rho.dim_b}, "entries": [{entries}]}}\n'


def load_state(text: str, source: str = "<string>") -> DensityMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise StateFileError(f"{source}: top level must be an object")
    for key in ("dimA", "dimB", "entries"):
        if key not in doc:
            raise StateFileError(f"{source}: missing field {key!r}")
    m, n = doc["dimA"], doc["dimB"]
    for key, val in (("dimA", m), ("dimB", n)):
        if not isinstance(val, int) or isinstance(val, bool) or val < 1:
            raise StateFileError(f"{source}: field {key!r} must be a positive integer, got {val!r}")
    entries = doc["entries"]
    dim = m * n
    if not isinstance(entries, list) or len(entries) != dim * dim:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise StateFileError(f"{source}: field 'entries' must hold {dim * dim} [re, im] pairs, got {got}")
    vals = np.empty(dim * dim, dtype=complex)
    for k, e in enumerate(entries):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in e)
        ):
            raise StateFileError(f"{source}: entries[{k}] must be a [re, im] number pair, got {e!r}")
        vals[k] = complex(e[0], e[1])
    try:
        return DensityMatrix(vals.reshape(dim, dim), m, n)
    except InvalidStateError as exc:
        raise StateFileError(f"{source}: {exc}") from None


def write_state(rho: DensityMatrix, path) -> None:
    Path(path).write_text(dump_state(rho), encoding="utf-8")


def read_state(path) -> DensityMatrix:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from None
    return load_state(text, str(path))
