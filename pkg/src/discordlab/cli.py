"""``discordlab`` command line: analyze, sweep, oracle-compare, gen.

Exit codes: 0 success, 2 input or validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .bounds import gqd_lower_bound, work_deficit_lower_bound
from .criteria import discord_witness, minor_report, ppt_min_eigenvalue
from .matops import ConvergenceError, DensityMatrix
from .oracle import DEFAULT_GRID, DEFAULT_REFINE, discord_A_exact, gqd_brute, work_deficit_exact
from .policy import resolve_tolerance
from .states import (
    BELL_KINDS,
    StateFamily,
    StateFileError,
    canonical_family,
    make_rng,
    max_entangled,
    random_density,
    random_zero_discord,
    read_state,
    uc_weight_f,
    write_state,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

_LN2 = math.log(2.0)
VIOLATION_TOL = 1e-6

SWEEP_COLUMNS = {
    "werner": ("a", "discord_oracle", "delta_pm14", "ppt_min_eig", "gqd_bound", "wd_bound"),
    "bell_mixture": ("b", "discord_oracle", "delta_pm14", "gqd_bound", "wd_bound"),
    "uc": ("u", "c", "f", "max_delta", "ppt_min_eig"),
}
COMPARE_COLUMNS = (
    "index",
    "gqd_bound",
    "gqd_brute",
    "wd_bound",
    "wd_exact_nats",
    "wd_exact_bits",
    "gqd_violation",
    "wd_violation",
)


class UsageError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return format(0.0 if x == 0.0 else x, ".12g")


# ----------------------------------------------------------------------------
# analysis report


@dataclass
class AnalysisReport:
    state_descriptor: str
    dims: tuple[int, int]
    tolerance: float
    gqd_bound: float
    gqd_L: list[float]
    gqd_lambda_min: list[float]
    wd_bound_bits: float
    wd_bound_nats: float
    ppt_min_eig: float
    verdict: str | None = None
    witness_pair: tuple[int, int] | None = None
    max_delta: float | None = None
    changed_minors: list[dict[str, float]] = field(default_factory=list)
    criteria_note: str | None = None
    oracle: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["dims"] = list(self.dims)
        if self.witness_pair is not None:
            d["witness_pair"] = list(self.witness_pair)
        return {k: v for k, v in d.items() if v is not None}

    def render_text(self) -> str:
        lines = [f"state: {self.state_descriptor}  dims={self.dims[0]}x{self.dims[1]}"]
        if self.verdict is not None:
            wp = "-" if self.witness_pair is None else f"PM{self.witness_pair[0]},{self.witness_pair[1]}"
            lines.append(f"verdict: {self.verdict}  witness: {wp}  max_delta: {fmt(self.max_delta)}  tol: {fmt(self.tolerance)}")
            for p in self.changed_minors:
                lines.append(f"  PM{p['n']},{p['m']}: rho {fmt(p['pm_rho'])}  rho^TB {fmt(p['pm_pt'])}  delta {fmt(p['delta'])}")
        else:
            lines.append(f"criteria: skipped ({self.criteria_note})")
        lines.append(f"ppt_min_eig: {fmt(self.ppt_min_eig)}")
        lines.append(f"gqd_bound: {fmt(self.gqd_bound)}")
        lines.append(f"wd_bound: {fmt(self.wd_bound_bits)} bits ({fmt(self.wd_bound_nats)} nats)")
        if self.oracle:
            o = self.oracle
            lines.append(f"oracle discord: {fmt(o['discord_bits'])} bits")
            lines.append(f"oracle gqd: {fmt(o['gqd'])}")
            lines.append(f"oracle wd: {fmt(o['wd_bits'])} bits ({fmt(o['wd_nats'])} nats)")
        return "\n".join(lines)


def analyze_state(
    rho: DensityMatrix,
    descriptor: str,
    *,
    tol: float,
    oracle: bool = False,
    grid: int = DEFAULT_GRID,
    refine: int = DEFAULT_REFINE,
) -> AnalysisReport:
    bound = gqd_lower_bound(rho)
    wd_bits = bound.bound / (2.0 * _LN2)
    rep = AnalysisReport(
        state_descriptor=descriptor,
        dims=rho.dims,
        tolerance=tol,
        gqd_bound=bound.bound,
        gqd_L=bound.L.tolist(),
        gqd_lambda_min=bound.lam_min.tolist(),
        wd_bound_bits=wd_bits,
        wd_bound_nats=wd_bits * _LN2,
        ppt_min_eig=ppt_min_eigenvalue(rho),
    )
    if rho.dim_a == 2 and rho.dim_b >= 2:
        mr = minor_report(rho, tol)
        verdict = discord_witness(rho, tol)
        rep.verdict = verdict.verdict.value
        rep.witness_pair = verdict.witness_pair
        rep.max_delta = verdict.max_delta
        rep.changed_minors = [p._asdict() for p in mr.changed]
    else:
        rep.criteria_note = f"minor criterion needs dimA=2, got dimA={rho.dim_a}"
    if oracle:
        if rho.dim_a != 2:
            raise UsageError(f"--oracle needs dimA=2, got dimA={rho.dim_a}")
        disc = discord_A_exact(rho, grid, refine)
        gq = gqd_brute(rho, grid, refine)
        wd = work_deficit_exact(rho, grid, refine)
        rep.oracle = {
            "discord_bits": disc.value,
            "discord_angles": [disc.argmin_angles.theta, disc.argmin_angles.phi],
            "gqd": gq.value,
            "gqd_angles": [gq.argmin_angles.theta, gq.argmin_angles.phi],
            "wd_nats": wd.value,
            "wd_bits": wd.bits,
            "wd_angles": [wd.argmin_angles.theta, wd.argmin_angles.phi],
            "grid": grid,
            "refine": refine,
        }
    return rep


# ----------------------------------------------------------------------------
# family arguments


def _add_family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", help="werner | bell | bell_mixture | uc | max_entangled | random | zero_discord")
    p.add_argument("--a", type=float, help="Werner weight")
    p.add_argument("--b", type=float, help="Bell-mixture weight")
    p.add_argument("--u", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--d", type=int, help="local dimension of max_entangled")
    p.add_argument("--kind", choices=BELL_KINDS)
    p.add_argument("--dim-b", type=int, default=2, help="B dimension for random families")
    p.add_argument("--rank", type=int)
    p.add_argument("--seed", type=int, default=0)


_FAMILY_PARAMS = {
    "werner": ("a",),
    "bell": ("kind",),
    "bell_mixture": ("b",),
    "uc": ("u", "c"),
    "max_entangled": ("d",),
    "random": ("dim_b", "rank", "seed"),
    "zero_discord": ("dim_b", "seed"),
}


def family_from_args(args) -> StateFamily:
    tag = canonical_family(args.family)
    if tag not in _FAMILY_PARAMS:
        raise UsageError(f"unknown family {args.family!r}")
    params = {}
    for name in _FAMILY_PARAMS[tag]:
        val = getattr(args, name)
        if val is None:
            if name == "rank":
                continue
            raise UsageError(f"family {tag} requires --{name.replace('_', '-')}")
        params[name] = val
    return StateFamily(tag, params)


def _load_input(args) -> tuple[DensityMatrix, str]:
    if args.state and args.family:
        raise UsageError("give either a state file or --family, not both")
    if args.state:
        return read_state(args.state), str(args.state)
    if not args.family:
        raise UsageError("need a state file or --family")
    fam = family_from_args(args)
    return fam.build(), fam.describe()


# ----------------------------------------------------------------------------
# parallel helpers


def _pmap(func: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * jobs))))


def _werner_row(job):
    a, grid, refine = job
    from .states import werner

    rho = werner(a)
    rep = minor_report(rho)
    return (a, discord_A_exact(rho, grid, refine).value, rep.delta(1, 4), ppt_min_eigenvalue(rho),
            gqd_lower_bound(rho).bound, work_deficit_lower_bound(rho))


def _bell_mixture_row(job):
    b, grid, refine = job
    from .states import bell_mixture

    rho = bell_mixture(b)
    rep = minor_report(rho)
    return (b, discord_A_exact(rho, grid, refine).value, rep.delta(1, 4),
            gqd_lower_bound(rho).bound, work_deficit_lower_bound(rho))


def _uc_row(job):
    u, c = job
    from .states import uc_family

    rho = uc_family(u, c)
    return (u, c, max(0.0, uc_weight_f(u, c)), minor_report(rho).max_delta, ppt_min_eigenvalue(rho))


def uc_grid(step: float) -> list[tuple[float, float]]:
    """Points of the feasible (u, c) triangle ``2u + c <= 1`` on a square grid."""
    k = round(1.0 / step)
    if k < 1 or not math.isclose(k * step, 1.0, rel_tol=0, abs_tol=1e-12):
        raise UsageError(f"--step must divide 1 evenly, got {step}")
    pts = []
    for i in range(k // 2 + 1):
        for j in range(k - 2 * i + 1):
            pts.append((i / k, j / k))
    return pts


def sweep_rows(family: str, *, start=0.0, end=1.0, steps=101, step=0.01, grid=DEFAULT_GRID,
               refine=DEFAULT_REFINE, jobs=1) -> tuple[tuple[str, ...], list[tuple]]:
    family = canonical_family(family)
    if family not in SWEEP_COLUMNS:
        raise UsageError(f"sweep family must be one of {sorted(SWEEP_COLUMNS)}, got {family!r}")
    if family == "uc":
        rows = _pmap(_uc_row, uc_grid(step), jobs)
    else:
        if not (steps >= 2 and start <= end and 0.0 <= start and end <= 1.0):
            raise UsageError(f"need 0 <= start <= end <= 1 and steps >= 2, got {start}, {end}, {steps}")
        jobs_ = [(float(x), grid, refine) for x in np.linspace(start, end, steps)]
        worker = _werner_row if family == "werner" else _bell_mixture_row
        rows = _pmap(worker, jobs_, jobs)
    return SWEEP_COLUMNS[family], rows


def write_csv(columns: Iterable[str], rows: Iterable[Sequence], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(x) for x in r])


# ----------------------------------------------------------------------------
# oracle comparison


def _compare_row(job):
    label, rho_or_spec, grid, refine = job
    if isinstance(rho_or_spec, DensityMatrix):
        rho = rho_or_spec
    else:
        ensemble, dims, child = rho_or_spec
        rng = make_rng(child)
        if ensemble == "zero_discord":
            rho = random_zero_discord(dims[1], rng)
        else:
            dim = dims[0] * dims[1]
            rho = random_density(dim, int(rng.integers(1, dim + 1)), rng, dims)
    gb = gqd_lower_bound(rho).bound
    wb = gb / (2.0 * _LN2)
    gx = gqd_brute(rho, grid, refine).value
    wd = work_deficit_exact(rho, grid, refine)
    return (label, gb, gx, wb, wd.value, wd.bits, gb > gx + VIOLATION_TOL, wb > wd.bits + VIOLATION_TOL)


def compare_rows(dims, count, seed, *, ensemble="random", inject_max_entangled=False,
                 grid=DEFAULT_GRID, refine=DEFAULT_REFINE, jobs=1) -> list[tuple]:
    dims = tuple(dims)
    if dims not in ((2, 2), (2, 3), (2, 4)):
        raise UsageError(f"--dims must be one of 2,2 / 2,3 / 2,4; got {dims}")
    if not (0 <= count <= 10000):
        raise UsageError(f"--count must be in [0, 10000], got {count}")
    if ensemble not in ("random", "zero_discord"):
        raise UsageError(f"unknown ensemble {ensemble!r}")
    children = np.random.SeedSequence(seed).spawn(count)
    work = []
    if inject_max_entangled:
        if dims != (2, 2):
            raise UsageError("--inject-max-entangled needs --dims 2,2")
        work.append(("max_entangled(2)", max_entangled(2), grid, refine))
    work += [(str(i), (ensemble, dims, child), grid, refine) for i, child in enumerate(children)]
    return _pmap(_compare_row, work, jobs)


def compare_summary(rows: Sequence[tuple]) -> dict[str, float]:
    if not rows:
        return {"count": 0, "gqd_violations": 0, "wd_violations": 0}
    gb = np.array([r[1] for r in rows])
    gx = np.array([r[2] for r in rows])
    wb = np.array([r[3] for r in rows])
    wx = np.array([r[5] for r in rows])
    ok = gx > 1e-9
    ratio = gb[ok] / gx[ok] if ok.any() else np.array([math.nan])
    return {
        "count": len(rows),
        "gqd_violations": int(sum(r[6] for r in rows)),
        "wd_violations": int(sum(r[7] for r in rows)),
        "max_gqd_excess": float(np.max(gb - gx)),
        "max_wd_excess_bits": float(np.max(wb - wx)),
        "gqd_tightness_mean": float(np.mean(ratio)),
        "gqd_tightness_min": float(np.min(ratio)),
    }


# ----------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    tol = resolve_tolerance(args.tol)
    rho, desc = _load_input(args)
    rep = analyze_state(rho, desc, tol=tol, oracle=args.oracle, grid=args.grid, refine=args.refine)
    if args.json:
        print(json.dumps(rep.to_dict(), indent=2))
    else:
        print(rep.render_text())
    return EXIT_OK


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def cmd_sweep(args) -> int:
    cols, rows = sweep_rows(args.family, start=args.start, end=args.end, steps=args.steps, step=args.step,
                            grid=args.grid, refine=args.refine, jobs=args.jobs)
    out, close = _open_out(args.output)
    try:
        write_csv(cols, rows, out)
    finally:
        if close:
            out.close()
    return EXIT_OK


def _parse_dims(text: str) -> tuple[int, int]:
    try:
        m, n = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like 2,3; got {text!r}") from None
    return (m, n)


def cmd_oracle_compare(args) -> int:
    rows = compare_rows(args.dims, args.count, args.seed, ensemble=args.ensemble,
                        inject_max_entangled=args.inject_max_entangled, grid=args.grid,
                        refine=args.refine, jobs=args.jobs)
    out, close = _open_out(args.output)
    try:
        write_csv(COMPARE_COLUMNS, rows, out)
    finally:
        if close:
            out.close()
    summary = compare_summary(rows)
    stream = sys.stderr if not close else sys.stdout
    for k, v in summary.items():
        print(f"{k}: {fmt(v)}", file=stream)
    return EXIT_OK


def cmd_gen(args) -> int:
    fam = family_from_args(args)
    write_state(fam.build(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discordlab",
        description="Partial-transpose discord witness and spectral GQD / work-deficit bounds for 2xN states.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def oracle_opts(p):
        p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="theta grid size (phi uses twice as many)")
        p.add_argument("--refine", type=int, default=DEFAULT_REFINE, help="compass refinement passes")

    p = sub.add_parser("analyze", help="report criteria, bounds and optionally oracle values for one state")
    p.add_argument("state", nargs="?", help="JSON state file")
    _add_family_args(p)
    p.add_argument("--oracle", action="store_true", help="also run brute-force oracles")
    p.add_argument("--tol", type=float, help="minor-invariance tolerance (env DISCORDLAB_TOL)")
    p.add_argument("--json", action="store_true")
    oracle_opts(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="CSV sweep over a family")
    p.add_argument("--family", required=True, choices=["werner", "bell_mixture", "bell-mixture", "uc"])
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--end", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--step", type=float, default=0.01, help="grid step for the uc triangle")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", default="-")
    oracle_opts(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-compare", help="bounds vs brute-force oracles on a random ensemble")
    p.add_argument("--dims", type=_parse_dims, default=(2, 2))
    p.add_argument("--count", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ensemble", choices=["random", "zero_discord"], default="random")
    p.add_argument("--inject-max-entangled", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", default="-")
    oracle_opts(p)
    p.set_defaults(func=cmd_oracle_compare)

    p = sub.add_parser("gen", help="write a family member to a JSON state file")
    _add_family_args(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    if args.command == "gen" and not args.family:
        print("error: gen needs --family", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (StateFileError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
