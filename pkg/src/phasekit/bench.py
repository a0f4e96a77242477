"""Frequency sweeps over the test equations, one CSV row per (k, method).

Each row records the time to build the phase functions, the largest error
of the assembled solution against an adaptive spectral reference at 10,000
equispaced points, the largest normalized Riccati residual, the number of
Chebyshev coefficients, the panel count and the condition number of the
linear system for the solution's coefficients.  Failures of a method are
recorded in the status column instead of aborting the sweep.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .equations import get_equation
from .errors import (ConditioningError, PhasekitError, PropagationError, RefinementError,
                     SeedError, TurningPointError)
from .levin_global import GlobalConfig, global_levin
from .levin_local import LocalConfig, local_levin
from .phase_basis import solve_with_conditions
from .phaseset import coefficient_count, max_jump, riccati_residual
from .reference import reference_solution

NPOINTS = 10_000
JUMP_TOL = 1e-8
KMIN_EXPONENT, KMAX_EXPONENT = 8, 20
METHODS = {"global": (GlobalConfig, global_levin), "local": (LocalConfig, local_levin)}

_STATUS = [
    (TurningPointError, "turning_point"),
    (RefinementError, "refinement_failed"),
    (SeedError, "seed_failed"),
    (PropagationError, "propagation_failed"),
    (ConditioningError, "ill_conditioned"),
    (PhasekitError, "failed"),
]


@dataclass
class ExperimentSpec:
    equation: str
    kparams: list
    method: str = "both"
    conditions: str = "default"
    out: str | None = None
    eps: float = 1e-12
    order: int = 16
    jobs: int = 1
    reference: bool = True

    def __post_init__(self):
        eq = get_equation(self.equation)
        if self.method not in ("global", "local", "both"):
            raise ValueError(f"method must be global, local or both, got {self.method!r}")
        if self.conditions != "default":
            raise ValueError(f"only the default condition set is available, got {self.conditions!r}")
        for k in self.kparams:
            e = math.log2(k)
            if e != int(e) or not KMIN_EXPONENT <= e <= eq.kmax_exponent:
                raise ValueError(f"k = {k} is not a power of two in [2^{KMIN_EXPONENT}, 2^{eq.kmax_exponent}]")

    @property
    def methods(self):
        return ["global", "local"] if self.method == "both" else [self.method]


@dataclass
class ResultRow:
    equation: str
    method: str
    kparam: float
    time_s: float
    max_err: float = math.nan
    max_residual: float = math.nan
    coeff_count: int = 0
    panel_count: int = 0
    cond_number: float = math.nan
    status: str = "ok"


CSV_FIELDS = [f.name for f in fields(ResultRow)]


def kparams(equation, kmin=KMIN_EXPONENT, kmax=KMAX_EXPONENT):
    """Powers of two 2^kmin..2^kmax, capped at the equation's largest k."""
    top = min(kmax, get_equation(equation).kmax_exponent)
    return [2.0**e for e in range(kmin, top + 1)]


def _status_of(exc):
    for cls, name in _STATUS:
        if isinstance(exc, cls):
            return name
    return "failed"


def _row(eq, method, k, cfg, ref, ts):
    coeffs = eq.coeffs(k)
    build = METHODS[method][1]
    t0 = time.perf_counter()
    try:
        ps = build(cfg, coeffs)
    except PhasekitError as exc:
        return ResultRow(eq.name, method, k, time.perf_counter() - t0, status=_status_of(exc))
    row = ResultRow(eq.name, method, k, time.perf_counter() - t0)
    row.coeff_count = coefficient_count(ps)
    row.panel_count = ps.panel_count
    with np.errstate(all="ignore"):
        res = riccati_residual(ps, coeffs, ts, eq.residual_scale(k))
    row.max_residual = float(np.max(res))
    if np.max(max_jump(ps)) > JUMP_TOL:
        row.status = "discontinuous"
    if ref is not None:
        try:
            sol = solve_with_conditions(ps, eq.conditions(k))
            row.cond_number = sol.cond
            row.max_err = float(np.max(np.abs(sol(ts) - ref)))
        except ConditioningError as exc:
            row.cond_number = np.inf if exc.cond is None else exc.cond
            if row.status == "ok":
                row.status = "ill_conditioned"
    return row


def _rows_for_k(spec, k):
    eq = get_equation(spec.equation)
    ts = np.linspace(-1.0, 1.0, NPOINTS)
    ref = None
    if spec.reference and eq.has_reference:
        ref = reference_solution(eq.coeffs(k), eq.conditions(k), s=k)(ts)
    rows = []
    for method in spec.methods:
        cfg = METHODS[method][0](k=spec.order, eps=spec.eps)
        rows.append(_row(eq, method, k, cfg, ref, ts))
    return rows


def write_csv(rows, out):
    with open(out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        w.writeheader()
        for row in rows:
            w.writerow(asdict(row))


def run_experiment(spec):
    """Run the sweep described by ``spec``; writes spec.out if set."""
    if spec.jobs > 1 and len(spec.kparams) > 1:
        with ProcessPoolExecutor(spec.jobs) as pool:
            chunks = list(pool.map(_rows_for_k, [spec] * len(spec.kparams), spec.kparams))
    else:
        chunks = [_rows_for_k(spec, k) for k in spec.kparams]
    rows = [r for chunk in chunks for r in chunk]
    if spec.out:
        write_csv(rows, spec.out)
    return rows


def build_parser():
    p = argparse.ArgumentParser(prog="phasekit-bench", description=__doc__.split("\n")[0])
    p.add_argument("--experiment", required=True, help="equation id, e.g. exp1")
    p.add_argument("--method", default="both", choices=["global", "local", "both"])
    p.add_argument("--kmin", type=int, default=KMIN_EXPONENT, help="smallest k is 2^kmin")
    p.add_argument("--kmax", type=int, default=KMAX_EXPONENT, help="largest k is 2^kmax")
    p.add_argument("--out", default="results.csv")
    p.add_argument("--epsilon", type=float, default=1e-12)
    p.add_argument("--order", type=int, default=16, help="Chebyshev points per panel")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (timings are cleaner serial)")
    p.add_argument("--serial", action="store_true", help="force one process")
    p.add_argument("--no-reference", action="store_true", help="skip reference solves (errors become NaN)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = ExperimentSpec(
            equation=args.experiment,
            kparams=kparams(args.experiment, args.kmin, args.kmax),
            method=args.method,
            out=args.out,
            eps=args.epsilon,
            order=args.order,
            jobs=1 if args.serial else args.jobs,
            reference=not args.no_reference,
        )
        rows = run_experiment(spec)
    except (ValueError, OSError) as exc:
        print(f"phasekit-bench: {exc}", file=sys.stderr)
        return 2
    for r in rows:
        print(f"{r.equation} {r.method:6s} k=2^{int(math.log2(r.kparam)):<2d} {r.time_s:8.3f}s "
              f"err={r.max_err:.2e} res={r.max_residual:.2e} coeffs={r.coeff_count} {r.status}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
