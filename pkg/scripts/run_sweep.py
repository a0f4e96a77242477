"""Run the frequency sweep for every registered equation, one CSV each.

    python3 scripts/run_sweep.py --kmax 12 --outdir results
"""
import argparse
from pathlib import Path

from phasekit.bench import ExperimentSpec, kparams, run_experiment
from phasekit.equations import registry


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kmin", type=int, default=8)
    p.add_argument("--kmax", type=int, default=12)
    p.add_argument("--outdir", default="results")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-reference", action="store_true")
    args = p.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name in registry():
        spec = ExperimentSpec(name, kparams(name, args.kmin, args.kmax), out=str(out / f"{name}.csv"),
                              jobs=args.jobs, reference=not args.no_reference)
        for r in run_experiment(spec):
            print(f"{r.equation} {r.method:6s} k={r.kparam:9.0f} {r.time_s:7.3f}s "
                  f"err={r.max_err:.2e} res={r.max_residual:.2e} coeffs={r.coeff_count:6d} {r.status}",
                  flush=True)


if __name__ == "__main__":
    main()
