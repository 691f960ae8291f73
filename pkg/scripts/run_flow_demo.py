"""Run the Yang-Mills descent for a few (rank, degree) pairs and save traces."""

import argparse
import time
from pathlib import Path

from stabflow.flow import FlowConfig, central_residual, jacobian_coordinates, run_flow
from stabflow.lattice import GridSpec, random_connection


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=["lbfgs", "gd"], default="lbfgs")
    p.add_argument("--max-steps", type=int, default=50_000)
    p.add_argument("--out", default="flow_runs")
    p.add_argument("cases", nargs="*", default=["1,0", "1,1", "2,0", "2,1"], help="rank,degree pairs")
    args = p.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for case in args.cases:
        r, d = map(int, case.split(","))
        cfg = FlowConfig(GridSpec(args.n, r, d), seed=args.seed, max_steps=args.max_steps, method=args.method)
        t0 = time.perf_counter()
        res = run_flow(random_connection(cfg.grid, cfg.seed, cfg.amplitude), cfg)
        dt = time.perf_counter() - t0
        res.trace.write_csv(out / f"trace_r{r}_d{d}.csv")
        line = (
            f"r={r} d={d}: {res.steps} steps, converged={res.converged}, "
            f"central_residual={central_residual(res.field):.2e}, {dt:.1f} s"
        )
        if r == 1 and d == 0 and res.converged:
            line += " jacobian=({:.6f}, {:.6f})".format(*jacobian_coordinates(res.field))
        print(line)


if __name__ == "__main__":
    main()
