"""Grid refinement of the identities that only hold up to O(h^2).

For each n the script reports the mean over seeds of
  * max |F(u.A) - u F(A) u^-1|          (finite gauge equivariance)
  * max |g.A - u.A| for unitary g = u   (complex action restricted to U(r))
and the ratio between successive grids, which should approach 4.
"""

import argparse
import csv
import sys

import numpy as np

from stabflow.lattice import (
    ConnectionField,
    GridSpec,
    complex_gauge_act,
    curvature,
    dag,
    gauge_act,
    random_gauge,
    smooth_ah_field,
)


def errors(n, rank, seed, amplitude):
    g = GridSpec(n, rank, 1)
    rng = np.random.default_rng(seed)
    a = ConnectionField(g, smooth_ah_field(g, rng, 1, amplitude), smooth_ah_field(g, rng, 1, amplitude))
    u = random_gauge(g, rng, 1, amplitude)
    f = curvature(a).f
    equiv = np.abs(curvature(gauge_act(u, a)).f - u.u @ f @ dag(u.u)).max()
    c, un = complex_gauge_act(u.u, a), gauge_act(u, a)
    cplx = max(np.abs(c.ax - un.ax).max(), np.abs(c.ay - un.ay).max())
    return equiv, cplx


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128])
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--amplitude", type=float, default=0.25)
    p.add_argument("--csv", help="also write the table here")
    args = p.parse_args()

    table = np.array([[errors(n, args.rank, s, args.amplitude) for s in range(args.seeds)] for n in args.sizes])
    rows = []
    for k, n in enumerate(args.sizes):
        mean = table[k].mean(axis=0)
        ratio = (table[k - 1] / table[k]).mean(axis=0) if k else (np.nan, np.nan)
        rows.append((n, *mean, *ratio))
    w = csv.writer(open(args.csv, "w", newline="") if args.csv else sys.stdout, lineterminator="\n")
    w.writerow(("n", "equivariance_err", "complex_err", "equivariance_ratio", "complex_ratio"))
    for n, e1, e2, r1, r2 in rows:
        w.writerow((n, f"{e1:.4e}", f"{e2:.4e}", f"{r1:.3f}", f"{r2:.3f}"))


if __name__ == "__main__":
    main()
