"""Exhaustive comparison of the direct HN algorithms against sub-sum search."""

import argparse

from stabflow.oracle import sweep_filtrations


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-atoms", type=int, default=6)
    p.add_argument("--max-rank", type=int, default=3)
    p.add_argument("--max-abs-degree", type=int, default=4)
    args = p.parse_args()
    rep = sweep_filtrations(args.max_atoms, args.max_rank, args.max_abs_degree)
    print(f"bundles checked: {rep.instances}")
    print(f"mismatches:      {rep.mismatches}")
    print(f"elapsed:         {rep.elapsed:.1f} s")
    for ex in rep.examples[:5]:
        print("  mismatch:", ex)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
