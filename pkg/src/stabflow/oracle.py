"""Brute-force counterparts of the filtration formulas.

Nothing here calls :mod:`stabflow.filtration`.  Sub-sums are enumerated as
index subsets of the atom list and slopes are compared by integer
cross-multiplication, so these functions stay an independent check on the
closed-form shortcuts (max atom slope, grouping by slope).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from .slope import BundleSum, StableAtom, atom

__all__ = [
    "exhaustive_mu_max",
    "exhaustive_destabilizer",
    "exhaustive_hn_steps",
    "SweepReport",
    "sweep_filtrations",
]


def _subsets(atoms: tuple[StableAtom, ...]):
    k = len(atoms)
    for mask in range(1, 1 << k):
        r = d = 0
        for j in range(k):
            if mask >> j & 1:
                r += atoms[j].rank
                d += atoms[j].degree
        yield mask, r, d


def _pick(atoms, mask):
    return tuple(a for j, a in enumerate(atoms) if mask >> j & 1)


def _best_mask(atoms: tuple[StableAtom, ...]) -> tuple[int, int, int]:
    """Index mask of the maximal-rank sub-sum among maximal-slope sub-sums."""
    best = None  # (mask, r, d)
    for mask, r, d in _subsets(atoms):
        if best is None:
            best = (mask, r, d)
            continue
        _, br, bd = best
        lhs, rhs = d * br, bd * r
        if lhs > rhs or (lhs == rhs and r > br):
            best = (mask, r, d)
    return best


def exhaustive_mu_max(b: BundleSum) -> Fraction:
    _, r, d = _best_mask(b.atoms)
    return Fraction(d, r)


def exhaustive_destabilizer(b: BundleSum) -> BundleSum:
    mask, r, d = _best_mask(b.atoms)
    # uniqueness as a multiset: every other optimal index set must pick the same atoms
    chosen = BundleSum(_pick(b.atoms, mask))
    for m, r2, d2 in _subsets(b.atoms):
        if d2 * r == d * r2 and r2 == r and m != mask:
            if BundleSum(_pick(b.atoms, m)) != chosen:
                raise AssertionError(f"destabilizing sub-sum of {b} is not unique")
    return chosen


def exhaustive_hn_steps(b: BundleSum) -> list[BundleSum]:
    """Iterate the destabilizer on successive complements."""
    remaining = list(b.atoms)
    taken: list[StableAtom] = []
    steps = []
    while remaining:
        mask, _, _ = _best_mask(tuple(remaining))
        picked = _pick(remaining, mask)
        taken.extend(picked)
        remaining = [a for j, a in enumerate(remaining) if not mask >> j & 1]
        steps.append(BundleSum(tuple(taken)))
    return steps


_CHUNK = 20000


@dataclass
class SweepReport:
    instances: int = 0
    mismatches: int = 0
    elapsed: float = 0.0
    examples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def _oracle_chains(ranks: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    """Vectorised iterated-destabilizer search for a batch of k-atom bundles.

    Returns an (M, k) array of chosen index masks, one per HN step, padded
    with zeros once all atoms are used.
    """
    M, k = ranks.shape
    masks = np.arange(1, 1 << k)
    member = (masks[:, None] >> np.arange(k)[None, :]) & 1  # (S, k)
    sub_r = ranks @ member.T  # (M, S)
    sub_d = degrees @ member.T
    max_rank = int(ranks.sum(axis=1).max())
    scale = lcm(*range(1, max_rank + 1))
    # slope first (exact: every sub-rank divides scale), rank breaks ties
    key = sub_d * (scale // sub_r) * (max_rank + 1) + sub_r
    neg = np.iinfo(np.int64).min
    out = np.zeros((M, k), dtype=np.int64)
    rows = np.arange(M)
    remaining = np.full(M, (1 << k) - 1)
    for step in range(k):
        if rows.size == 0:
            break
        valid = (masks[None, :] & ~remaining[:, None]) == 0
        kk = np.where(valid, key[rows], neg)
        best = kk.argmax(axis=1)
        top = kk[np.arange(rows.size), best]
        if np.any((kk == top[:, None]).sum(axis=1) != 1):
            raise AssertionError("maximal-rank maximal-slope index set not unique")
        chosen = masks[best]
        out[rows, step] = chosen
        remaining = remaining & ~chosen
        keep = remaining != 0
        rows, remaining = rows[keep], remaining[keep]
    return out


def sweep_filtrations(
    max_atoms: int = 6, max_rank: int = 3, max_abs_degree: int = 4, limit_examples: int = 5
) -> SweepReport:
    """Compare mu_max, destabilizer and hn_filtration with exhaustive search
    on every atom multiset in the given box."""
    from . import filtration as F  # the code under test

    t0 = time.perf_counter()
    types = sorted(
        (atom(r, d) for r in range(1, max_rank + 1) for d in range(-max_abs_degree, max_abs_degree + 1)),
        key=lambda a: a.key,
    )
    tr = np.array([a.rank for a in types], dtype=np.int64)
    td = np.array([a.degree for a in types], dtype=np.int64)
    rep = SweepReport()
    for k in range(1, max_atoms + 1):
        combos = np.array(list(itertools.combinations_with_replacement(range(len(types)), k)), dtype=np.int64)
        ranks, degrees = tr[combos], td[combos]
        chains = np.concatenate(
            [_oracle_chains(ranks[i : i + _CHUNK], degrees[i : i + _CHUNK]) for i in range(0, len(combos), _CHUNK)]
        )
        cumulative = np.bitwise_or.accumulate(chains, axis=1)
        member = (chains[:, :1] >> np.arange(k)) & 1
        top_r = (ranks * member).sum(axis=1)
        top_d = (degrees * member).sum(axis=1)
        g = np.gcd(top_r, top_d)
        mu_pairs = np.stack([top_d // g, top_r // g], axis=1)
        # selector tuples for itertools.compress, indexed by mask
        sel = [tuple((m >> j) & 1 for j in range(k)) for m in range(1 << k)]
        n_steps = (chains != 0).sum(axis=1)
        for c, cum, ns, (num, den), first in zip(
            combos.tolist(), cumulative.tolist(), n_steps.tolist(), mu_pairs.tolist(), chains[:, 0].tolist()
        ):
            rep.instances += 1
            row = tuple(types[i] for i in c)
            # canonical order is preserved because combos are sorted
            o_steps = [tuple(itertools.compress(row, sel[m])) for m in cum[:ns]]
            o_destab = tuple(itertools.compress(row, sel[first]))
            b = BundleSum(row)
            d_mu = F.mu_max(b)
            ok = d_mu.numerator == num and d_mu.denominator == den
            ok = ok and F.destabilizer(b).atoms == o_destab
            if ok:
                d_steps = F.hn_filtration(b).steps
                ok = len(d_steps) == ns and all(s.atoms == o for s, o in zip(d_steps, o_steps))
            if not ok:
                rep.mismatches += 1
                if len(rep.examples) < limit_examples:
                    rep.examples.append(b)
    rep.elapsed = time.perf_counter() - t0
    return rep
