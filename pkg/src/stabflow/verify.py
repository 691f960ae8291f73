"""Invariant suites run by ``stabflow verify``."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from . import kahler as K
from .lattice import (
    ConnectionField,
    GridSpec,
    curvature_translate_residual,
    momentum_residual,
    random_endo,
    random_tangent,
)
from .oracle import sweep_filtrations


class Check(NamedTuple):
    name: str
    value: float
    threshold: float
    ok: bool

    def line(self) -> str:
        flag = "ok" if self.ok else "FAIL"
        return f"{self.name}: {self.value:.3e} (threshold {self.threshold:.1e}) {flag}"


def _le(name, value, threshold) -> Check:
    return Check(name, float(value), float(threshold), bool(value <= threshold))


def momentum_suite(seed: int = 0, tol: float | None = None, samples: int = 10) -> list[Check]:
    """Momentum relation and curvature translate formula on random fields."""
    mom_tol = 1e-10 if tol is None else tol
    tr_tol = 1e-12 if tol is None else tol
    rng = np.random.default_rng(seed)
    worst_m = worst_t = 0.0
    for n in (16, 32):
        for r in (1, 2, 3):
            grid = GridSpec(n, r, degree=1)
            for _ in range(samples):
                a = ConnectionField(grid, *random_tangent(grid, rng).components())
                xi = random_endo(grid, rng)
                eta = random_tangent(grid, rng)
                worst_m = max(worst_m, momentum_residual(a, xi, eta))
                worst_t = max(worst_t, curvature_translate_residual(a, eta))
    return [_le("momentum residual", worst_m, mom_tol), _le("translate residual", worst_t, tr_tol)]


def reduction_suite(seed: int = 0, tol: float | None = None, samples: int = 100) -> list[Check]:
    exact = 1e-10 if tol is None else tol
    rng = np.random.default_rng(seed)
    worst_rel = worst_ker = 0.0
    split_ok = True
    for n in (2, 3):
        for _ in range(samples):
            level = rng.uniform(0.2, 3.0)
            z = K.random_level_point(n, level, rng)
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            worst_rel = max(worst_rel, K.momentum_relation_residual(z, v))
            worst_ker = max(worst_ker, K.check_kernel_complement(z, level))
            try:
                split_ok &= tuple(K.check_splitting(z, level, exact)) == (2 * n - 2, 1, 1)
            except ValueError:
                split_ok = False
    a1 = K.reduced_area(1.0, 200_000, seed)
    a2 = K.reduced_area(2.0, 200_000, seed + 1)
    err1 = abs(a1.value - 2 * math.pi) / (2 * math.pi)
    err2 = abs(a2.value / a1.value - 2.0) / 2.0
    return [
        _le("momentum relation (finite difference)", worst_rel, 1e-8),
        _le("kernel = symplectic complement", worst_ker, exact),
        Check("splitting dimensions (2n-2, 1, 1)", 0.0 if split_ok else 1.0, 0.0, split_ok),
        _le("reduced area c=1 relative error vs 2 pi", err1, 0.01),
        _le("reduced area c=2 / c=1 relative error vs 2", err2, 0.01),
    ]


def algebra_suite(seed: int = 0, tol: float | None = None) -> list[Check]:
    rep = sweep_filtrations()
    return [
        Check(f"filtration oracle sweep ({rep.instances} bundles, {rep.elapsed:.1f} s) mismatches",
              rep.mismatches, 0, rep.ok),
    ]


SUITES: dict[str, Callable[..., list[Check]]] = {
    "momentum": momentum_suite,
    "reduction": reduction_suite,
    "algebra": algebra_suite,
}
