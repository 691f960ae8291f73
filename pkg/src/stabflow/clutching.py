"""Cocycle checks and degrees of line bundles from sampled transition data.

A rank-1 transition function restricted to an overlap circle is stored as
samples at equispaced points.  For the two-chart cover of the sphere the
degree of the clutched bundle is the winding number of that loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

__all__ = [
    "MIN_SAMPLES",
    "SampledLoop",
    "CocycleSpec",
    "CocycleReport",
    "ResolutionError",
    "ZeroSampleError",
    "CocycleStructureError",
    "validate_cocycle",
    "winding_number",
    "two_chart_degree",
    "same_topological_class",
    "read_loop",
    "write_loop",
]

MIN_SAMPLES = 8
GUARD_BAND = 0.25
DEFAULT_TOL = 1e-9


class ResolutionError(ValueError):
    """The loop is sampled too coarsely for its winding to be determined."""

    def __init__(self, msg: str, index: int | None = None):
        super().__init__(msg)
        self.index = index


class ZeroSampleError(ValueError):
    def __init__(self, index: int):
        super().__init__(f"sample {index} is zero; a transition function never vanishes")
        self.index = index


class CocycleStructureError(ValueError):
    pass


@dataclass(frozen=True)
class SampledLoop:
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex).ravel()
        if s.size < MIN_SAMPLES:
            raise ResolutionError(f"need at least {MIN_SAMPLES} samples, got {s.size}")
        bad = np.flatnonzero(s == 0)
        if bad.size:
            raise ZeroSampleError(int(bad[0]))
        if not np.all(np.isfinite(s)):
            raise ValueError(f"sample {np.flatnonzero(~np.isfinite(s))[0]} is not finite")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, f, n: int) -> "SampledLoop":
        theta = 2 * np.pi * np.arange(n) / n
        return cls(f(theta))

    def __mul__(self, other: "SampledLoop") -> "SampledLoop":
        return SampledLoop(self.samples * other.samples)

    def __len__(self):
        return self.samples.size


def winding_number(loop: SampledLoop) -> int:
    s = loop.samples
    steps = np.angle(np.roll(s, -1) / s)
    jump = np.flatnonzero(np.abs(steps) >= np.pi * (1 - 1e-12))
    if jump.size:
        i = int(jump[0])
        raise ResolutionError(
            f"argument jump of {steps[i]:.3f} rad between samples {i} and {(i + 1) % s.size}; "
            "loop is under-sampled",
            i,
        )
    turns = steps.sum() / (2 * np.pi)
    w = round(turns)
    if abs(turns - w) > GUARD_BAND:
        raise ResolutionError(f"total turning {turns:.4f} is not close to an integer")
    return int(w)


def same_topological_class(d1: int, d2: int) -> bool:
    """Smooth line bundles on a compact surface are classified by degree."""
    return d1 == d2


@dataclass
class CocycleSpec:
    """Rank-1 transition data sampled on overlaps.

    ``transitions[(U, V)]`` holds samples of g_UV on U∩V.  When both (U, V)
    and (V, U) are present they must be sampled at the same points, in the
    same order.  ``triples[(U, V, W)]`` gives, for each sample point of
    U∩V∩W, its index into the arrays for (U, V), (V, W) and (U, W).
    """

    charts: tuple[str, ...]
    transitions: dict[tuple[str, str], np.ndarray]
    triples: dict[tuple[str, str, str], tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default_factory=dict)


class CocycleReport(NamedTuple):
    valid: bool
    worst: float
    where: str | None


def _samples(c: CocycleSpec, u: str, v: str) -> np.ndarray:
    try:
        return np.asarray(c.transitions[(u, v)], dtype=complex)
    except KeyError:
        raise CocycleStructureError(f"missing transition ({u}, {v})") from None


def validate_cocycle(c: CocycleSpec, tol: float = DEFAULT_TOL) -> CocycleReport:
    """Check g_UU = 1, g_VU g_UV = 1 and g_UV g_VW g_UW^-1 = 1 within ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    charts = set(c.charts)
    worst, where = 0.0, None

    def track(values, label):
        nonlocal worst, where
        if values.size:
            m = float(np.max(values))
            if m > worst:
                worst, where = m, label

    for (u, v), g in c.transitions.items():
        if u not in charts or v not in charts:
            raise CocycleStructureError(f"transition ({u}, {v}) names an unknown chart")
        g = np.asarray(g, dtype=complex)
        if u == v:
            track(np.abs(g - 1), f"g_{u}{u}")
        elif (v, u) in c.transitions and u < v:
            h = _samples(c, v, u)
            if h.shape != g.shape:
                raise CocycleStructureError(f"g_{u}{v} and g_{v}{u} have different sample counts")
            track(np.abs(g * h - 1), f"g_{u}{v} g_{v}{u}")
    for (u, v, w), maps in c.triples.items():
        guv, gvw, guw = _samples(c, u, v), _samples(c, v, w), _samples(c, u, w)
        iuv, ivw, iuw = (np.asarray(m, dtype=np.intp) for m in maps)
        if not (iuv.shape == ivw.shape == iuw.shape):
            raise CocycleStructureError(f"index maps for ({u}, {v}, {w}) differ in length")
        for idx, arr, name in ((iuv, guv, u + v), (ivw, gvw, v + w), (iuw, guw, u + w)):
            if idx.size and (idx.min() < 0 or idx.max() >= arr.size):
                raise CocycleStructureError(f"index map into g_{name} out of range")
        track(np.abs(guv[iuv] * gvw[ivw] / guw[iuw] - 1), f"g_{u}{v} g_{v}{w} g_{u}{w}^-1")
    return CocycleReport(worst <= tol, worst, where)


def two_chart_degree(c: CocycleSpec, pair: tuple[str, str]) -> int:
    """Degree of a line bundle on the sphere glued from two charts."""
    return winding_number(SampledLoop(_samples(c, *pair)))


def read_loop(path) -> SampledLoop:
    """Read a loop from text: one ``re im`` pair per line, '#' comments allowed.

    Parse problems raise ValueError naming the line number.
    """
    values = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 're im', got {line!r}")
        try:
            values.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise ValueError(f"line {lineno}: not a number pair: {line!r}") from None
    return SampledLoop(np.array(values))


def write_loop(loop: SampledLoop | np.ndarray, path):
    s = loop.samples if isinstance(loop, SampledLoop) else np.asarray(loop, dtype=complex)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for z in s:
            fh.write(f"{float(z.real)!r} {float(z.imag)!r}\n")
