"""Yang-Mills energy, its exact discrete gradient, and a monotone descent.

The gradient is the adjoint of the linearised curvature ``eta -> d_A eta``
taken with respect to the L2 metric, worked out with the same centered
differences and commutators as :func:`stabflow.lattice.dA_one_form`.  It is
therefore the exact gradient of the discrete energy, not an approximation.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .lattice import (
    ConnectionField,
    GridSpec,
    TangentField,
    comm,
    curvature,
    dx,
    dy,
    holonomy_loops,
    l2_metric,
    trace_pair,
)

log = logging.getLogger(__name__)

__all__ = [
    "FlowConfig",
    "FlowTrace",
    "FlowResult",
    "FlowDivergedError",
    "ym_energy",
    "ym_gradient",
    "excess_energy",
    "background_energy",
    "central_residual",
    "run_flow",
    "jacobian_coordinates",
    "holonomy_commutant_dim",
    "read_config",
    "CONFIG_KEYS",
]

TRACE_HEADER = ("step", "energy", "grad_norm", "central_residual")


class FlowDivergedError(RuntimeError):
    def __init__(self, step: int, energy: float):
        super().__init__(f"energy became non-finite ({energy}) at step {step}")
        self.step = step


@dataclass
class FlowConfig:
    grid: GridSpec
    seed: int = 0
    max_steps: int = 50_000
    step_size: float = 1e-3
    tol: float = 1e-8
    record_every: int = 1
    amplitude: float = 0.5
    method: str = "lbfgs"
    memory: int = 10
    grow: float = 1.5

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_steps < 1 or self.record_every < 1:
            raise ValueError("max_steps and record_every must be >= 1")
        if self.memory < 1:
            raise ValueError("memory must be >= 1")
        if self.method not in ("lbfgs", "gd"):
            raise ValueError(f"method must be 'lbfgs' or 'gd', got {self.method!r}")


@dataclass
class FlowTrace:
    rows: list[tuple[int, float, float, float]] = field(default_factory=list)

    def append(self, step, energy, grad_norm, residual):
        self.rows.append((int(step), float(energy), float(grad_norm), float(residual)))

    def column(self, name: str) -> np.ndarray:
        return np.array([row[TRACE_HEADER.index(name)] for row in self.rows])

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRACE_HEADER)
            for step, e, g, r in self.rows:
                w.writerow([step, repr(e), repr(g), repr(r)])

    @classmethod
    def read_csv(cls, path) -> "FlowTrace":
        with open(path, newline="", encoding="utf-8") as fh:
            rd = csv.reader(fh)
            header = tuple(next(rd))
            if header != TRACE_HEADER:
                raise ValueError(f"unexpected trace header {header}")
            return cls([(int(s), float(e), float(g), float(r)) for s, e, g, r in rd])


@dataclass
class FlowResult:
    field: ConnectionField
    trace: FlowTrace
    converged: bool
    steps: int

    def __iter__(self):
        # allows ``a, trace = run_flow(...)``
        return iter((self.field, self.trace))


def ym_energy(a: ConnectionField) -> float:
    """Integral of |F|^2 with the norm -tr(F^2)."""
    f = curvature(a).f
    return -(a.grid.h**2) * trace_pair(f, f)


def ym_gradient(a: ConnectionField) -> TangentField:
    # dE(eta) = 2 * integral of -tr(F d_A eta); moving the centered
    # differences and commutators across the pairing gives
    #   G_x = 2 (D_y F + [a_y, F]),  G_y = -2 (D_x F + [a_x, F]).
    h = a.grid.h
    f = curvature(a).f
    gx = 2 * (dy(f, h) + comm(a.ay, f))
    gy = -2 * (dx(f, h) + comm(a.ax, f))
    return TangentField(a.grid, gx, gy)


def central_residual(a: ConnectionField) -> float:
    """Largest operator norm over sites of F - 2 pi i (d/r) Id."""
    dev = curvature(a).fluctuation()
    return float(np.linalg.norm(dev, ord=2, axis=(-2, -1)).max())


def excess_energy(a: ConnectionField) -> float:
    """Energy of the curvature fluctuation, ym_energy minus its lower bound.

    The cross term with the central background is a multiple of the summed
    trace of the fluctuation, which vanishes identically on the periodic grid,
    so this differs from ``ym_energy(a) - 4 pi^2 d^2 / r`` only by rounding.
    Line searches use it because it keeps full relative precision near the
    minimum.
    """
    f = curvature(a).fluctuation()
    return -(a.grid.h**2) * trace_pair(f, f)


def background_energy(grid: GridSpec) -> float:
    return 4 * np.pi**2 * grid.degree**2 / grid.rank


def _stack(t: TangentField) -> np.ndarray:
    return np.stack([t.bx, t.by])


def _inner(h: float, p: np.ndarray, q: np.ndarray) -> float:
    # l2 pairing of anti-Hermitian fields: -tr(PQ) = sum conj(P_ij) Q_ij
    return h * h * float(np.vdot(p, q).real)


def _lbfgs_direction(g: np.ndarray, pairs, h: float) -> np.ndarray:
    """Two-loop recursion in the l2 metric; returns minus H*g."""
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        alpha = rho * _inner(h, s, q)
        q -= alpha * y
        alphas.append(alpha)
    if pairs:
        s, y, _ = pairs[-1]
        q *= _inner(h, s, y) / _inner(h, y, y)
    for (s, y, rho), alpha in zip(pairs, reversed(alphas)):
        beta = rho * _inner(h, y, q)
        q += (alpha - beta) * s
    return -q


def run_flow(
    a0: ConnectionField,
    cfg: FlowConfig,
    armijo: float = 1e-4,
    min_step: float = 1e-14,
) -> FlowResult:
    """Monotone descent on the Yang-Mills energy with Armijo backtracking.

    ``cfg.method`` picks the search direction: ``"gd"`` is the plain negative
    gradient, ``"lbfgs"`` (default) rescales it with a limited-memory BFGS
    estimate built from past gradients.  Either way a step is accepted only
    after the Armijo sufficient-decrease test, so the recorded energies never
    increase.  Stops when the l2 gradient norm reaches ``cfg.tol`` or after
    ``cfg.max_steps`` accepted steps.
    """
    grid, h = a0.grid, a0.grid.h
    e0 = background_energy(grid)
    a = a0
    excess = excess_energy(a)
    g = _stack(ym_gradient(a))
    gnorm = math.sqrt(_inner(h, g, g))
    trace = FlowTrace()
    if not math.isfinite(excess):
        raise FlowDivergedError(0, excess)
    if gnorm <= cfg.tol:
        trace.append(0, e0 + excess, gnorm, central_residual(a))
        return FlowResult(a, trace, True, 0)
    use_lbfgs = cfg.method == "lbfgs"
    pairs: list = []
    s_gd = cfg.step_size

    def search(step, d, slope, t):
        # Armijo backtracking; None when no representable decrease exists
        while t >= min_step:
            trial = ConnectionField(grid, a.ax + t * d[0], a.ay + t * d[1])
            e_trial = excess_energy(trial)
            if not math.isfinite(e_trial):
                raise FlowDivergedError(step, e_trial)
            if e_trial <= excess + armijo * t * slope:
                return trial, e_trial, t
            t *= 0.5
        return None

    converged = False
    step = 0
    for step in range(1, cfg.max_steps + 1):
        found = None
        if use_lbfgs and pairs:
            d = _lbfgs_direction(g, pairs, h)
            slope = _inner(h, g, d)
            if slope < 0:
                found = search(step, d, slope, 1.0)
            if found is None:
                pairs.clear()  # stale curvature memory; fall back to the gradient
        if found is None:
            d, slope = -g, -gnorm * gnorm
            found = search(step, d, slope, s_gd)
        if found is None:
            trace.append(step, e0 + excess, gnorm, central_residual(a))
            log.warning("line search found no decrease at step %d", step)
            break
        trial, e_trial, t = found
        g_new = _stack(ym_gradient(trial))
        if use_lbfgs:
            s_vec, y_vec = t * d, g_new - g
            sy = _inner(h, s_vec, y_vec)
            if sy > 1e-12 * math.sqrt(_inner(h, s_vec, s_vec) * _inner(h, y_vec, y_vec)):
                pairs.append((s_vec, y_vec, 1.0 / sy))
                if len(pairs) > cfg.memory:
                    pairs.pop(0)
        if not (use_lbfgs and len(pairs) > 1):
            s_gd = t * cfg.grow
        a, excess, g = trial, e_trial, g_new
        gnorm = math.sqrt(_inner(h, g, g))
        converged = gnorm <= cfg.tol
        if step % cfg.record_every == 0 or converged or step == cfg.max_steps:
            trace.append(step, e0 + excess, gnorm, central_residual(a))
        if converged:
            break
    log.info("flow stopped after %d steps, converged=%s", step, converged)
    return FlowResult(a, trace, converged, step)


def jacobian_coordinates(a: ConnectionField, tol: float = 1e-6) -> tuple[float, float]:
    """Point of the flat U(1) moduli torus given by the two loop holonomies."""
    g = a.grid
    if g.rank != 1 or g.degree != 0:
        raise ValueError("Jacobian coordinates need rank 1 and degree 0")
    res = central_residual(a)
    if res > tol:
        raise ValueError(f"connection is not flat (central residual {res:.3e} > {tol:.1e})")
    hx, hy = holonomy_loops(a)
    return tuple(float((np.angle(m[0, 0]) / (2 * np.pi)) % 1.0) for m in (hx, hy))


def holonomy_commutant_dim(a: ConnectionField, tol: float = 1e-8) -> int:
    """Dimension of the matrices commuting with both loop holonomies.

    A diagnostic for reducibility of a flat connection; 1 means only scalars
    commute.  No threshold is attached to it.
    """
    r = a.grid.rank
    eye = np.eye(r)
    rows = []
    for m in holonomy_loops(a):
        # vec(MX - XM) = (I kron M - M^T kron I) vec(X), column-major vec
        rows.append(np.kron(eye, m) - np.kron(m.T, eye))
    s = np.linalg.svd(np.vstack(rows), compute_uv=False)
    return int(np.sum(s <= tol * max(1.0, s[0])))


CONFIG_KEYS = ("grid_n", "rank", "degree", "seed", "max_steps", "step_size", "tol", "record_every")
_OPTIONAL_KEYS = ("amplitude", "method", "memory")


class ConfigError(ValueError):
    def __init__(self, key: str, msg: str):
        super().__init__(f"{key}: {msg}")
        self.key = key


def read_config(path) -> FlowConfig:
    """Parse ``key = value`` lines (``#`` starts a comment)."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, _, value = line.partition(" ")
        key, value = key.strip(), value.strip()
        if key not in CONFIG_KEYS and key not in _OPTIONAL_KEYS:
            raise ConfigError(key, f"unknown config key (line {lineno})")
        raw[key] = value
    missing = [k for k in ("grid_n", "rank", "degree") if k not in raw]
    if missing:
        raise ConfigError(missing[0], "required key missing")
    ints = {"grid_n", "rank", "degree", "seed", "max_steps", "record_every", "memory"}
    parsed = {}
    for key, value in raw.items():
        if key == "method":
            parsed[key] = value
            continue
        try:
            parsed[key] = int(value) if key in ints else float(value)
        except ValueError:
            raise ConfigError(key, f"cannot parse {value!r}") from None
    try:
        grid = GridSpec(parsed.pop("grid_n"), parsed.pop("rank"), parsed.pop("degree"))
    except ValueError as exc:
        raise ConfigError("grid_n" if "grid side" in str(exc) else "rank", str(exc)) from None
    names = {f.name for f in fields(FlowConfig)}
    try:
        return FlowConfig(grid=grid, **{k: v for k, v in parsed.items() if k in names})
    except ValueError as exc:
        key = next((k for k in parsed if k in str(exc)), "config")
        raise ConfigError(key, str(exc)) from None
