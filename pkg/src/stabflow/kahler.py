"""Circle reduction of flat C^n, checked numerically.

Tangent vectors are complex n-vectors.  The metric is ``g(v, w) = Re <v, w>``
and the symplectic form ``omega(v, w) = g(Jv, w) = Im <v, w>`` with
``J = i`` and the Hermitian product conjugate-linear in its first slot.

With these signs the circle must act by ``z -> exp(-i t) z`` for
``mu(z) = |z|^2 / 2 - level`` to satisfy ``omega(X#, .) = d mu``; the
fundamental vector field is ``X#_z = -i z``.
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np

__all__ = [
    "ToyPoint",
    "OffLevelError",
    "omega",
    "metric",
    "J",
    "omega_matrix",
    "metric_matrix",
    "J_matrix",
    "to_real",
    "to_complex",
    "moment",
    "moment_differential",
    "fundamental_field",
    "momentum_relation_residual",
    "check_kernel_complement",
    "check_splitting",
    "Splitting",
    "horizontal_projection",
    "reduced_form",
    "random_level_point",
    "reduced_area",
    "AreaEstimate",
    "MIN_AREA_SAMPLES",
]

LEVEL_TOL = 1e-12
MIN_AREA_SAMPLES = 10_000


class OffLevelError(ValueError):
    pass


class ToyPoint(np.ndarray):
    """Validated point of C^n, n >= 2 (a plain complex array subclass)."""

    def __new__(cls, z):
        arr = np.asarray(z, dtype=complex).ravel()
        if arr.size < 2:
            raise ValueError("points need n >= 2 complex coordinates")
        if not np.all(np.isfinite(arr)):
            raise ValueError("point has non-finite entries")
        return arr.view(cls)


def _vec(z) -> np.ndarray:
    return np.asarray(ToyPoint(z))


# ---------------------------------------------------------------- structure


def metric(v, w) -> float:
    return float(np.vdot(v, w).real)


def omega(v, w) -> float:
    return float(np.vdot(v, w).imag)


def J(v):
    return 1j * np.asarray(v)


def to_real(v) -> np.ndarray:
    v = np.asarray(v)
    return np.concatenate([v.real, v.imag], axis=-1)


def to_complex(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = x.shape[-1] // 2
    return x[..., :n] + 1j * x[..., n:]


def J_matrix(n: int) -> np.ndarray:
    eye, zero = np.eye(n), np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def metric_matrix(n: int) -> np.ndarray:
    return np.eye(2 * n)


def omega_matrix(n: int) -> np.ndarray:
    """Real matrix W with omega(v, w) = to_real(v) @ W @ to_real(w)."""
    return J_matrix(n).T @ metric_matrix(n)


# ---------------------------------------------------------------- momentum map


def moment(z, level: float = 0.0) -> float:
    z = _vec(z)
    return 0.5 * float(np.vdot(z, z).real) - level


def moment_differential(z) -> np.ndarray:
    """d mu at z as a real covector on R^{2n}."""
    return to_real(_vec(z))


def fundamental_field(z) -> np.ndarray:
    return -1j * _vec(z)


def momentum_relation_residual(z, v, t: float = 1e-5) -> float:
    """|omega(X#, v) - d mu(v)| with d mu(v) from a central difference."""
    z, v = _vec(z), np.asarray(v, dtype=complex)
    fd = (moment(z + t * v) - moment(z - t * v)) / (2 * t)
    return abs(omega(fundamental_field(z), v) - fd)


def _require_level(z, level):
    off = moment(z, level)
    if abs(off) > LEVEL_TOL * max(1.0, abs(level)):
        raise OffLevelError(f"point is off the level set (mu - level = {off:.3e})")


def check_kernel_complement(z, level: float, omega_mat: np.ndarray | None = None) -> float:
    """Worst |d mu(e) - omega(X#, e)| over the real basis e of T_z C^n.

    Agreement on a basis means the kernel of d mu is exactly the symplectic
    complement of the orbit.  ``omega_mat`` overrides the symplectic form
    (used for negative controls).
    """
    z = _vec(z)
    _require_level(z, level)
    n = z.size
    w = omega_matrix(n) if omega_mat is None else np.asarray(omega_mat, dtype=float)
    xs = to_real(fundamental_field(z))
    lhs = moment_differential(z)  # d mu(e_k) for every basis vector
    rhs = xs @ w  # omega(X#, e_k)
    return float(np.max(np.abs(lhs - rhs)))


class Splitting(NamedTuple):
    horizontal: int
    orbit: int
    j_orbit: int


def _rank(m: np.ndarray, tol: float) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def _horizontal_basis(z: np.ndarray, tol: float) -> np.ndarray:
    """Real basis (rows) of ker d mu intersected with the g-complement of the orbit."""
    constraints = np.vstack([moment_differential(z), to_real(fundamental_field(z)) @ metric_matrix(z.size)])
    _, s, vt = np.linalg.svd(constraints)
    r = int(np.sum(s > tol * max(1.0, s[0])))
    return vt[r:]


def check_splitting(z, level: float, tol: float = 1e-10) -> Splitting:
    """Dimensions of H_z, the orbit tangent and J of it; raises if any two
    of the three intersect or if they fail to span T_z C^n."""
    z = _vec(z)
    _require_level(z, level)
    if np.linalg.norm(z) == 0:
        raise ValueError("z = 0 has a non-trivial stabiliser")
    h = _horizontal_basis(z, tol)
    t = to_real(fundamental_field(z))[None, :]
    jt = to_real(J(fundamental_field(z)))[None, :]
    dims = Splitting(_rank(h, tol), _rank(t, tol), _rank(jt, tol))
    for name, (p, q) in {"H/T": (h, t), "H/JT": (h, jt), "T/JT": (t, jt)}.items():
        # trivial intersection iff the ranks add up
        if _rank(np.vstack([p, q]), tol) != _rank(p, tol) + _rank(q, tol):
            raise ValueError(f"subspaces {name} intersect")
    if sum(dims) != 2 * z.size or _rank(np.vstack([h, t, jt]), tol) != 2 * z.size:
        raise ValueError("H, T and JT do not span the tangent space")
    return dims


def horizontal_projection(z, v) -> np.ndarray:
    """g-orthogonal projection of v onto H_z; broadcasts over leading axes."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    xs = -1j * z
    norm2 = np.sum(np.abs(z) ** 2, axis=-1, keepdims=True)
    out = v
    for e in (xs, 1j * xs):  # orthogonal pair spanning T and JT
        coef = np.sum(np.conj(e) * v, axis=-1, keepdims=True).real / norm2
        out = out - coef * e
    return out


def reduced_form(z, v, w) -> np.ndarray | float:
    """omega^red at [z] on the classes of v and w, lifted through H_z."""
    pv, pw = horizontal_projection(z, v), horizontal_projection(z, w)
    val = np.sum(np.conj(pv) * pw, axis=-1).imag
    return float(val) if np.ndim(val) == 0 else val


def random_level_point(n: int, level: float, rng: np.random.Generator) -> np.ndarray:
    if level <= 0:
        raise ValueError("level must be positive")
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z * math.sqrt(2 * level) / np.linalg.norm(z)


# ---------------------------------------------------------------- area


class AreaEstimate(NamedTuple):
    value: float
    stderr: float
    samples: int

    @property
    def reliable(self) -> bool:
        return self.stderr <= 0.01 * abs(self.value)


def reduced_area(level: float, samples: int = 100_000, seed: int = 0, n: int = 2) -> AreaEstimate:
    """Monte-Carlo symplectic area of the reduced space mu^{-1}(level)/S^1.

    The chart w -> R (1, w) / sqrt(1 + |w|^2) gives a section of the level
    sphere over all but one point of the quotient.  Its coordinate tangents
    are pushed through :func:`reduced_form`, and w is drawn from the planar
    Cauchy law with density (1 + |w|^2)^{-3/2} / (2 pi).
    """
    if n != 2:
        raise ValueError("reduced_area is implemented for n = 2 only")
    if level <= 0:
        raise ValueError("level must be positive")
    if samples < MIN_AREA_SAMPLES:
        raise ValueError(f"need at least {MIN_AREA_SAMPLES} samples")
    rng = np.random.default_rng(seed)
    R = math.sqrt(2 * level)
    g = rng.standard_normal((samples, 3))
    w = (g[:, 0] + 1j * g[:, 1]) / np.abs(g[:, 2])
    u, v = w.real, w.imag
    rho = 1 + np.abs(w) ** 2
    base = np.stack([np.ones_like(w), w], axis=-1)
    z = R * base / np.sqrt(rho)[:, None]
    du = R * (np.array([0, 1]) / np.sqrt(rho)[:, None] - base * (u / rho**1.5)[:, None])
    dv = R * (np.array([0, 1j]) / np.sqrt(rho)[:, None] - base * (v / rho**1.5)[:, None])
    density = reduced_form(z, du, dv)
    q = rho**-1.5 / (2 * np.pi)
    ratio = density / q
    est = AreaEstimate(float(ratio.mean()), float(ratio.std(ddof=1) / math.sqrt(samples)), samples)
    if not est.reliable:
        warnings.warn(f"reduced_area standard error {est.stderr:.3g} exceeds 1% of {est.value:.4g}")
    return est
