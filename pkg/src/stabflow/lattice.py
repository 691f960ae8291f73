"""Unitary gauge fields on a periodic grid over the unit-area flat torus.

Fields live at grid sites as arrays of shape ``(n, n, r, r)``; axis 0 is the
x index and axis 1 the y index, with spacing ``h = 1/n``.  Derivatives are
centered periodic differences, which are exactly skew-adjoint under the
periodic sum.  That makes the translate formula for the curvature and the
momentum-map pairing hold to rounding, while identities that need a discrete
Leibniz rule (finite gauge transformations) hold only to O(h^2).

A connection is stored as its periodic fluctuation ``a`` around a fixed
background of constant central curvature ``2*pi*i*(d/r) * Id``.  In the
gauge used for holonomies the background is ``(0, 2*pi*i*(d/r)*x*Id)``,
which vanishes along the row y = 0 and the column x = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridSpec",
    "ConnectionField",
    "TangentField",
    "EndoField",
    "GaugeField",
    "CurvatureField",
    "SingularGaugeError",
    "curvature",
    "curvature_translate_residual",
    "dA_one_form",
    "gauge_act",
    "infinitesimal_action",
    "ab_form",
    "hodge_star",
    "l2_metric",
    "kappa_pairing",
    "momentum_residual",
    "dolbeault_of",
    "unitary_of",
    "complex_gauge_act",
    "holonomy_loops",
    "topological_degree",
    "expm_ah",
    "smooth_ah_field",
    "random_connection",
    "random_tangent",
    "random_endo",
    "random_gauge",
    "write_snapshot",
    "read_snapshot",
]


class SingularGaugeError(ValueError):
    def __init__(self, site: tuple[int, int]):
        super().__init__(f"complex gauge transformation is singular at site {site}")
        self.site = site


# ---------------------------------------------------------------- helpers


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def ah(m: np.ndarray) -> np.ndarray:
    """Anti-Hermitian part."""
    return 0.5 * (m - dag(m))


def comm(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return p @ q - q @ p


def dx(f: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2 * h)


def dy(f: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2 * h)


def trace_pair(p: np.ndarray, q: np.ndarray) -> float:
    """sum over sites of tr(p q), real part."""
    return float(np.einsum("ijab,ijba->", p, q).real)


def expm_ah(x: np.ndarray) -> np.ndarray:
    """Matrix exponential of (a batch of) anti-Hermitian matrices."""
    w, v = np.linalg.eigh(1j * x)  # i x is Hermitian and x = -i (i x)
    return (v * np.exp(-1j * w)[..., None, :]) @ dag(v)


def _polar_unitary(m: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(m)
    return w @ vh


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class GridSpec:
    n: int
    rank: int = 1
    degree: int = 0

    def __post_init__(self):
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"grid side must be a power of two >= 8, got {self.n}")
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.n, self.n, self.rank, self.rank)

    @property
    def background(self) -> complex:
        """Curvature coefficient of the identity carried by the background."""
        return 2j * np.pi * self.degree / self.rank

    def identity(self) -> np.ndarray:
        return np.broadcast_to(np.eye(self.rank, dtype=complex), self.shape).copy()

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=complex)

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        t = np.arange(self.n) * self.h
        return np.meshgrid(t, t, indexing="ij")


def _ah_array(grid: GridSpec, m, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != grid.shape:
        raise ValueError(f"{name} has shape {m.shape}, expected {grid.shape}")
    return ah(m)


class _OneForm:
    """Shared arithmetic for fields with an x and a y component."""

    def components(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class TangentField(_OneForm):
    grid: GridSpec
    bx: np.ndarray
    by: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bx", _ah_array(self.grid, self.bx, "bx"))
        object.__setattr__(self, "by", _ah_array(self.grid, self.by, "by"))

    def components(self):
        return self.bx, self.by

    @classmethod
    def zeros(cls, grid: GridSpec) -> "TangentField":
        return cls(grid, grid.zeros(), grid.zeros())

    def __add__(self, other: "TangentField") -> "TangentField":
        return TangentField(self.grid, self.bx + other.bx, self.by + other.by)

    def __sub__(self, other: "TangentField") -> "TangentField":
        return TangentField(self.grid, self.bx - other.bx, self.by - other.by)

    def __neg__(self):
        return TangentField(self.grid, -self.bx, -self.by)

    def __mul__(self, t: float) -> "TangentField":
        return TangentField(self.grid, t * self.bx, t * self.by)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class ConnectionField(_OneForm):
    """Periodic fluctuation ``(ax, ay)`` around the degree-d background."""

    grid: GridSpec
    ax: np.ndarray
    ay: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "ax", _ah_array(self.grid, self.ax, "ax"))
        object.__setattr__(self, "ay", _ah_array(self.grid, self.ay, "ay"))

    def components(self):
        return self.ax, self.ay

    @classmethod
    def zeros(cls, grid: GridSpec) -> "ConnectionField":
        return cls(grid, grid.zeros(), grid.zeros())

    def __add__(self, b: TangentField) -> "ConnectionField":
        return ConnectionField(self.grid, self.ax + b.bx, self.ay + b.by)

    def __sub__(self, other: "ConnectionField") -> TangentField:
        return TangentField(self.grid, self.ax - other.ax, self.ay - other.ay)

    def as_tangent(self) -> TangentField:
        return TangentField(self.grid, self.ax, self.ay)


@dataclass(frozen=True, eq=False)
class EndoField:
    grid: GridSpec
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xi", _ah_array(self.grid, self.xi, "xi"))

    def __mul__(self, t: float) -> "EndoField":
        return EndoField(self.grid, t * self.xi)

    __rmul__ = __mul__

    def exp(self) -> "GaugeField":
        return GaugeField(self.grid, expm_ah(self.xi))


@dataclass(frozen=True, eq=False)
class GaugeField:
    grid: GridSpec
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.shape != self.grid.shape:
            raise ValueError(f"u has shape {u.shape}, expected {self.grid.shape}")
        object.__setattr__(self, "u", _polar_unitary(u))

    def __matmul__(self, other: "GaugeField") -> "GaugeField":
        return GaugeField(self.grid, self.u @ other.u)


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Coefficient of dx^dy, background included."""

    grid: GridSpec
    f: np.ndarray

    def fluctuation(self) -> np.ndarray:
        return self.f - self.grid.background * np.eye(self.grid.rank)


def _same_grid(*fields):
    g = fields[0].grid
    for other in fields[1:]:
        if other.grid.n != g.n or other.grid.rank != g.rank:
            raise ValueError("fields live on different grids")
    return g


# ---------------------------------------------------------------- operators


def curvature(a: ConnectionField) -> CurvatureField:
    g, h = a.grid, a.grid.h
    f = dx(a.ay, h) - dy(a.ax, h) + comm(a.ax, a.ay)
    f = f + g.background * np.eye(g.rank)
    return CurvatureField(g, f)


def dA_one_form(a: ConnectionField, b: TangentField) -> CurvatureField:
    """Covariant exterior derivative of a u(r)-valued 1-form; the central
    background drops out of every commutator."""
    g = _same_grid(a, b)
    h = g.h
    f = dx(b.by, h) - dy(b.bx, h) + comm(a.ax, b.by) + comm(b.bx, a.ay)
    return CurvatureField(g, f)


def curvature_translate_residual(a: ConnectionField, b: TangentField) -> float:
    _same_grid(a, b)
    lhs = curvature(a + b).f
    rhs = curvature(a).f + dA_one_form(a, b).f + comm(b.bx, b.by)  # (1/2)[b^b] = [bx, by]
    return float(np.max(np.abs(lhs - rhs)))


def gauge_act(u: GaugeField, a: ConnectionField) -> ConnectionField:
    """a -> u a u^-1 - (du) u^-1, with the derivative term projected to u(r)."""
    g = _same_grid(u, a)
    h = g.h
    ud = dag(u.u)
    ax = u.u @ a.ax @ ud - ah(dx(u.u, h) @ ud)
    ay = u.u @ a.ay @ ud - ah(dy(u.u, h) @ ud)
    return ConnectionField(g, ax, ay)


def infinitesimal_action(xi: EndoField, a: ConnectionField) -> TangentField:
    """Fundamental vector field of xi at a: minus the covariant derivative of xi."""
    g = _same_grid(xi, a)
    h = g.h
    return TangentField(
        g,
        -(dx(xi.xi, h) + comm(a.ax, xi.xi)),
        -(dy(xi.xi, h) + comm(a.ay, xi.xi)),
    )


def ab_form(a: _OneForm, b: _OneForm) -> float:
    """Atiyah-Bott form: integral of -tr(a_x b_y) + tr(b_x a_y)."""
    g = _same_grid(a, b)
    ax, ay = a.components()
    bx, by = b.components()
    return g.h**2 * (-trace_pair(ax, by) + trace_pair(bx, ay))


def hodge_star(a: _OneForm) -> TangentField:
    ax, ay = a.components()
    return TangentField(a.grid, -ay, ax)


def l2_metric(a: _OneForm, b: _OneForm) -> float:
    return ab_form(a, hodge_star(b))


def kappa_pairing(xi: EndoField, f: CurvatureField) -> float:
    """Integral of kappa(xi (x) f) = -tr(xi f) against the area form."""
    g = _same_grid(xi, f)
    return -(g.h**2) * trace_pair(xi.xi, f.f)


def momentum_residual(a: ConnectionField, xi: EndoField, eta: TangentField) -> float:
    lhs = ab_form(infinitesimal_action(xi, a), eta)
    rhs = kappa_pairing(xi, dA_one_form(a, eta))
    return abs(lhs - rhs)


def dolbeault_of(a: ConnectionField) -> np.ndarray:
    """Coefficient of d(zbar) of the fluctuation: (a_x + i a_y) / 2."""
    return 0.5 * (a.ax + 1j * a.ay)


def unitary_of(b: np.ndarray, grid: GridSpec) -> ConnectionField:
    """Unique unitary fluctuation with (0,1)-part ``b``: b dzbar - b^* dz."""
    b = np.asarray(b, dtype=complex)
    bd = dag(b)
    return ConnectionField(grid, b - bd, -1j * (b + bd))


def complex_gauge_act(gfield: np.ndarray, a: ConnectionField) -> ConnectionField:
    """Action of a GL(r, C)-valued gauge field, transported through the
    Dolbeault correspondence.  For unitary fields it reduces to
    :func:`gauge_act` up to O(h^2)."""
    grid = a.grid
    g = np.asarray(gfield, dtype=complex)
    if g.shape != grid.shape:
        raise ValueError(f"gauge field has shape {g.shape}, expected {grid.shape}")
    cond = np.linalg.cond(g)
    bad = np.argwhere(~np.isfinite(cond) | (cond > 1e12))
    if bad.size:
        raise SingularGaugeError(tuple(int(k) for k in bad[0]))
    h = grid.h
    cx = dx(g, h) + comm(a.ax, g)
    cy = dy(g, h) + comm(a.ay, g)
    m = 0.5 * (cx + 1j * cy) @ np.linalg.inv(g)
    shift = unitary_of(m, grid)
    return ConnectionField(grid, a.ax - shift.ax, a.ay - shift.ay)


def holonomy_loops(a: ConnectionField) -> tuple[np.ndarray, np.ndarray]:
    """Path-ordered exponentials along the row y = 0 and the column x = 0.

    Later links multiply on the left.  The background vanishes on both loops
    in the gauge described in the module docstring.
    """
    h = a.grid.h
    ux = expm_ah(h * a.ax[:, 0])
    uy = expm_ah(h * a.ay[0, :])
    hx = np.eye(a.grid.rank, dtype=complex)
    hy = hx.copy()
    for k in range(a.grid.n):
        hx = ux[k] @ hx
        hy = uy[k] @ hy
    return hx, hy


def topological_degree(a: ConnectionField) -> float:
    """(1 / 2 pi i) times the integral of tr F."""
    f = curvature(a).f
    total = a.grid.h**2 * np.trace(f, axis1=-2, axis2=-1).sum()
    return float((total / (2j * np.pi)).real)


# ---------------------------------------------------------------- sampling


def _random_ah(rng: np.random.Generator, shape, r: int) -> np.ndarray:
    m = rng.standard_normal((*shape, r, r)) + 1j * rng.standard_normal((*shape, r, r))
    return ah(m)


def smooth_ah_field(grid: GridSpec, rng: np.random.Generator, modes: int = 1, amplitude: float = 1.0) -> np.ndarray:
    """Trigonometric polynomial with random u(r) coefficients.

    The coefficients depend on ``rng`` and ``modes`` only, so the same seed
    gives the same continuum field sampled at any resolution.
    """
    x, y = grid.coordinates()
    out = grid.zeros()
    for kx in range(-modes, modes + 1):
        for ky in range(0, modes + 1):
            if ky == 0 and kx < 0:
                continue
            c, s = _random_ah(rng, (), grid.rank), _random_ah(rng, (), grid.rank)
            phase = 2 * np.pi * (kx * x + ky * y)
            out += np.cos(phase)[..., None, None] * c
            if kx or ky:
                out += np.sin(phase)[..., None, None] * s
    return amplitude * out / (2 * modes + 1)


def random_connection(grid: GridSpec, seed: int, amplitude: float = 0.5, modes: int = 2) -> ConnectionField:
    """Seeded, Fourier-smoothed initial fluctuation."""
    rng = np.random.default_rng(seed)
    return ConnectionField(
        grid,
        smooth_ah_field(grid, rng, modes, amplitude),
        smooth_ah_field(grid, rng, modes, amplitude),
    )


def random_tangent(grid: GridSpec, rng: np.random.Generator, scale: float = 1.0) -> TangentField:
    """Independent Gaussian u(r) value at every site (rough, grid-scale)."""
    return TangentField(grid, scale * _random_ah(rng, (grid.n, grid.n), grid.rank),
                        scale * _random_ah(rng, (grid.n, grid.n), grid.rank))


def random_endo(grid: GridSpec, rng: np.random.Generator, scale: float = 1.0) -> EndoField:
    return EndoField(grid, scale * _random_ah(rng, (grid.n, grid.n), grid.rank))


def random_gauge(grid: GridSpec, rng: np.random.Generator, modes: int = 1, amplitude: float = 1.0) -> GaugeField:
    """Smooth unitary gauge field exp(X) with X a low-mode u(r) field."""
    return GaugeField(grid, expm_ah(smooth_ah_field(grid, rng, modes, amplitude)))


# ---------------------------------------------------------------- snapshots


def write_snapshot(a: ConnectionField, path):
    """Text snapshot: header ``n r d``, then one ``re im`` line per matrix
    entry, row-major, all of ``ax`` before ``ay``.  Floats are written with
    ``repr`` so reading back is bit-exact."""
    g = a.grid
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{g.n} {g.rank} {g.degree}\n")
        for comp in (a.ax, a.ay):
            for z in comp.ravel():
                fh.write(f"{float(z.real)!r} {float(z.imag)!r}\n")


def read_snapshot(path) -> ConnectionField:
    with open(path, encoding="utf-8") as fh:
        head = fh.readline().split()
        if len(head) != 3:
            raise ValueError("snapshot header must be 'n r d'")
        grid = GridSpec(*(int(t) for t in head))
        data = np.loadtxt(fh, dtype=float, ndmin=2)
    size = int(np.prod(grid.shape))
    if data.shape != (2 * size, 2):
        raise ValueError(f"snapshot holds {data.shape[0]} entries, expected {2 * size}")
    z = (data[:, 0] + 1j * data[:, 1]).reshape(2, *grid.shape)
    # bypass the projection so the stored values come back untouched
    a = ConnectionField.zeros(grid)
    object.__setattr__(a, "ax", z[0])
    object.__setattr__(a, "ay", z[1])
    return a
