import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stabflow.flow import (
    ConfigError,
    FlowConfig,
    FlowDivergedError,
    FlowTrace,
    background_energy,
    central_residual,
    excess_energy,
    holonomy_commutant_dim,
    jacobian_coordinates,
    read_config,
    run_flow,
    ym_energy,
    ym_gradient,
)
from stabflow.lattice import (
    ConnectionField,
    GaugeField,
    GridSpec,
    expm_ah,
    gauge_act,
    l2_metric,
    random_connection,
    random_gauge,
    random_tangent,
    smooth_ah_field,
)

seeds = st.integers(0, 2**32 - 1)
rd_pairs = st.sampled_from([(1, 0), (1, 1), (2, 1), (2, -1), (3, 2)])


@pytest.mark.parametrize("r, d", [(1, 0), (1, 1), (2, 1), (3, 2)])
def test_energy_and_gradient_at_background(r, d):
    g = GridSpec(16, r, d)
    a = ConnectionField.zeros(g)
    assert ym_energy(a) == pytest.approx(4 * np.pi**2 * d * d / r, rel=1e-12, abs=1e-12)
    grad = ym_gradient(a)
    assert np.max(np.abs(grad.bx)) == 0 and np.max(np.abs(grad.by)) == 0
    assert central_residual(a) < 1e-12


@given(seeds, rd_pairs)
@settings(max_examples=20)
def test_gradient_matches_finite_differences(seed, rd):
    rng = np.random.default_rng(seed)
    g = GridSpec(16, *rd)
    a = random_connection(g, seed)
    eta = random_tangent(g, rng)
    t = 1e-5
    fd = (ym_energy(a + t * eta) - ym_energy(a + (-t) * eta)) / (2 * t)
    ex = l2_metric(ym_gradient(a), eta)
    assert fd == pytest.approx(ex, rel=1e-6, abs=1e-8)


@given(seeds, rd_pairs)
@settings(max_examples=20)
def test_energy_bound_and_excess(seed, rd):
    g = GridSpec(16, *rd)
    a = random_connection(g, seed, amplitude=2.0)
    e = ym_energy(a)
    assert e >= background_energy(g) - 1e-9
    assert excess_energy(a) == pytest.approx(e - background_energy(g), rel=1e-9, abs=1e-9)


def test_energy_invariant_under_constant_gauge():
    g = GridSpec(16, 2, 1)
    rng = np.random.default_rng(1)
    a = random_connection(g, 1)
    u0 = expm_ah(smooth_ah_field(GridSpec(8, 2), rng, 0)[0, 0])
    u = GaugeField(g, np.broadcast_to(u0, g.shape))
    assert ym_energy(gauge_act(u, a)) == pytest.approx(ym_energy(a), rel=1e-12)


def test_energy_gauge_invariance_second_order():
    def err(seed, n):
        g = GridSpec(n, 2, 1)
        rng = np.random.default_rng(seed)
        a = ConnectionField(g, smooth_ah_field(g, rng, 1, 0.25), smooth_ah_field(g, rng, 1, 0.25))
        u = random_gauge(g, rng, 1, 0.25)
        return abs(ym_energy(gauge_act(u, a)) - ym_energy(a))

    # n = 16 is still pre-asymptotic for this quantity
    errs = np.array([[err(s, n) for n in (32, 64, 128)] for s in range(4)])
    ratios = (errs[:, :-1] / errs[:, 1:]).mean(axis=0)
    assert ratios[-1] > 3.5 and ratios[-1] < 4.5, ratios
    assert errs[:, -1].max() < 5e-3


# ---------------------------------------------------------------- descent


@pytest.mark.parametrize("method", ["lbfgs", "gd"])
def test_flow_decreases_energy_monotonically(method):
    g = GridSpec(16, 1, 1)
    cfg = FlowConfig(g, seed=3, max_steps=200, method=method, tol=1e-8)
    res = run_flow(random_connection(g, 3), cfg)
    e = res.trace.column("energy")
    assert len(e) >= 1
    assert np.all(np.diff(e) <= 0)
    assert e[-1] < ym_energy(random_connection(g, 3))


def test_flow_converges_to_central_curvature():
    g = GridSpec(16, 1, 1)
    res = run_flow(random_connection(g, 0), FlowConfig(g, tol=1e-9))
    assert res.converged
    assert central_residual(res.field) < 1e-8
    assert res.trace.rows[-1][0] == res.steps
    a, trace = res
    assert a is res.field and trace is res.trace


def test_flow_is_deterministic():
    g = GridSpec(16, 2, 1)
    cfg = FlowConfig(g, max_steps=50)
    r1 = run_flow(random_connection(g, 5), cfg)
    r2 = run_flow(random_connection(g, 5), cfg)
    assert r1.trace.rows == r2.trace.rows


def test_max_steps_one_records_one_row():
    g = GridSpec(16, 2, 1)
    res = run_flow(random_connection(g, 0), FlowConfig(g, max_steps=1))
    assert not res.converged and res.steps == 1
    assert len(res.trace.rows) == 1 and res.trace.rows[0][0] == 1


def test_record_every_thins_the_trace():
    g = GridSpec(16, 1, 1)
    res = run_flow(random_connection(g, 0), FlowConfig(g, max_steps=9, record_every=4, tol=1e-14))
    assert [row[0] for row in res.trace.rows] == [4, 8, 9]


def test_already_critical_input_returns_immediately():
    g = GridSpec(16, 2, 1)
    res = run_flow(ConnectionField.zeros(g), FlowConfig(g))
    assert res.converged and res.steps == 0 and len(res.trace.rows) == 1


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_non_finite_input_diverges():
    g = GridSpec(8, 1, 1)
    bad = ConnectionField(g, np.full(g.shape, np.inf * 1j), g.zeros())
    with pytest.raises(FlowDivergedError) as err:
        run_flow(bad, FlowConfig(g))
    assert err.value.step == 0


def test_trace_csv_round_trip(tmp_path):
    g = GridSpec(16, 1, 1)
    res = run_flow(random_connection(g, 2), FlowConfig(g, max_steps=20))
    res.trace.write_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "step,energy,grad_norm,central_residual"
    assert FlowTrace.read_csv(tmp_path / "t.csv").rows == res.trace.rows


def test_config_validation():
    g = GridSpec(16)
    for bad in (dict(step_size=0), dict(tol=-1), dict(max_steps=0), dict(method="newton"), dict(memory=0)):
        with pytest.raises(ValueError):
            FlowConfig(g, **bad)


# ---------------------------------------------------------------- moduli coordinates


def test_jacobian_examples():
    g = GridSpec(16, 1, 0)
    a = ConnectionField(g, np.full(g.shape, 2j * np.pi * 0.3), np.full(g.shape, 2j * np.pi * 0.7))
    assert jacobian_coordinates(a) == pytest.approx((0.3, 0.7), abs=1e-12)
    assert jacobian_coordinates(ConnectionField.zeros(g)) == (0.0, 0.0)


def test_jacobian_rejects():
    with pytest.raises(ValueError, match="rank 1"):
        jacobian_coordinates(ConnectionField.zeros(GridSpec(8, 2, 0)))
    with pytest.raises(ValueError, match="not flat"):
        jacobian_coordinates(random_connection(GridSpec(16, 1, 0), 0))


def test_commutant_dimension():
    assert holonomy_commutant_dim(ConnectionField.zeros(GridSpec(8, 2))) == 4
    g = GridSpec(8, 2)
    ax = np.broadcast_to(np.diag([0.5j, -1.25j]), g.shape)
    assert holonomy_commutant_dim(ConnectionField(g, ax, g.zeros())) == 2


# ---------------------------------------------------------------- config files


def _write(tmp_path, text):
    p = tmp_path / "flow.cfg"
    p.write_text(text)
    return p


def test_read_config(tmp_path):
    p = _write(tmp_path, "# demo\ngrid_n = 16\nrank = 2\ndegree = 1\nseed = 4  # trailing\nstep_size = 0.01\n")
    cfg = read_config(p)
    assert cfg.grid == GridSpec(16, 2, 1)
    assert cfg.seed == 4 and cfg.step_size == 0.01 and cfg.tol == 1e-8


@pytest.mark.parametrize(
    "text, key",
    [
        ("grid_n = 10\nrank = 1\ndegree = 0\n", "grid_n"),
        ("grid_n = 16\nrank = 0\ndegree = 0\n", "rank"),
        ("grid_n = 16\nrank = 1\ndegree = 0\nbogus = 3\n", "bogus"),
        ("grid_n = 16\nrank = 1\n", "degree"),
        ("grid_n = 16\nrank = 1\ndegree = 0\ntol = abc\n", "tol"),
        ("grid_n = 16\nrank = 1\ndegree = 0\nstep_size = -1\n", "step_size"),
    ],
)
def test_read_config_errors_name_the_key(tmp_path, text, key):
    with pytest.raises(ConfigError) as err:
        read_config(_write(tmp_path, text))
    assert err.value.key == key
