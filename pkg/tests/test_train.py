import numpy as np
import pytest

from bnlab import repcost as rc
from bnlab import train as tr
from bnlab.errors import DivergenceError, InputError
from bnlab.net import forward

RNG = np.random.default_rng(2024)


# ---------------------------------------------------------------------------
# init


def test_init_deterministic():
    a = tr.init([3, 3], 0.0, seed=5)
    b = tr.init([3, 3], 0.0, seed=5)
    for (w1, b1), (w2, b2) in zip(a.layers, b.layers):
        assert np.array_equal(w1, w2)
        assert np.array_equal(b1, b2)


def test_init_fan_in_variance():
    slope = 0.3
    target = 2.0 / (50 * (1 + slope**2))
    samples = []
    for seed in range(10):
        p = tr.init([50, 50], slope, scheme="fan_in", seed=seed)
        samples.append(np.var(p.layers[0][0]))
    mean_var = float(np.mean(samples))
    assert abs(mean_var - target) <= 0.2 * target


def test_init_orthogonal_square():
    p = tr.init([8, 8, 8], 0.0, scheme="orthogonal", seed=1)
    for w, _ in p.layers:
        assert np.abs(w.T @ w - np.eye(8)).max() <= 1e-9


def test_init_rejects_bad_widths():
    with pytest.raises(InputError):
        tr.init([4], 0.0)


# ---------------------------------------------------------------------------
# train


def test_large_ridge_collapses_params():
    x = RNG.standard_normal((3, 16))
    y = RNG.standard_normal((2, 16))
    p0 = tr.init([3, 4, 2], 0.0, seed=0)
    cfg = tr.TrainConfig(ridge=10.0, eta0=0.01, steps=400, log_every=50)
    p, trace = tr.train(p0, x, y, cfg)
    assert p.squared_norm() < 1e-3
    assert trace.steps[-1] == 400


def test_deep_linear_norm_approaches_closed_form():
    # slope close to 1 makes the network effectively linear, so the trained
    # norm should approach the depth-3 closed form of the learned product
    a_true = np.array([[1.2, 0.3], [-0.4, 0.8]])
    x = RNG.standard_normal((2, 64))
    y = a_true @ x
    slope = 1.0 - 1e-9
    p0 = tr.init([2, 4, 4, 2], slope, seed=1)
    cfg = tr.TrainConfig(ridge=1e-3, eta0=0.05, steps=8000, log_every=500)
    p, _ = tr.train(p0, x, y, cfg)
    prod = p.layers[0][0]
    for w, _ in p.layers[1:]:
        prod = w @ prod
    closed = rc.linear_repcost_exact(prod, 3)
    assert p.squared_norm() == pytest.approx(closed, rel=0.05)


def test_fit_flag_threshold():
    x = RNG.standard_normal((2, 32))
    y = 0.5 * x
    p0 = tr.init([2, 8, 2], 0.0, seed=3)
    cfg = tr.TrainConfig(ridge=0.0, eta0=0.05, steps=2000, log_every=100)
    p, trace = tr.train(p0, x, y, cfg)
    assert trace.cost[-1] < 0.1  # "fits" under the 0.1 cost cut


def test_determinism_bit_identical():
    x = RNG.standard_normal((3, 20))
    y = RNG.standard_normal((2, 20))
    cfg = tr.TrainConfig(ridge=1e-3, eta0=0.02, steps=300, log_every=50, batch=8, seed=9)
    p0 = tr.init([3, 5, 2], 0.0, seed=9)
    _, t1 = tr.train(p0, x, y, cfg)
    _, t2 = tr.train(p0, x, y, cfg)
    assert t1.cost == t2.cost
    assert t1.norm2 == t2.norm2


def test_ridge_only_geometric_decay():
    p0 = tr.init([3, 4, 2], 0.0, seed=0)
    x = RNG.standard_normal((3, 8))
    y = RNG.standard_normal((2, 8))
    eta, lam = 0.01, 0.5
    cfg = tr.TrainConfig(
        ridge=lam, eta0=eta, steps=10, log_every=1, data_weight=0.0
    )
    _, trace = tr.train(p0, x, y, cfg)
    factor = (1 - 2 * eta * lam) ** 2
    for i in range(1, len(trace.norm2)):
        assert trace.norm2[i] == pytest.approx(trace.norm2[i - 1] * factor, rel=1e-12)


def test_backtracking_cost_non_increasing():
    x = RNG.standard_normal((3, 32))
    y = RNG.standard_normal((3, 32))
    p0 = tr.init([3, 6, 3], 0.0, seed=4)
    cfg = tr.TrainConfig(ridge=1e-3, eta0=1.5, steps=400, log_every=20, backtracking=True)
    _, trace = tr.train(p0, x, y, cfg)
    obj = [c + 1e-3 * n for c, n in zip(trace.cost, trace.norm2)]
    for i in range(1, len(obj)):
        assert obj[i] <= obj[i - 1] + 1e-12


def test_divergence_reported_with_trace():
    x = RNG.standard_normal((2, 16))
    y = RNG.standard_normal((2, 16))
    p0 = tr.init([2, 4, 2], 0.0, seed=0)
    cfg = tr.TrainConfig(ridge=0.0, eta0=50.0, steps=2000, log_every=10)
    with pytest.raises(DivergenceError) as info:
        tr.train(p0, x, y, cfg)
    trace = info.value.trace
    assert trace is not None
    assert all(np.isfinite(c) for c in trace.cost)


def test_early_stop_on_norm_stationarity():
    # single linear layer: strongly convex, so GD reaches a stationary norm fast
    x = RNG.standard_normal((2, 16))
    y = 0.3 * x
    p0 = tr.init([2, 2], 0.0, seed=1)
    cfg = tr.TrainConfig(ridge=1e-3, eta0=0.05, steps=50000, log_every=100, stop_cost=0.05)
    _, trace = tr.train(p0, x, y, cfg)
    assert trace.stopped_early
    assert trace.final_step < 50000


# ---------------------------------------------------------------------------
# sweep


def test_sweep_matches_single_runs():
    x = RNG.standard_normal((2, 16))
    y = 0.4 * x
    cfg = tr.TrainConfig(ridge=1e-3, eta0=0.05, steps=200, log_every=50, seed=7)
    runs = tr.train_sweep([2, 3], lambda d: [2] * (d + 1), (x, y), cfg, seeds=[7])
    for run in runs:
        p0 = tr.init([2] * (run.depth + 1), 0.0, seed=7)
        p, t = tr.train(p0, x, y, cfg)
        assert run.trace.cost == t.cost
        assert np.array_equal(run.params.layers[0][0], p.layers[0][0])


def test_sweep_no_training_control():
    x = RNG.standard_normal((2, 8))
    y = RNG.standard_normal((2, 8))
    cfg = tr.TrainConfig(ridge=0.0, eta0=1e-9, steps=5, log_every=1, seed=0)
    runs = tr.train_sweep([2], lambda d: [2, 3, 2], (x, y), cfg)
    t = runs[0].trace
    assert abs(t.norm2[-1] - t.norm2[0]) <= 1e-6 * t.norm2[0]


def test_sweep_records_failures_and_continues():
    x = RNG.standard_normal((2, 8))
    y = RNG.standard_normal((2, 8))
    cfg = tr.TrainConfig(ridge=0.0, eta0=100.0, steps=500, log_every=10, seed=0)
    runs = tr.train_sweep([3, 4], lambda d: [2, 6, 6, 2, 2][: d + 1], (x, y), cfg)
    assert len(runs) == 2
    assert any(r.error for r in runs)


# ---------------------------------------------------------------------------
# trace CSV


def test_trace_csv_header_and_determinism(tmp_path):
    x = RNG.standard_normal((2, 8))
    y = 0.2 * x
    p0 = tr.init([2, 3, 2], 0.0, seed=0)
    cfg = tr.TrainConfig(ridge=1e-3, eta0=0.05, steps=100, log_every=25, track_ntk=True)
    _, trace = tr.train(p0, x, y, cfg)
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    tr.trace_to_csv(trace, f1)
    tr.trace_to_csv(trace, f2)
    text = f1.read_text()
    assert text.splitlines()[0] == "step,cost,norm2,balance,ntk_trace"
    assert text == f2.read_text()
