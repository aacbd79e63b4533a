"""Full-batch GD / minibatch SGD with L2 regularization and training traces.

Plain first-order descent only: the norm trajectories this library studies
are confounded by momentum or adaptive preconditioners. The learning rate can
be scaled as ``eta0 / depth``, the scaling under which deep tangent kernels
stay of order depth.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DivergenceError, InputError
from .net import (
    NetParams,
    balancedness_residual,
    forward,
    grad,
    mse_cost,
    ntk_trace,
    _as_batch,
)

FULL_BATCH = None


@dataclass
class TrainConfig:
    ridge: float = 0.0
    eta0: float = 0.1
    lr_depth_scaled: bool = False
    steps: int = 1000
    batch: int | None = FULL_BATCH
    seed: int = 0
    stop_cost: float = 0.0  # 0 disables early stopping
    log_every: int = 100
    backtracking: bool = False
    data_weight: float = 1.0
    track_ntk: bool = False
    ntk_points: int = 8

    def validated(self) -> "TrainConfig":
        if self.steps < 1:
            raise InputError("steps must be >= 1")
        if self.ridge < 0:
            raise InputError("ridge must be >= 0")
        if self.eta0 <= 0:
            raise InputError("eta0 must be > 0")
        if self.log_every < 1:
            raise InputError("log_every must be >= 1")
        return self


@dataclass
class TrainTrace:
    steps: list[int] = field(default_factory=list)
    cost: list[float] = field(default_factory=list)
    norm2: list[float] = field(default_factory=list)
    balance: list[float] = field(default_factory=list)
    ntk_trace: list[float | None] = field(default_factory=list)
    stopped_early: bool = False
    final_step: int = 0

    def log(self, step, cost, norm2, balance, ntk=None):
        self.steps.append(int(step))
        self.cost.append(float(cost))
        self.norm2.append(float(norm2))
        self.balance.append(float(balance))
        self.ntk_trace.append(None if ntk is None else float(ntk))


def trace_to_csv(trace: TrainTrace, path) -> None:
    """Write the trace with the fixed header ``step,cost,norm2,balance,ntk_trace``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "cost", "norm2", "balance", "ntk_trace"])
        for i in range(len(trace.steps)):
            ntk = trace.ntk_trace[i]
            writer.writerow(
                [
                    trace.steps[i],
                    repr(trace.cost[i]),
                    repr(trace.norm2[i]),
                    repr(trace.balance[i]),
                    "" if ntk is None else repr(ntk),
                ]
            )


def init(widths, slope_a: float, scheme: str = "fan_in", seed: int = 0) -> NetParams:
    """Seeded initialization.

    ``fan_in``: Gaussian weights with variance ``2 / (n_in * (1 + a^2))``
    (forward-variance preserving for the leaky nonlinearity). ``orthogonal``:
    semi-orthogonal weight matrices. Biases are zero in both schemes.
    """
    widths = [int(n) for n in widths]
    if len(widths) < 2:
        raise InputError("need at least input and output widths")
    if scheme not in ("fan_in", "orthogonal"):
        raise InputError(f"unknown init scheme {scheme!r}")
    rng = np.random.default_rng(seed)
    layers = []
    for ell in range(1, len(widths)):
        n_out, n_in = widths[ell], widths[ell - 1]
        if scheme == "fan_in":
            std = np.sqrt(2.0 / (n_in * (1.0 + slope_a**2)))
            w = rng.standard_normal((n_out, n_in)) * std
        else:
            g = rng.standard_normal((max(n_out, n_in), min(n_out, n_in)))
            q, r = np.linalg.qr(g)
            q = q * np.sign(np.diag(r))
            w = q if n_out >= n_in else q.T
        layers.append((w, np.zeros(n_out)))
    return NetParams(layers, slope_a)


def _axpy(params: NetParams, coeff: float, other: NetParams) -> NetParams:
    layers = [
        (w + coeff * dw, b + coeff * db)
        for (w, b), (dw, db) in zip(params.layers, other.layers)
    ]
    return NetParams._wrap(layers, params.slope_a)


def _objective(params, x, y, cfg):
    return cfg.data_weight * mse_cost(params, x, y) + cfg.ridge * params.squared_norm()


def _mean_ntk(params, x, n_points):
    cols = min(n_points, x.shape[1])
    vals = [ntk_trace(params, x[:, i], include_bias=True)[0] for i in range(cols)]
    return float(np.mean(vals))


def train(params: NetParams, x, y, cfg: TrainConfig) -> tuple[NetParams, TrainTrace]:
    """Gradient descent on ``data_weight * MSE + ridge * ||theta||^2``.

    Full batch when ``cfg.batch`` is None, otherwise epoch-shuffled minibatch
    SGD. Early-stops once the full-batch cost is below ``stop_cost`` and the
    squared parameter norm is stationary between consecutive log points.
    Divergence raises ``DivergenceError`` carrying the last finite trace.
    """
    cfg = cfg.validated()
    x = _as_batch(x, params.d_in)
    y = _as_batch(y, params.d_out)
    if x.shape[1] != y.shape[1]:
        raise InputError("x and y must have the same number of columns")
    n = x.shape[1]
    params = params.copy()
    eta = cfg.eta0 / params.depth if cfg.lr_depth_scaled else cfg.eta0
    rng = np.random.default_rng(cfg.seed)
    full_batch = cfg.batch is None or cfg.batch >= n

    trace = TrainTrace()

    def log_point(step):
        cost = mse_cost(params, x, y)
        norm2 = params.squared_norm()
        ntk = _mean_ntk(params, x, cfg.ntk_points) if cfg.track_ntk else None
        trace.log(step, cost, norm2, balancedness_residual(params), ntk)
        return cost, norm2

    cost, norm2 = log_point(0)
    prev_norm2 = norm2
    if not np.isfinite(cost):
        raise DivergenceError("initial cost is non-finite", trace)

    order = None
    cursor = 0
    step = 0
    # overflow to inf is the divergence detector; keep it silent
    with np.errstate(over="ignore", invalid="ignore"):
        while step < cfg.steps:
            step += 1
            if full_batch:
                xb, yb = x, y
            else:
                if order is None or cursor + cfg.batch > n:
                    order = rng.permutation(n)
                    cursor = 0
                idx = order[cursor : cursor + cfg.batch]
                cursor += cfg.batch
                xb, yb = x[:, idx], y[:, idx]
            if cfg.data_weight == 1.0:
                g = grad(params, xb, yb, lam=cfg.ridge)
            else:
                g = grad(params, xb, yb, lam=0.0)
                g = NetParams._wrap(
                    [(cfg.data_weight * dw, cfg.data_weight * db) for dw, db in g.layers],
                    params.slope_a,
                )
                if cfg.ridge:
                    g = _axpy(g, 2.0 * cfg.ridge, params)
            if cfg.backtracking:
                before = _objective(params, xb, yb, cfg)
                eta_t = eta
                for _ in range(30):
                    trial = _axpy(params, -eta_t, g)
                    if _objective(trial, xb, yb, cfg) <= before:
                        break
                    eta_t *= 0.5
                params = trial
            else:
                params = _axpy(params, -eta, g)

            if step % cfg.log_every == 0 or step == cfg.steps:
                if not np.isfinite(params.squared_norm()):
                    raise DivergenceError(f"parameters diverged by step {step}", trace)
                cost, norm2 = log_point(step)
                if not np.isfinite(cost):
                    raise DivergenceError(f"cost diverged by step {step}", trace)
                if (
                    cfg.stop_cost > 0
                    and cost < cfg.stop_cost
                    and abs(norm2 - prev_norm2) < 1e-7 * max(1.0, norm2)
                ):
                    trace.stopped_early = True
                    break
                prev_norm2 = norm2

    trace.final_step = step
    return params, trace


@dataclass
class SweepRun:
    depth: int
    seed: int
    params: NetParams | None
    trace: TrainTrace | None
    error: str | None = None


def train_sweep(
    depths,
    widths_fn,
    data,
    cfg: TrainConfig,
    seeds=None,
    slope_a: float = 0.0,
    init_scheme: str = "fan_in",
) -> list[SweepRun]:
    """Independent (depth, seed) runs; failures are recorded, not raised.

    Runs execute sequentially in input order so results are deterministic and
    reproducible; there is no shared state between runs.
    """
    x, y = data
    seeds = list(seeds) if seeds is not None else [cfg.seed]
    out = []
    for depth in depths:
        for seed in seeds:
            run_cfg = replace(cfg, seed=seed)
            try:
                p0 = init(widths_fn(depth), slope_a=slope_a, scheme=init_scheme, seed=seed)
                p, t = train(p0, x, y, run_cfg)
                out.append(SweepRun(depth, seed, p, t))
            except DivergenceError as exc:
                out.append(SweepRun(depth, seed, None, exc.trace, error=str(exc)))
    return out
