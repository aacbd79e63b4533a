"""Synthetic data generators and the two reproducible experiment pipelines.

Desk-scale defaults are tuned so a full run finishes in minutes on one core;
everything is seeded and the emitted CSVs are byte-identical across repeats.

Experiment 1 (``run_depth_sweep``): train one architecture family over a
depth grid on data whose input-output map factors through two latent
coordinates, record final norms, middle-layer ranks and fit flags, and fit
norm-vs-depth slopes per constant-rank range.

Experiment 2 (``run_symmetry``): train a deep net to predict the loss
trajectory of a rank-one-recovery gradient descent from its initial vector, a
task whose symmetry group (rotations about the target axis) makes the map
effectively two-dimensional; then probe the learned representations for the
bottleneck spectrum and the collapse of symmetry orbits.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import diag
from . import linalg as la
from .errors import ConstructionError, DivergenceError, InputError
from .net import NetParams, forward
from .train import TrainConfig, TrainTrace, init, train, trace_to_csv


# ---------------------------------------------------------------------------
# data generators


@dataclass
class Rank2Dataset:
    """Inputs ``x = g(z)`` and targets ``y = h(z1, z2)`` for latent ``z``.

    ``g`` and ``h`` are frozen random single-hidden-layer ReLU nets, so the
    map from x to y factors through the first two latent coordinates. Both
    blocks are rescaled to unit mean squared column norm; the rescaling
    factors are recorded.
    """

    x: np.ndarray
    y: np.ndarray
    latent: np.ndarray
    seed: int
    g_params: NetParams
    h_params: NetParams
    x_scale: float
    y_scale: float
    linear_rank: int


def gen_rank2(
    seed: int,
    n_samples: int,
    latent_dim: int = 8,
    x_dim: int = 20,
    y_dim: int = 20,
    hidden: int = 64,
    g_slope: float = 0.0,
    h_slope: float = 0.0,
    normalize: bool = True,
) -> Rank2Dataset:
    if n_samples < 2:
        raise InputError("need at least 2 samples")
    rng = np.random.default_rng(seed)
    g_seed, h_seed, z_seed = (int(s) for s in rng.integers(0, 2**63 - 1, size=3))
    g = init([latent_dim, hidden, x_dim], slope_a=g_slope, scheme="fan_in", seed=g_seed)
    h = init([2, hidden, y_dim], slope_a=h_slope, scheme="fan_in", seed=h_seed)
    z = np.random.default_rng(z_seed).standard_normal((latent_dim, n_samples))
    x = forward(g, z).output
    y = forward(h, z[:2]).output
    x_scale = y_scale = 1.0
    if normalize:
        # restore the natural latent scales (mean ||x||^2 = latent_dim,
        # mean ||y||^2 = 2) so the composite map keeps roughly unit gain;
        # normalizing to unit norms instead would inflate its Jacobian and
        # with it the attainable parameter-norm floor
        x_scale = math.sqrt(float(np.mean(np.sum(x * x, axis=0))) / latent_dim)
        y_scale = math.sqrt(float(np.mean(np.sum(y * y, axis=0))) / 2.0)
        x = x / x_scale
        y = y / y_scale
    # columns must be pairwise distinct for the latent map to be recoverable
    d2 = np.sum(x * x, axis=0)[:, None] + np.sum(x * x, axis=0)[None, :] - 2 * x.T @ x
    np.fill_diagonal(d2, np.inf)
    if float(d2.min()) <= 0.0:
        raise ConstructionError("drawn inputs contain duplicate columns")
    # best linear map x -> y, recorded as metadata (typically rank > 2)
    m = y @ la.pinv(x)
    linear_rank = la.numerical_rank(m, 0.1)
    return Rank2Dataset(x, y, z, seed, g, h, x_scale, y_scale, linear_rank)


@dataclass
class SymmetryTask:
    """Loss-trajectory prediction task for rank-one recovery dynamics.

    ``targets[t-1, i]`` is the loss after ``t`` inner GD steps started from
    ``v0[:, i]``; ``summary`` holds the two rotation-invariant statistics
    ``((w.v)^2, ||(I - w w^T) v||^2)`` of each start vector.
    """

    w: np.ndarray
    noise_e: np.ndarray
    inner_eta: float
    horizon_t: int
    v0: np.ndarray
    targets: np.ndarray
    summary: np.ndarray
    seed: int
    regen_count: int
    target_scale: float


def _inner_loss(v: np.ndarray, m: np.ndarray, m_fro2: float) -> np.ndarray:
    """``||v v^T - M||_F^2`` per column of ``v`` for symmetric M."""
    n2 = np.sum(v * v, axis=0)
    quad = np.sum(v * (m @ v), axis=0)
    return n2**2 - 2.0 * quad + m_fro2


def _inner_paths(v0: np.ndarray, m: np.ndarray, eta: float, horizon: int) -> np.ndarray:
    """Stack of iterates, shape ``(horizon+1, d, N)``; index 0 is v0."""
    out = np.empty((horizon + 1,) + v0.shape)
    v = v0.copy()
    out[0] = v
    for t in range(1, horizon + 1):
        grad = 4.0 * (v * np.sum(v * v, axis=0) - m @ v)
        v = v - eta * grad
        out[t] = v
    return out


def gen_symmetry(
    seed: int,
    d: int = 20,
    horizon_t: int = 10,
    noise_scale: float = 0.01,
    inner_eta: float = 0.05,
    n_samples: int = 512,
    normalize: bool = True,
) -> SymmetryTask:
    if d < 3:
        raise InputError("d must be >= 3")
    if horizon_t < 1:
        raise InputError("horizon_t must be >= 1")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(d)
    w /= np.linalg.norm(w)
    tri = rng.standard_normal((d, d)) * (noise_scale / math.sqrt(d))
    e = np.triu(tri)
    e = e + np.triu(e, 1).T
    m = np.outer(w, w) + e
    m_fro2 = float(np.sum(m * m))
    v0 = rng.standard_normal((d, n_samples)) / math.sqrt(d)

    regen = 0
    for _ in range(64):
        paths = _inner_paths(v0, m, inner_eta, horizon_t)
        losses = np.stack(
            [_inner_loss(paths[t], m, m_fro2) for t in range(1, horizon_t + 1)]
        )
        bad = np.any(losses > 1e6, axis=0)
        if not bad.any():
            break
        v0 = v0.copy()
        v0[:, bad] *= 0.5
        regen += int(bad.sum())
    else:
        raise ConstructionError("inner dynamics kept diverging after damping")

    scale = 1.0
    if normalize:
        scale = math.sqrt(float(np.mean(np.sum(losses * losses, axis=0))))
        losses = losses / scale
    axis = (w @ v0) ** 2
    perp = np.sum(v0 * v0, axis=0) - axis
    summary = np.vstack([axis, perp])
    return SymmetryTask(
        w, e, inner_eta, horizon_t, v0, losses, summary, seed, regen, scale
    )


def rotation_about(w: np.ndarray, seed: int) -> np.ndarray:
    """Random orthogonal matrix fixing ``w`` (a rotation of its complement)."""
    d = w.shape[0]
    rng = np.random.default_rng(seed)
    basis = _complement_basis(w)
    g = rng.standard_normal((d - 1, d - 1))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    return np.outer(w, w) + basis @ q @ basis.T


def householder_fixing(w: np.ndarray, seed: int = 0) -> np.ndarray:
    """Reflection that keeps ``w`` fixed (unit normal drawn orthogonal to w)."""
    d = w.shape[0]
    rng = np.random.default_rng(seed)
    n = rng.standard_normal(d)
    n -= (w @ n) * w
    n /= np.linalg.norm(n)
    return np.eye(d) - 2.0 * np.outer(n, n)


def _complement_basis(w: np.ndarray) -> np.ndarray:
    d = w.shape[0]
    full = np.column_stack([w, np.eye(d)[:, : d - 1]])
    q, _ = np.linalg.qr(full)
    basis = q[:, 1:]
    return basis


# ---------------------------------------------------------------------------
# experiment 1: norm vs depth


@dataclass
class DepthSweepConfig:
    """Desk-scale norm-vs-depth experiment.

    Training uses a fixed learning-rate ladder per run: a short warmup, a
    long phase at the largest depth-stable step size (the large-step regime
    is what compresses the middle-layer rank), and a small-step polish that
    restores the fit. ``eta_mid = min(eta_cap, eta_scale / depth)`` unless
    set explicitly.
    """

    depths: tuple = tuple(range(3, 15))
    seeds: tuple = (0, 1, 2)
    width: int = 40
    n_samples: int = 192
    data_seed: int = 0
    gen_hidden: int = 12
    gen_g_slope: float = 0.9
    gen_h_slope: float = 0.0
    ridge: float = 1e-3
    eta_warmup: float = 0.02
    warmup_steps: int = 500
    ramp_steps: int = 1000
    eta_mid: float | None = None
    eta_cap: float = 0.25
    eta_scale: float = 1.6
    mid_steps_per_depth: int = 1000
    eta_polish: float = 0.04
    polish_steps: int = 2800
    stop_cost: float = 0.0
    log_every: int = 500
    rank_threshold: float = 0.1
    fit_threshold: float = 0.1
    init_scheme: str = "fan_in"
    out_dir: str | None = None


@dataclass
class SweepRunRecord:
    depth: int
    seed: int
    norm2: float | None
    cost: float | None
    rank_mid: int | None
    fit: bool | None
    mid_spectrum: list[float] | None
    params: NetParams | None
    trace: TrainTrace | None
    error: str | None


@dataclass
class RangeFit:
    seed: int
    rank: int
    depths: list[int]
    slope: float
    intercept: float
    resid_std: float
    mean_norm: float


@dataclass
class DepthSweepResult:
    config: DepthSweepConfig
    data: Rank2Dataset
    runs: list[SweepRunRecord]
    ranges: list[RangeFit]
    csv_path: str | None = None
    json_path: str | None = None


def _middle_weight(params: NetParams) -> np.ndarray:
    mid = (params.depth + 1) // 2
    return params.layers[mid - 1][0]


def _range_fits(runs: list[SweepRunRecord], seeds) -> list[RangeFit]:
    fits = []
    for seed in seeds:
        fitted = sorted(
            (r for r in runs if r.seed == seed and r.fit),
            key=lambda r: r.depth,
        )
        block: list[SweepRunRecord] = []
        for r in fitted + [None]:
            if block and (r is None or r.rank_mid != block[-1].rank_mid):
                if len(block) >= 2:
                    ls = np.array([b.depth for b in block], dtype=float)
                    ns = np.array([b.norm2 for b in block])
                    slope, intercept = np.polyfit(ls, ns, 1)
                    resid = ns - (slope * ls + intercept)
                    fits.append(
                        RangeFit(
                            seed,
                            block[-1].rank_mid,
                            [b.depth for b in block],
                            float(slope),
                            float(intercept),
                            float(np.std(resid)),
                            float(np.mean(ns)),
                        )
                    )
                block = []
            if r is not None:
                block.append(r)
    return fits


def _merge_traces(traces: list[TrainTrace]) -> TrainTrace:
    merged = TrainTrace()
    offset = 0
    for t in traces:
        for i in range(len(t.steps)):
            if merged.steps and offset + t.steps[i] <= merged.steps[-1]:
                continue
            merged.log(offset + t.steps[i], t.cost[i], t.norm2[i], t.balance[i], t.ntk_trace[i])
        offset += t.final_step
        merged.stopped_early = t.stopped_early
    merged.final_step = offset
    return merged


def _train_ladder(p0, x, y, phases, base: TrainConfig):
    params = p0
    traces = []
    for eta, steps, stop in phases:
        cfg = replace(base, eta0=eta, steps=steps, stop_cost=stop)
        params, trace = train(params, x, y, cfg)
        traces.append(trace)
    return params, _merge_traces(traces)


def _sweep_phases(cfg: DepthSweepConfig, depth: int):
    eta_mid = cfg.eta_mid if cfg.eta_mid is not None else min(cfg.eta_cap, cfg.eta_scale / depth)
    return [
        (cfg.eta_warmup, cfg.warmup_steps, 0.0),
        (eta_mid / 2.0, cfg.ramp_steps, 0.0),
        (eta_mid, cfg.mid_steps_per_depth * depth, 0.0),
        (cfg.eta_polish, cfg.polish_steps, cfg.stop_cost),
    ]


def run_depth_sweep(cfg: DepthSweepConfig) -> DepthSweepResult:
    data = gen_rank2(
        cfg.data_seed,
        cfg.n_samples,
        hidden=cfg.gen_hidden,
        g_slope=cfg.gen_g_slope,
        h_slope=cfg.gen_h_slope,
    )
    d_in, d_out = data.x.shape[0], data.y.shape[0]
    base = TrainConfig(ridge=cfg.ridge, log_every=cfg.log_every)
    records = []
    for depth in cfg.depths:
        for seed in cfg.seeds:
            widths = [d_in] + [cfg.width] * (depth - 1) + [d_out]
            p0 = init(widths, slope_a=0.0, scheme=cfg.init_scheme, seed=seed)
            try:
                params, trace = _train_ladder(
                    p0, data.x, data.y, _sweep_phases(cfg, depth), replace(base, seed=seed)
                )
            except DivergenceError as exc:
                records.append(
                    SweepRunRecord(
                        depth, seed, None, None, None, None, None, None, exc.trace, str(exc)
                    )
                )
                continue
            cost = trace.cost[-1]
            spectrum = la.singular_values(_middle_weight(params))
            records.append(
                SweepRunRecord(
                    depth,
                    seed,
                    params.squared_norm(),
                    cost,
                    int(np.sum(spectrum > cfg.rank_threshold)),
                    bool(cost < cfg.fit_threshold),
                    [float(s) for s in spectrum],
                    params,
                    trace,
                    None,
                )
            )
    ranges = _range_fits(records, cfg.seeds)
    result = DepthSweepResult(cfg, data, records, ranges)
    if cfg.out_dir:
        os.makedirs(cfg.out_dir, exist_ok=True)
        result.csv_path = os.path.join(cfg.out_dir, "sweep.csv")
        _write_sweep_csv(records, result.csv_path)
        result.json_path = os.path.join(cfg.out_dir, "sweep.json")
        with open(result.json_path, "w") as fh:
            json.dump(_sweep_json(result), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return result


def _write_sweep_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["depth", "seed", "norm2", "rank_mid", "fit"])
        for r in records:
            if r.error is not None:
                continue
            writer.writerow([r.depth, r.seed, repr(r.norm2), r.rank_mid, int(r.fit)])


def _sweep_json(result: DepthSweepResult) -> dict:
    return {
        "config": {
            k: (list(v) if isinstance(v, tuple) else v)
            for k, v in asdict(result.config).items()
        },
        "data": {
            "linear_rank": result.data.linear_rank,
            "x_scale": result.data.x_scale,
            "y_scale": result.data.y_scale,
        },
        "runs": [
            {
                "depth": r.depth,
                "seed": r.seed,
                "norm2": r.norm2,
                "cost": r.cost,
                "rank_mid": r.rank_mid,
                "fit": r.fit,
                "mid_spectrum": r.mid_spectrum,
                "error": r.error,
            }
            for r in result.runs
        ],
        "ranges": [asdict(f) for f in result.ranges],
    }


# ---------------------------------------------------------------------------
# experiment 2: symmetry learning


@dataclass
class SymmetryConfig:
    """Desk-scale symmetry-learning experiment (ladder schedule as in the sweep)."""

    depth: int = 12
    width: int = 64
    ridge: float = 2e-4
    eta_warmup: float = 0.02
    warmup_steps: int = 500
    ramp_steps: int = 1000
    eta_mid: float = 0.16
    mid_steps: int = 55000
    eta_polish: float = 0.05
    polish_steps: int = 4000
    stop_cost: float = 0.0
    log_every: int = 500
    seed: int = 0
    data_seed: int = 0
    d: int = 20
    horizon_t: int = 10
    noise_scale: float = 0.01
    inner_eta: float = 0.05
    n_samples: int = 256
    rank_threshold: float = 0.1
    n_paths: int = 12
    n_orbit_pairs: int = 64
    grid_size: int = 33
    pca_layer: int | None = None  # None = auto-select the bottleneck layer
    out_dir: str | None = None
    with_control: bool = True
    certify: bool = True


@dataclass
class SymmetryResult:
    config: SymmetryConfig
    task: SymmetryTask
    params: NetParams
    trace: TrainTrace
    spectra: diag.SpectralReport
    bottleneck_layer: int
    layers_with_two_outliers: int
    orbit_ratio: float
    control_ratio: float | None
    cor5: diag.Certificate | None
    files: dict = field(default_factory=dict)


def _bottleneck_layer(report: diag.SpectralReport, k: int = 2) -> int:
    """Hidden layer whose weight spectrum has the sharpest k-outlier gap."""
    best, best_score = 1, -math.inf
    n_layers = len(report.weight_spectra)
    for ell in range(2, n_layers):  # skip embedding and readout layers
        s = report.weight_spectra[ell - 1]
        if len(s) <= k:
            continue
        score = s[k - 1] / max(float(s[k]), 1e-12)
        if score > best_score:
            best, best_score = ell, score
    return best


def _orbit_distances(params, task, layer, n_pairs, seed):
    """Representation distances for same-orbit pairs vs random pairs."""
    rng = np.random.default_rng(seed)
    v0 = task.v0
    n = v0.shape[1]
    act = lambda xb: forward(params, xb).act(layer)
    idx = rng.integers(0, n, size=n_pairs)
    rotated = np.column_stack(
        [rotation_about(task.w, int(s)) @ v0[:, i] for i, s in zip(idx, rng.integers(0, 2**31, size=n_pairs))]
    )
    base = act(v0[:, idx])
    orb = act(rotated)
    orbit_d = np.sqrt(np.sum((base - orb) ** 2, axis=0))
    ii = rng.integers(0, n, size=n_pairs)
    jj = rng.integers(0, n, size=n_pairs)
    jj = np.where(jj == ii, (jj + 1) % n, jj)
    rand_d = np.sqrt(np.sum((act(v0[:, ii]) - act(v0[:, jj])) ** 2, axis=0))
    return float(np.median(orbit_d)), float(np.median(rand_d))


def run_symmetry(cfg: SymmetryConfig) -> SymmetryResult:
    task = gen_symmetry(
        cfg.data_seed,
        d=cfg.d,
        horizon_t=cfg.horizon_t,
        noise_scale=cfg.noise_scale,
        inner_eta=cfg.inner_eta,
        n_samples=cfg.n_samples,
    )
    widths = [cfg.d] + [cfg.width] * (cfg.depth - 1) + [cfg.horizon_t]
    p0 = init(widths, slope_a=0.0, scheme="fan_in", seed=cfg.seed)
    base = TrainConfig(ridge=cfg.ridge, log_every=cfg.log_every, seed=cfg.seed)
    phases = [
        (cfg.eta_warmup, cfg.warmup_steps, 0.0),
        (cfg.eta_mid / 2.0, cfg.ramp_steps, 0.0),
        (cfg.eta_mid, cfg.mid_steps, 0.0),
        (cfg.eta_polish, cfg.polish_steps, cfg.stop_cost),
    ]
    params, trace = _train_ladder(p0, task.v0, task.targets, phases, base)

    report = diag.layer_spectra(params, task.v0, threshold=cfg.rank_threshold)
    two_outliers = report.weight_rank_counts(exactly=2)
    layer = cfg.pca_layer or _bottleneck_layer(report)

    orbit_med, rand_med = _orbit_distances(params, task, layer, cfg.n_orbit_pairs, cfg.seed + 1)
    ratio = orbit_med / max(rand_med, 1e-300)
    control_ratio = None
    if cfg.with_control:
        c_orb, c_rand = _orbit_distances(p0, task, layer, cfg.n_orbit_pairs, cfg.seed + 1)
        control_ratio = c_orb / max(c_rand, 1e-300)

    cert = None
    if cfg.certify:
        sub = task.v0[:, : min(24, task.v0.shape[1])]
        certs = diag.standard_certificates(params, sub, k=None, p=0.5)
        cert = next(c for c in certs if c.name == "COR5_SK1")

    result = SymmetryResult(
        cfg,
        task,
        params,
        trace,
        report,
        layer,
        two_outliers,
        ratio,
        control_ratio,
        cert,
    )
    if cfg.out_dir:
        _write_symmetry_outputs(result)
    return result


def _write_symmetry_outputs(result: SymmetryResult) -> None:
    cfg = result.config
    os.makedirs(cfg.out_dir, exist_ok=True)
    files = result.files

    files["trace"] = os.path.join(cfg.out_dir, "trace.csv")
    trace_to_csv(result.trace, files["trace"])

    files["spectra"] = os.path.join(cfg.out_dir, "spectra.csv")
    diag.spectra_to_csv(result.spectra, files["spectra"])

    # hidden-layer principal components along inner GD paths
    task, params = result.task, result.params
    m = np.outer(task.w, task.w) + task.noise_e
    chosen = task.v0[:, : cfg.n_paths]
    paths = _inner_paths(chosen, m, task.inner_eta, task.horizon_t)
    acts = [forward(params, paths[t]).act(result.bottleneck_layer) for t in range(len(paths))]
    stacked = np.concatenate(acts, axis=1)
    center = stacked - stacked.mean(axis=1, keepdims=True)
    pcs = la.svd(center).u[:, :2]
    files["pca"] = os.path.join(cfg.out_dir, "pca.csv")
    with open(files["pca"], "w", newline="") as fh:
        fh.write("path_id,t,pc1,pc2\n")
        for t, a in enumerate(acts):
            proj = pcs.T @ (a - stacked.mean(axis=1, keepdims=True))
            for i in range(a.shape[1]):
                fh.write(f"{i},{t},{proj[0, i]!r},{proj[1, i]!r}\n")

    # distance field on a plane orthogonal to the symmetry axis
    basis = _complement_basis(task.w)[:, :2]
    radius = float(np.median(np.sqrt(task.summary[1])))
    n_grid = cfg.grid_size
    coords = np.linspace(-1.5 * radius, 1.5 * radius, n_grid)
    pts = np.array([[s, t] for s in coords for t in coords]).T
    grid_inputs = basis @ pts
    x0 = basis @ np.array([radius, 0.0])
    a_grid = forward(params, grid_inputs).act(result.bottleneck_layer)
    a_x0 = forward(params, x0).act(result.bottleneck_layer)
    dists = np.sqrt(np.sum((a_grid - a_x0) ** 2, axis=0))
    u_d = np.abs(np.sum(pts * pts, axis=0) - radius**2)
    files["orbit_grid"] = os.path.join(cfg.out_dir, "orbit_grid.csv")
    with open(files["orbit_grid"], "w", newline="") as fh:
        fh.write("coord1,coord2,rep_dist,u_dist\n")
        for i in range(pts.shape[1]):
            fh.write(f"{pts[0, i]!r},{pts[1, i]!r},{dists[i]!r},{u_d[i]!r}\n")

    files["report"] = os.path.join(cfg.out_dir, "symmetry.json")
    payload = {
        "config": asdict(cfg),
        "bottleneck_layer": result.bottleneck_layer,
        "layers_with_two_outliers": result.layers_with_two_outliers,
        "depth": result.params.depth,
        "orbit_ratio": result.orbit_ratio,
        "control_ratio": result.control_ratio,
        "final_cost": result.trace.cost[-1],
        "final_norm2": result.trace.norm2[-1],
        "regen_count": result.task.regen_count,
        "cor5": None if result.cor5 is None else result.cor5.to_json(),
    }
    with open(files["report"], "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# config files


def load_config(path) -> configparser.ConfigParser:
    """Parse a ``key = value`` config with ``[section]`` headers and # comments."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    read = parser.read(path)
    if not read:
        raise InputError(f"config file not found: {path}")
    return parser


def _seed_override(value: int) -> int:
    env = os.environ.get("BNLAB_SEED")
    return int(env) if env else value


def _coerce(dc_cls, section, overrides=None):
    """Build a config dataclass from a parser section, coercing field types."""
    kwargs = {}
    defaults = dc_cls()
    for key in section:
        if not hasattr(defaults, key):
            raise InputError(f"unknown config key {key!r} for {dc_cls.__name__}")
        current = getattr(defaults, key)
        raw = section[key]
        if key == "depths":
            kwargs[key] = tuple(_parse_int_list(raw))
        elif key == "seeds":
            kwargs[key] = tuple(_parse_int_list(raw))
        elif isinstance(current, bool):
            kwargs[key] = raw.strip().lower() in ("1", "true", "yes", "on")
        elif isinstance(current, int) or (current is None and key == "pca_layer"):
            kwargs[key] = int(raw)
        elif isinstance(current, float) or (current is None and key == "eta_mid"):
            kwargs[key] = float(raw)
        else:
            kwargs[key] = raw
    cfg = replace(defaults, **kwargs)
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def _parse_int_list(raw: str) -> list[int]:
    raw = raw.strip()
    if "-" in raw and "," not in raw:
        lo, hi = raw.split("-")
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in raw.replace(",", " ").split()]


def sweep_config_from_file(path, out_dir=None) -> DepthSweepConfig:
    parser = load_config(path)
    section = {}
    for name in ("data", "train", "sweep", "output"):
        if parser.has_section(name):
            section.update(parser[name])
    overrides = {}
    if out_dir is not None:
        overrides["out_dir"] = str(out_dir)
    cfg = _coerce(DepthSweepConfig, section, overrides)
    return replace(cfg, data_seed=_seed_override(cfg.data_seed))


def symmetry_config_from_file(path, out_dir=None) -> SymmetryConfig:
    parser = load_config(path)
    section = {}
    for name in ("data", "train", "sweep", "output"):
        if parser.has_section(name):
            section.update(parser[name])
    overrides = {}
    if out_dir is not None:
        overrides["out_dir"] = str(out_dir)
    cfg = _coerce(SymmetryConfig, section, overrides)
    return replace(
        cfg, seed=_seed_override(cfg.seed), data_seed=_seed_override(cfg.data_seed)
    )
