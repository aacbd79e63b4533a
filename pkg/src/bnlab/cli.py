"""Command line front end.

Subcommands: ``repcost`` (closed form and expansion for a matrix), ``build``
(write constructed networks to weight files), ``train`` (single run from a
config file), ``diagnose`` (certificates and spectra for a weight file),
``sweep`` and ``symmetry`` (the two experiment pipelines).

Exit codes: 0 success, 1 runtime failure, 2 bad arguments. The environment
variable ``BNLAB_SEED`` overrides config-file seeds; an explicit ``--seed``
flag beats both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import diag, experiments as ex, repcost as rc
from .errors import BnlabError
from .net import load_net, save_net
from .train import TrainConfig, init, train, trace_to_csv


def parse_matrix(spec: str) -> np.ndarray:
    """``diag:2,0.5`` | ``eye:3`` | path to a whitespace/comma numeric file."""
    if spec.startswith("diag:"):
        vals = [float(t) for t in spec[5:].split(",") if t]
        if not vals:
            raise ValueError("diag: needs at least one value")
        return np.diag(vals)
    if spec.startswith("eye:"):
        return np.eye(int(spec[4:]))
    if not os.path.exists(spec):
        raise FileNotFoundError(f"matrix file not found: {spec}")
    rows = []
    with open(spec) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(t) for t in line.replace(",", " ").split()])
    return np.array(rows, dtype=float)


def _seed_value(args, fallback: int = 0) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("BNLAB_SEED")
    return int(env) if env else fallback


def _out_path(args, name: str) -> str:
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        return os.path.join(args.out_dir, name)
    return name


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="override all seeds")
    p.add_argument("--out-dir", default=None, help="directory for outputs")
    p.add_argument("--config", default=None, help="config file ([section] key = value)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bnlab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("repcost", help="closed-form depth cost of a linear map")
    _common_flags(p)
    p.add_argument("--matrix", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out", default=None, help="write the JSON here instead of stdout")

    p = sub.add_parser("build", help="construct a network and write a weight file")
    _common_flags(p)
    p.add_argument("kind", choices=["factorize", "cp", "counterexample"])
    p.add_argument("--matrix", default=None)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--gain", type=float, default=1.0, help="crease coefficient")
    p.add_argument("--slope", type=float, default=0.0)
    p.add_argument("--samples", default=None, help="matrix file of domain sample columns")
    p.add_argument("--n-samples", type=int, default=32)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train a single network from a config file")
    _common_flags(p)
    p.add_argument("--weights-out", default="trained.bnw")

    p = sub.add_parser("diagnose", help="evaluate certificates on a weight file")
    _common_flags(p)
    p.add_argument("--weights", required=True)
    p.add_argument(
        "--op",
        required=True,
        choices=["r1", "thm3", "thm4", "cor5", "prop6", "spectra", "lip", "all"],
    )
    p.add_argument("--data", default=None, help="inputs file (rows are samples)")
    p.add_argument("--n-samples", type=int, default=16)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--c-lip", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--out", default=None)

    p = sub.add_parser("sweep", help="norm-vs-depth experiment from a config file")
    _common_flags(p)

    p = sub.add_parser("symmetry", help="symmetry-learning experiment from a config file")
    _common_flags(p)

    return parser


def _load_inputs(args, d_in: int) -> np.ndarray:
    if args.data:
        m = parse_matrix(args.data)
        if m.shape[1] != d_in and m.shape[0] == d_in:
            return m
        return m.T  # rows are samples
    rng = np.random.default_rng(_seed_value(args))
    return rng.uniform(0.0, 1.0, (d_in, args.n_samples))


def cmd_repcost(args) -> int:
    m = parse_matrix(args.matrix)
    breakdown = rc.linear_repcost_expansion(m, args.depth)
    payload = json.dumps(breakdown.to_json(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return 0


def cmd_build(args) -> int:
    if args.kind == "counterexample":
        params = rc.counterexample_network(args.depth, args.eps, branch_coeff=args.gain)
    else:
        if not args.matrix:
            raise BnlabError(f"build {args.kind} requires --matrix")
        m = parse_matrix(args.matrix)
        if args.kind == "factorize":
            params = rc.optimal_linear_factorization(m, args.depth, slope_a=args.slope)
        else:
            if args.samples:
                samples = parse_matrix(args.samples)
            else:
                rng = np.random.default_rng(_seed_value(args))
                samples = rng.uniform(0.0, 1.0, (m.shape[1], args.n_samples))
            params = rc.cp_interpolation_network(m, args.depth, samples, slope_a=args.slope)
    save_net(params, args.out)
    print(f"wrote {args.out} (depth {params.depth}, widths {params.widths})")
    return 0


def cmd_train(args) -> int:
    if not args.config:
        raise BnlabError("train requires --config")
    parser = ex.load_config(args.config)
    data_sec = parser["data"] if parser.has_section("data") else {}
    train_sec = dict(parser["train"]) if parser.has_section("train") else {}
    kind = data_sec.get("kind", "rank2")
    seed = _seed_value(args, int(data_sec.get("seed", 0)))
    n = int(data_sec.get("n_samples", 128))
    if kind == "rank2":
        ds = ex.gen_rank2(seed, n)
        x, y = ds.x, ds.y
    elif kind == "symmetry":
        task = ex.gen_symmetry(
            seed,
            d=int(data_sec.get("d", 20)),
            horizon_t=int(data_sec.get("horizon_t", 10)),
            noise_scale=float(data_sec.get("noise_scale", 0.01)),
            inner_eta=float(data_sec.get("inner_eta", 0.05)),
            n_samples=n,
        )
        x, y = task.v0, task.targets
    else:
        raise BnlabError(f"unknown data kind {kind!r}")
    depth = int(train_sec.pop("depth", 4))
    width = int(train_sec.pop("width", 32))
    slope = float(train_sec.pop("slope_a", 0.0))
    scheme = train_sec.pop("init", "fan_in")
    cfg_fields = {}
    defaults = TrainConfig()
    for key, raw in train_sec.items():
        if not hasattr(defaults, key):
            raise BnlabError(f"unknown train key {key!r}")
        cur = getattr(defaults, key)
        if isinstance(cur, bool):
            cfg_fields[key] = raw.strip().lower() in ("1", "true", "yes", "on")
        elif isinstance(cur, int) or cur is None:
            cfg_fields[key] = int(raw)
        elif isinstance(cur, float):
            cfg_fields[key] = float(raw)
    cfg = TrainConfig(**cfg_fields)
    if args.seed is not None or os.environ.get("BNLAB_SEED"):
        cfg.seed = _seed_value(args, cfg.seed)
    widths = [x.shape[0]] + [width] * (depth - 1) + [y.shape[0]]
    p0 = init(widths, slope, scheme=scheme, seed=cfg.seed)
    params, trace = train(p0, x, y, cfg)
    weights_path = _out_path(args, args.weights_out)
    save_net(params, weights_path)
    trace_path = _out_path(args, "trace.csv")
    trace_to_csv(trace, trace_path)
    print(f"wrote {weights_path} and {trace_path} (final cost {trace.cost[-1]:.6g})")
    return 0


def cmd_diagnose(args) -> int:
    params = load_net(args.weights)
    xb = _load_inputs(args, params.d_in)
    payload = None
    if args.op == "r1":
        value = diag.r1_lower_bound(params, xb)
        payload = {"r1_lower_bound": value}
        print(json.dumps(payload, indent=2))
    elif args.op == "spectra":
        report = diag.layer_spectra(params, xb, threshold=args.threshold)
        out = args.out or _out_path(args, "spectra.csv")
        diag.spectra_to_csv(report, out)
        print(f"wrote {out}")
        return 0
    elif args.op == "lip":
        cert = diag.lip_curvature_gap(params, xb[:, 0], xb[:, -1], c_lip=args.c_lip)
        payload = cert.to_json()
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif args.op == "all":
        certs = diag.standard_certificates(params, xb, k=args.k, p=args.p, c=args.c)
        payload = [c.to_json() for c in certs]
        print(diag.certificates_to_json(certs))
    else:
        k = args.k if args.k is not None else diag.jacobian_rank(params, xb[:, 0])
        if args.op == "thm3":
            cert = diag.thm3_certificate(params, xb[:, 0], k=k, p=args.p)
        elif args.op == "thm4":
            cert = diag.thm4_certificate(params, xb[:, 0], k=k, c=args.c, p=args.p)
        elif args.op == "cor5":
            cert = diag.cor5_certificate(params, xb, k=k, c=args.c, p=args.p)
        else:
            cert = diag.prop6_certificate(params, xb[:, 0])
        payload = cert.to_json()
        print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out and payload is not None:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_sweep(args) -> int:
    if not args.config:
        raise BnlabError("sweep requires --config")
    cfg = ex.sweep_config_from_file(args.config, out_dir=args.out_dir or "sweep_out")
    if args.seed is not None:
        cfg = ex.replace(cfg, data_seed=args.seed)
    result = ex.run_depth_sweep(cfg)
    ok = sum(1 for r in result.runs if r.error is None)
    print(f"wrote {result.csv_path} ({ok}/{len(result.runs)} runs trained)")
    return 0


def cmd_symmetry(args) -> int:
    if not args.config:
        raise BnlabError("symmetry requires --config")
    cfg = ex.symmetry_config_from_file(args.config, out_dir=args.out_dir or "symmetry_out")
    if args.seed is not None:
        cfg = ex.replace(cfg, seed=args.seed, data_seed=args.seed)
    result = ex.run_symmetry(cfg)
    print(
        f"wrote {result.files.get('report')} "
        f"(orbit ratio {result.orbit_ratio:.3f}, "
        f"{result.layers_with_two_outliers}/{result.params.depth} two-outlier layers)"
    )
    return 0


_COMMANDS = {
    "repcost": cmd_repcost,
    "build": cmd_build,
    "train": cmd_train,
    "diagnose": cmd_diagnose,
    "sweep": cmd_sweep,
    "symmetry": cmd_symmetry,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (BnlabError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
