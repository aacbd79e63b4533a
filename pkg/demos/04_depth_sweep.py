#!/usr/bin/env python3
"""Miniature norm-vs-depth sweep (a scaled-down run finishing in ~a minute).

Trains the same task at several depths with weight decay and reports the
final squared norm, the detected middle-layer rank, and the fit flag; the
full-size configuration lives in ``DepthSweepConfig()`` defaults.
"""

import tempfile

from bnlab import DepthSweepConfig, run_depth_sweep

out_dir = tempfile.mkdtemp(prefix="bnlab_sweep_")
cfg = DepthSweepConfig(
    depths=(3, 5, 7),
    seeds=(0,),
    n_samples=96,
    mid_steps_per_depth=450,
    polish_steps=1200,
    out_dir=out_dir,
)
result = run_depth_sweep(cfg)
print(f"{'depth':>6} {'cost':>9} {'norm^2':>9} {'rank':>5} {'fit':>4}")
for r in result.runs:
    print(f"{r.depth:>6} {r.cost:>9.4f} {r.norm2:>9.2f} {r.rank_mid:>5} {str(r.fit):>4}")
for f in result.ranges:
    print(
        f"rank-{f.rank} range over depths {f.depths}: slope {f.slope:.2f} "
        f"(residual sd {f.resid_std:.3f})"
    )
print(f"CSV and JSON written under {out_dir}")
