#!/usr/bin/env python3
"""Miniature symmetry-learning run (scaled down to finish in ~a minute).

The task: given the start vector of a rank-one-recovery gradient descent,
predict its loss over the next T steps. The dynamics are invariant under
rotations about the target axis, so the map factors through two summary
statistics; a trained deep net should collapse whole rotation orbits to
single hidden representations. The full-size configuration lives in
``SymmetryConfig()`` defaults.
"""

import tempfile

from bnlab import SymmetryConfig, run_symmetry

out_dir = tempfile.mkdtemp(prefix="bnlab_symmetry_")
cfg = SymmetryConfig(
    depth=6,
    width=24,
    d=10,
    horizon_t=6,
    n_samples=128,
    mid_steps=6000,
    polish_steps=1500,
    grid_size=15,
    n_paths=5,
    out_dir=out_dir,
)
result = run_symmetry(cfg)
print(f"final cost              {result.trace.cost[-1]:.5f}")
print(f"final squared norm      {result.trace.norm2[-1]:.2f}")
print(f"weight ranks by layer   {result.spectra.weight_ranks}")
print(f"bottleneck layer        {result.bottleneck_layer}")
print(f"orbit distance ratio    {result.orbit_ratio:.3f} (trained)")
print(f"orbit distance ratio    {result.control_ratio:.3f} (untrained control)")
print(f"CSVs written under      {out_dir}")
