"""CSV-to-figure rendering.

Four plot kinds, one per emitted CSV schema:

  * ``norm_vs_depth``  - ``depth,seed,norm2,rank_mid,fit``: final squared
    parameter norm against depth, colored by detected middle rank, drawn
    with a dot for fitted runs and a cross for unfitted ones;
  * ``layer_spectra``  - ``layer,index,sigma``: singular values per layer;
  * ``pca_paths``      - ``path_id,t,pc1,pc2``: hidden-representation
    principal components along inner-GD paths, one line per path;
  * ``orbit_distance`` - ``coord1,coord2,rep_dist,u_dist``: representation
    distance field on a plane orthogonal to the symmetry axis (heat map).

Rendering is a pure function of the CSV contents.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    """The CSV does not carry the columns the plot kind requires."""


_REQUIRED = {
    "norm_vs_depth": ["depth", "seed", "norm2", "rank_mid", "fit"],
    "layer_spectra": ["layer", "index", "sigma"],
    "pca_paths": ["path_id", "t", "pc1", "pc2"],
    "orbit_distance": ["coord1", "coord2", "rep_dist"],
}

PLOT_KINDS = tuple(_REQUIRED)


@dataclass
class PlotSpec:
    input_csv: str
    kind: str
    output: str


def _read_csv(path: str, required: list[str]) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise SchemaError(f"missing column {col!r} in {path}")
        rows = list(reader)
    out = {}
    for col in required:
        out[col] = np.array([float(r[col]) for r in rows]) if rows else np.array([])
    return out


def render(spec: PlotSpec) -> str:
    """Render the CSV to an image file; returns the output path."""
    if spec.kind not in _REQUIRED:
        raise SchemaError(f"unknown plot kind {spec.kind!r}")
    data = _read_csv(spec.input_csv, _REQUIRED[spec.kind])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    {
        "norm_vs_depth": _norm_vs_depth,
        "layer_spectra": _layer_spectra,
        "pca_paths": _pca_paths,
        "orbit_distance": _orbit_distance,
    }[spec.kind](ax, data, fig)
    fig.tight_layout()
    fig.savefig(spec.output, dpi=130)
    plt.close(fig)
    return spec.output


def _norm_vs_depth(ax, data, fig):
    ranks = data["rank_mid"].astype(int)
    if len(ranks):
        cmap = plt.get_cmap("viridis", max(int(ranks.max()) + 1, 2))
        for fitted, marker in ((True, "."), (False, "x")):
            mask = (data["fit"] > 0.5) == fitted
            if mask.any():
                ax.scatter(
                    data["depth"][mask],
                    data["norm2"][mask],
                    c=ranks[mask],
                    cmap=cmap,
                    vmin=0,
                    vmax=max(int(ranks.max()), 1),
                    marker=marker,
                    s=90 if fitted else 55,
                    label="fit (cost < threshold)" if fitted else "no fit",
                )
        sm = plt.cm.ScalarMappable(cmap=cmap)
        sm.set_clim(0, max(int(ranks.max()), 1))
        fig.colorbar(sm, ax=ax, label="middle-layer rank")
        ax.legend(loc="upper left", fontsize=8)
    ax.set_xlabel("depth")
    ax.set_ylabel("final squared parameter norm")
    ax.set_title("norm vs depth")


def _layer_spectra(ax, data, fig):
    if len(data["layer"]):
        for idx in np.unique(data["index"]):
            mask = data["index"] == idx
            order = np.argsort(data["layer"][mask])
            ax.plot(
                data["layer"][mask][order],
                data["sigma"][mask][order],
                marker="o",
                markersize=2.5,
                linewidth=0.8,
            )
        ax.axhline(0.1, color="gray", linestyle=":", linewidth=1)
        ax.set_yscale("log")
    ax.set_xlabel("layer")
    ax.set_ylabel("singular value")
    ax.set_title("weight spectra by layer")


def _pca_paths(ax, data, fig):
    for pid in np.unique(data["path_id"]):
        mask = data["path_id"] == pid
        order = np.argsort(data["t"][mask])
        ax.plot(data["pc1"][mask][order], data["pc2"][mask][order], marker=".", markersize=4)
        if mask.any():
            start = order[0]
            ax.scatter(
                data["pc1"][mask][start], data["pc2"][mask][start], marker="s", s=30, zorder=3
            )
    ax.set_xlabel("pc 1")
    ax.set_ylabel("pc 2")
    ax.set_title("hidden representation along inner-GD paths")


def _orbit_distance(ax, data, fig):
    c1, c2, d = data["coord1"], data["coord2"], data["rep_dist"]
    if len(c1):
        xs = np.unique(c1)
        ys = np.unique(c2)
        grid = np.full((len(ys), len(xs)), np.nan)
        xi = np.searchsorted(xs, c1)
        yi = np.searchsorted(ys, c2)
        grid[yi, xi] = d
        mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="magma")
        fig.colorbar(mesh, ax=ax, label="representation distance")
        ax.set_aspect("equal")
    ax.set_xlabel("coord 1")
    ax.set_ylabel("coord 2")
    ax.set_title("distance to reference point on the plane orthogonal to the axis")
