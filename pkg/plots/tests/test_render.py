import subprocess
import sys

import pytest

from bnplot import PlotSpec, SchemaError, render
from bnplot.cli import main as cli_main


@pytest.fixture
def sample_csvs(tmp_path):
    files = {}
    f = tmp_path / "sweep.csv"
    f.write_text(
        "depth,seed,norm2,rank_mid,fit\n"
        "3,0,10.5,4,1\n3,1,11.0,4,1\n4,0,14.2,3,1\n5,0,30.0,2,0\n"
    )
    files["norm_vs_depth"] = f
    f = tmp_path / "spectra.csv"
    f.write_text(
        "layer,index,sigma\n" + "".join(
            f"{l},{i},{1.0 / (l + i):.4f}\n" for l in range(1, 5) for i in range(1, 4)
        )
    )
    files["layer_spectra"] = f
    f = tmp_path / "pca.csv"
    f.write_text(
        "path_id,t,pc1,pc2\n" + "".join(
            f"{p},{t},{0.1 * t + p},{0.2 * t - p}\n" for p in range(3) for t in range(5)
        )
    )
    files["pca_paths"] = f
    f = tmp_path / "orbit.csv"
    f.write_text(
        "coord1,coord2,rep_dist,u_dist\n" + "".join(
            f"{a},{b},{abs(a * b) + 0.1},{abs(a + b)}\n"
            for a in (-1.0, 0.0, 1.0)
            for b in (-1.0, 0.0, 1.0)
        )
    )
    files["orbit_distance"] = f
    return files


@pytest.mark.parametrize(
    "kind", ["norm_vs_depth", "layer_spectra", "pca_paths", "orbit_distance"]
)
def test_render_each_kind(kind, sample_csvs, tmp_path):
    out = tmp_path / f"{kind}.png"
    path = render(PlotSpec(str(sample_csvs[kind]), kind, str(out)))
    assert out.exists()
    assert out.stat().st_size > 1000


def test_render_empty_csv_header_only(tmp_path):
    f = tmp_path / "empty.csv"
    f.write_text("depth,seed,norm2,rank_mid,fit\n")
    out = tmp_path / "empty.png"
    render(PlotSpec(str(f), "norm_vs_depth", str(out)))
    assert out.exists()


def test_schema_error_names_missing_column(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("depth,seed,norm2\n3,0,10.0\n")
    with pytest.raises(SchemaError, match="rank_mid"):
        render(PlotSpec(str(f), "norm_vs_depth", str(tmp_path / "x.png")))


def test_cli_success_and_schema_failure(sample_csvs, tmp_path, capsys):
    out = tmp_path / "vis.png"
    code = cli_main(
        ["--kind", "norm_vs_depth", "--in", str(sample_csvs["norm_vs_depth"]), "--out", str(out)]
    )
    assert code == 0
    assert out.exists()
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    code = cli_main(["--kind", "pca_paths", "--in", str(bad), "--out", str(tmp_path / "y.png")])
    assert code == 1


def test_renders_primary_emitted_csvs(tmp_path):
    """End-to-end: run a miniature primary sweep via its CLI, render its CSV."""
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(
        "[sweep]\ndepths = 3,4\nseeds = 0\nwidth = 6\n"
        "[data]\nn_samples = 16\n"
        "[train]\nwarmup_steps = 20\nramp_steps = 20\nmid_steps_per_depth = 10\n"
        "polish_steps = 20\nlog_every = 20\n"
    )
    run = subprocess.run(
        [sys.executable, "-m", "bnlab.cli", "sweep", "--config", str(cfg), "--out-dir", str(tmp_path / "out")],
        capture_output=True,
        text=True,
    )
    assert run.returncode == 0, run.stderr
    out = tmp_path / "fig1.png"
    render(PlotSpec(str(tmp_path / "out" / "sweep.csv"), "norm_vs_depth", str(out)))
    assert out.exists()
