import hashlib
import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
PLOTS = HERE.parent
FIXTURES = PLOTS / "fixtures"
GOLDEN = json.loads((HERE / "golden_hashes.json").read_text())

sys.path.insert(0, str(PLOTS))
import render  # noqa: E402


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def render_all(out_dir: Path) -> dict[str, str]:
    written = render.render_directory(FIXTURES, out_dir, "svg",
                                      n_dim=2, gamma=Fraction(0))
    return {p.name: sha256(p) for p in written}


def test_renders_deterministically(tmp_path):
    first = render_all(tmp_path / "a")
    second = render_all(tmp_path / "b")
    assert first == second


def test_golden_hashes(tmp_path):
    got = render_all(tmp_path / "out")
    assert got == GOLDEN


def test_expected_figure_set(tmp_path):
    got = render_all(tmp_path / "out")
    assert set(got) == {
        "traces_norm_a.svg", "traces_norm_rp.svg", "traces_overlay.svg",
        "picard.svg", "defect.svg", "region.svg",
    }


def test_empty_csv_rejected(tmp_path):
    bad = tmp_path / "in"
    bad.mkdir()
    (bad / "traces.csv").write_text("t,norm_a,norm_rp\n")
    with pytest.raises(ValueError, match="0 data rows"):
        render.plot_traces(bad / "traces.csv", tmp_path, "svg")


def test_cli_exit_codes(tmp_path):
    empty_dir = tmp_path / "empty"
    empty_dir.mkdir()
    rc = render.main(["--in", str(empty_dir), "--out", str(tmp_path / "o")])
    assert rc == 1
    rc = render.main(["--in", str(FIXTURES), "--out", str(tmp_path / "ok"),
                      "--N", "2", "--gamma", "0"])
    assert rc == 0


def test_cli_subprocess_smoke(tmp_path):
    proc = subprocess.run(
        [sys.executable, str(PLOTS / "render.py"), "--in", str(FIXTURES),
         "--out", str(tmp_path / "sub"), "--format", "png"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "sub" / "picard.png").is_file()


def test_png_deterministic(tmp_path):
    a = render.render_directory(FIXTURES, tmp_path / "p1", "png")
    b = render.render_directory(FIXTURES, tmp_path / "p2", "png")
    assert {p.name: sha256(p) for p in a} == {p.name: sha256(p) for p in b}
