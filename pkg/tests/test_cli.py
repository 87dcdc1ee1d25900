import json
import math

import numpy as np
import pytest

from platekit import cli, geometry, navier, shapeopt
from platekit.errors import NoSignChangeError

from conftest import assert_close


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# platekit ")
    columns = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return columns, rows


def test_ball_spectrum_values(tmp_path):
    out = tmp_path / "bs.csv"
    rc = cli.main(["ball-spectrum", "--alpha", "0", "--count", "5",
                   "--out", str(out)])
    assert rc == 0
    columns, rows = read_csv(out)
    assert columns == ["index", "lambda", "k", "multiplicity", "regime",
                       "residual"]
    assert len(rows) == 3  # count 5 resolves to 1 + 2 + 2
    assert_close(float(rows[0][1]), 104.36310555877536, 1e-10, "lambda_1")
    assert [r[3] for r in rows] == ["1", "2", "2"]
    man = json.loads((tmp_path / "bs.csv.manifest.json").read_text())
    assert man["command"] == "ball-spectrum"
    assert man["parameters"]["count"] == 5
    assert {"seed", "tool_version", "timestamp"} <= set(man)


def test_ball_spectrum_header_only(tmp_path):
    out = tmp_path / "empty.csv"
    assert cli.main(["ball-spectrum", "--count", "0",
                     "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 2


def test_csv_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        cli.main(["ball-spectrum", "--alpha", "30", "--count", "6",
                  "--out", str(out)])
    assert a.read_bytes().replace(b"a.csv", b"") \
        == b.read_bytes().replace(b"b.csv", b"")


def test_branches_shifted_column(tmp_path):
    out = tmp_path / "br.csv"
    svg = tmp_path / "br.svg"
    rc = cli.main(["branches", "--alpha-range", "0:100:3", "--count", "4",
                   "--out", str(out), "--svg", str(svg)])
    assert rc == 0
    columns, rows = read_csv(out)
    assert columns == ["alpha", "k_index", "lambda", "shifted_lambda"]
    for row in rows:
        alpha, lam, shifted = (float(row[0]), float(row[2]), float(row[3]))
        assert abs(shifted - (lam + 0.25 * alpha * alpha)) \
            <= 1e-9 * max(1.0, abs(lam))
    assert svg.read_text().startswith("<svg")


def test_navier_tangency_rows(tmp_path):
    out = tmp_path / "nav.csv"
    rc = cli.main(["navier", "--radius", "1.0", "--alpha-range", "0:60:4",
                   "--count", "40", "--out", str(out)])
    assert rc == 0
    columns, rows = read_csv(out)
    assert columns == ["kind", "alpha", "lambda", "active_k"]
    tang = [r for r in rows if r[0] == "tangency"]
    assert tang, "no tangency rows in range"
    gammas = navier.dirichlet_disk_spectrum(1.0, 40).gammas
    for row in tang:
        alpha, lam = float(row[1]), float(row[2])
        g = 0.5 * alpha
        assert np.min(np.abs(gammas - g)) <= 1e-9 * g
        assert_close(lam, -g * g, 1e-12, "tangency lambda")
    kinds = {r[0] for r in rows}
    assert "grid" in kinds and "breakpoint" in kinds


def test_mfs_solve_disk(tmp_path):
    out = tmp_path / "mfs.csv"
    rc = cli.main(["mfs-solve", "--shape", "disk:1", "--alpha", "0",
                   "--window", "100:110", "--m", "120", "--count", "1",
                   "--out", str(out)])
    assert rc == 0
    columns, rows = read_csv(out)
    assert columns == ["index", "lambda", "sigma1", "sigma2",
                       "multiplicity", "boundary_residual"]
    assert len(rows) == 1
    assert_close(float(rows[0][1]), 104.36310555877536, 1e-5, "lambda_1")
    assert float(rows[0][2]) <= 1e-5
    assert rows[0][4] == "1"
    assert float(rows[0][5]) <= 1e-5


def test_mfs_solve_empty_window(tmp_path):
    out = tmp_path / "none.csv"
    rc = cli.main(["mfs-solve", "--shape", "disk:1", "--alpha", "0",
                   "--window", "150:300", "--m", "64", "--out", str(out)])
    assert rc == 0
    assert len(out.read_text().splitlines()) == 2


def test_mfs_solve_trace(tmp_path):
    out = tmp_path / "mfs.csv"
    trace = tmp_path / "trace.csv"
    rc = cli.main(["mfs-solve", "--shape", "disk:1", "--alpha", "0",
                   "--window", "100:110", "--m", "64", "--count", "1",
                   "--trace", str(trace), "--out", str(out)])
    assert rc == 0
    columns, rows = read_csv(trace)
    assert columns == ["lambda", "sigma1"]
    assert len(rows) > 100
    sig = np.array([float(r[1]) for r in rows])
    assert sig.min() < 1e-3 and sig.max() <= 1.0 + 1e-12


def test_optimize_artifacts_and_determinism(tmp_path):
    seed_file = tmp_path / "seed.txt"
    geometry.save_shape(
        geometry.perturbed_circle(1.0 / math.sqrt(math.pi), 2, 0.05, 4),
        str(seed_file))
    outputs = []
    for tag in ("r1", "r2"):
        prefix = tmp_path / tag
        rc = cli.main(["optimize", "--alpha", "0", "--seeds",
                       str(seed_file), "--P", "4", "--m", "64", "--iters",
                       "2", "--polish-m", "0", "--out", str(prefix)])
        assert rc == 0
        columns, rows = read_csv(tmp_path / f"{tag}.traj.csv")
        assert columns == ["seed", "phase", "iteration", "lambda1",
                           "gradient_norm", "area", "sigma1",
                           "multiplicity", "stalled"]
        assert all(abs(float(r[5]) - 1.0) <= 1e-9 for r in rows)
        assert all(r[1] == "descent" for r in rows)  # polish-m 0 skips it
        shape_file = tmp_path / f"{tag}.shape.txt"
        assert shape_file.exists()
        assert (tmp_path / f"{tag}.svg").read_text().startswith("<svg")
        outputs.append(((tmp_path / f"{tag}.traj.csv").read_bytes(),
                        shape_file.read_bytes()))
    assert outputs[0][0].replace(b"r1", b"") \
        == outputs[1][0].replace(b"r2", b"")
    assert outputs[0][1] == outputs[1][1]
    back = geometry.load_shape(str(tmp_path / "r1.shape.txt"))
    assert abs(geometry.area(back) - 1.0) <= 1e-9


def test_critical_alpha_echo_mode(tmp_path):
    out = tmp_path / "ca.csv"
    rc = cli.main(["critical-alpha", "--lo", "50", "--hi", "50", "--m",
                   "64", "--P", "4", "--iters", "3", "--out", str(out)])
    assert rc == 0
    columns, rows = read_csv(out)
    assert columns == ["kind", "alpha", "lambda_disk", "lambda_best",
                       "beats"]
    probe = [r for r in rows if r[0] == "probe"]
    assert len(probe) == 1 and probe[0][4] == "0"  # disk wins at alpha=50
    assert rows[-1][0] == "result"


def test_critical_alpha_no_sign_change_exit_code(tmp_path, monkeypatch):
    def boom(*a, **kw):
        raise NoSignChangeError("no crossing")

    monkeypatch.setattr(shapeopt, "critical_alpha", boom)
    rc = cli.main(["critical-alpha", "--lo", "10", "--hi", "20",
                   "--out", str(tmp_path / "x.csv")])
    assert rc == 4


def test_missing_shape_file_exit_code(tmp_path):
    rc = cli.main(["mfs-solve", "--shape", str(tmp_path / "nope.txt"),
                   "--window", "100:110", "--out",
                   str(tmp_path / "o.csv")])
    assert rc == 3


def test_usage_error_exit_code(tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["mfs-solve", "--window", "abc",
                  "--out", str(tmp_path / "o.csv")])
    assert exc.value.code == 2
