import json
import os
import subprocess
import sys

import numpy as np
import pytest

from meanlab import batteries
from meanlab.cli import main


def write(path, obj):
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def test_sum_cesaro_passes_and_prints_json(capsys):
    assert main(["sum", "--kind", "geometric", "--a", "-1", "--expect", "0.5",
                 "--expect-tol", "1e-3"]) == 0
    out = json.loads(capsys.readouterr().out)
    re, im = out["values"]["estimate"]
    assert abs(complex(re, im) - 0.5) < 1e-3
    assert out["values"]["divergent"] is False


def test_failed_check_gives_status_1():
    assert main(["sum", "--kind", "geometric", "--a", "-1", "--expect", "0.7", "--quiet"]) == 1


def test_usage_errors_give_status_2(tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["sum", "--method", "nope"])
    assert e.value.code == 2
    assert main(["battery", "run", "no-such-battery", "--quiet"]) == 2
    assert main(["sum", "--kind", "geometric", "--a", "2", "--method", "abel", "--quiet"]) == 2
    cfg = write(tmp_path / "c.json", {"bogus_field": 1})
    assert main(["sum", "--config", cfg, "--quiet"]) == 2
    cfg = write(tmp_path / "b.json", {"battery": "maximal-weak-type", "params": {"trials": "x"}})
    assert main(["battery", "run", "--config", cfg, "--quiet"]) == 2


def test_io_errors_give_status_3(tmp_path):
    assert main(["maximal", "--input", str(tmp_path / "missing.csv"), "--quiet"]) == 3
    bad = write(tmp_path / "bad.csv", "j,re,im\n0,abc,0\n")
    assert main(["maximal", "--input", bad, "--quiet"]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["sum", "--kind", "geometric", "--a", "-1", "--out", str(blocker / "sub"),
                 "--quiet"]) == 3


def test_battery_list(capsys):
    assert main(["battery", "list"]) == 0
    names = [l.split("\t")[0] for l in capsys.readouterr().out.splitlines()]
    assert names == sorted(batteries.BATTERIES)
    assert main(["battery", "list", "maximal"]) == 0
    names = [l.split("\t")[0] for l in capsys.readouterr().out.splitlines()]
    assert names and all(n.startswith("maximal") for n in names)
    assert main(["battery", "list", "zzz"]) == 0
    assert capsys.readouterr().out == ""


def test_cesaro_geometric_alias_estimate(tmp_path):
    cfg = write(tmp_path / "c.json", {"battery": "cesaro-geometric",
                                      "params": {"a": [-1], "n": 10000}})
    out = tmp_path / "out"
    assert main(["battery", "run", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    rep = json.loads((out / "series-cesaro-geometric.json").read_text())
    (key, val), = [(k, v) for k, v in rep["values"].items() if k.startswith("estimate")]
    est = complex(*val)
    assert abs(est - 0.5) <= 4 / 10001 / 4


def test_weak_type_battery_small(tmp_path):
    cfg = write(tmp_path / "c.json", {"battery": "weak-type",
                                      "params": {"trials": 40, "transference_n": [1, 3]}})
    out = tmp_path / "o"
    assert main(["battery", "run", "--config", cfg, "--out", str(out), "--csv", "--quiet"]) == 0
    rep = json.loads((out / "maximal-weak-type.json").read_text())
    assert rep["values"]["worst_ratio"] <= 2
    assert (out / "maximal-weak-type.levels.csv").exists()
    meta = json.loads((out / "maximal-weak-type.meta.json").read_text())
    assert "wall_clock_s" in meta and "wall_clock_s" not in json.dumps(rep)


def test_report_json_byte_identical(tmp_path):
    csv = "\n".join(f"{j},{v},0" for j, v in enumerate([0.5, 2, 0, 1, 3]))
    inp = write(tmp_path / "f.csv", "j,re,im\n" + csv + "\n")
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["maximal", "--input", inp, "--out", str(d), "--csv", "--seed", "7",
                     "--quiet"]) == 0
        outs.append((d / "maximal.json").read_bytes())
        assert (d / "maximal.profile.csv").exists()
    assert outs[0] == outs[1]


def test_subcommands_run(tmp_path):
    m = write(tmp_path / "m.json", [[[0, 0], [-1, 0]], [[1, 0], [0, 0]]])
    assert main(["spectral", "--matrix", m, "--task", "average", "--n-max", "64",
                 "--quiet"]) == 0
    assert main(["spectral", "--matrix", m, "--task", "radius", "--quiet"]) == 0
    half = write(tmp_path / "h.json", [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]])
    assert main(["spectral", "--matrix", half, "--task", "neumann", "--quiet"]) == 0
    theta = 2 * np.pi * np.arange(64) / 64
    f = write(tmp_path / "s.csv", "theta,re,im\n" + "".join(
        f"{float(t)!r},{float(abs(np.sin(t)))!r},0\n" for t in theta))
    assert main(["fourier", "--input", f, "--params", "4,16", "--quiet"]) == 0
    s = write(tmp_path / "sys.json", {"permutation": [1, 2, 0, 4, 3]})
    for task in ("birkhoff", "transference", "krylov-bogolyubov"):
        assert main(["ergodic", "--system", s, "--task", task, "--n", "6", "--quiet"]) == 0
    b = write(tmp_path / "bern.json", {"alphabet": 2, "weights": [0.5, 0.5], "depth": 12})
    assert main(["ergodic", "--system", b, "--task", "transference", "--n", "3",
                 "--quiet"]) == 0
    sp = write(tmp_path / "sp.json", {"alphabet": 2, "rho": 0.5, "depth": 10})
    for task in ("dimension", "trichotomy", "doubling", "snowflake"):
        assert main(["metric", "--space", sp, "--task", task, "--trials", "200",
                     "--quiet"]) == 0


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "meanlab", "battery", "list", "metric"],
                         capture_output=True, text=True, env=dict(os.environ))
    assert out.returncode == 0 and "metric-dimension" in out.stdout
