import csv
import io
import json
import math
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

jsonschema = pytest.importorskip("jsonschema")

from geomeas.cli import SweepSpec, main, parse_number, run_sweep
from geomeas.states import random_state, state_to_json


def schema(name):
    return json.loads(resources.files("geomeas").joinpath("schemas", name).read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_examples(capsys):
    for literal, expect in [("W", 4 / 9), ("GHZ", 0.5), ("wtype(0.5,0.5,0.7071067811865476)", 0.5)]:
        code, out, _ = run(capsys, "compute", literal)
        assert code == 0
        doc = json.loads(out)
        assert doc["lambda_sq"] == pytest.approx(expect, abs=1e-12)
        jsonschema.validate(doc, schema("measure_result.schema.json"))


def test_compute_all_policies_validate(capsys, tmp_path, rng):
    path = tmp_path / "state.json"
    path.write_text(state_to_json(random_state(rng)))
    jsonschema.validate(json.loads(path.read_text()), schema("state.schema.json"))
    for policy in ("auto", "stationary", "oracle"):
        code, out, _ = run(capsys, "compute", str(path), "--policy", policy)
        assert code == 0
        jsonschema.validate(json.loads(out), schema("measure_result.schema.json"))


def test_compute_table_and_out(capsys, tmp_path):
    out_path = tmp_path / "res.json"
    code, out, _ = run(capsys, "compute", "W", "--out", str(out_path))
    assert code == 0 and out == ""
    assert json.loads(out_path.read_text())["method"] == "analytic_wtype"
    code, out, _ = run(capsys, "compute", "GHZ", "--format", "table")
    assert code == 0 and "analytic_symmetric" in out


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "compute", str(bad))[0] == 2
    assert run(capsys, "compute", "bell")[0] == 2
    assert run(capsys, "compute", "wtype(0,0,0)")[0] == 3
    assert run(capsys, "compute", "wtype(1,1,1)", "--strict")[0] == 3

    unnorm = tmp_path / "unnorm.json"
    unnorm.write_text(json.dumps({"amps": [[2, 0]] + [[0, 0]] * 7}))
    assert run(capsys, "compute", str(unnorm))[0] == 0
    assert run(capsys, "compute", str(unnorm), "--strict")[0] == 3

    assert run(capsys, "sweep", "ww", "--param", "theta=0:1:1")[0] == 2
    assert run(capsys, "sweep", "wtype", "--param", "a=-1:1:3")[0] == 2
    assert run(capsys, "sweep", "ww", "--param", "phi=0:1:3")[0] == 2
    assert run(capsys, "sweep", "ww", "--samples", "0")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_check_examples(capsys, tmp_path, rng):
    for literal in ("W", "GHZ"):
        code, out, _ = run(capsys, "check", literal)
        doc = json.loads(out)
        assert code == 0 and doc["pass"]
        jsonschema.validate(doc, schema("check_report.schema.json"))
    assert max(json.loads(run(capsys, "check", "W")[1])["deltas"].values()) < 1e-9

    path = tmp_path / "r.json"
    path.write_text(state_to_json(random_state(rng)))
    code, out, _ = run(capsys, "check", str(path))
    doc = json.loads(out)
    assert code == 0 and "analytic" not in doc["values"]
    assert doc["deltas"]["stationary-oracle"] < 1e-6


def _csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_ww_endpoints(capsys):
    code, out, _ = run(capsys, "sweep", "ww", "--param", "theta=0:pi/2:5")
    rows = _csv_rows(out)
    assert code == 0 and len(rows) == 5
    assert float(rows[0]["lambda_sq"]) == pytest.approx(4 / 9, abs=1e-12)
    assert float(rows[-1]["lambda_sq"]) == pytest.approx(4 / 9, abs=1e-12)


def test_sweep_symmetric_generalized_ghz(capsys):
    # a^2 in [0.5, 1] with b fixed by normalization
    code, out, _ = run(
        capsys, "sweep", "symmetric", "--param", "a=1", "--param", "b=0:1:11", "--param", "c=0", "--param", "d=0"
    )
    assert code == 0
    for row in _csv_rows(out):
        assert float(row["lambda_sq"]) == pytest.approx(float(row["a"]) ** 2, abs=1e-12)


def test_sweep_wtype_minimum_at_w(capsys):
    code, out, _ = run(capsys, "sweep", "wtype", "--param", "a=1", "--param", "b=1", "--param", "c=0:2:201")
    rows = _csv_rows(out)
    lam = np.array([float(r["lambda_sq"]) for r in rows])
    k = int(np.argmin(lam))
    assert lam[k] == pytest.approx(4 / 9, abs=1e-12)
    assert float(rows[k]["c"]) == pytest.approx(1 / math.sqrt(3), abs=1e-12)


def test_sweep_json_schema(capsys):
    code, out, _ = run(capsys, "sweep", "ww", "--param", "theta=0:pi:7", "--format", "json")
    assert code == 0
    jsonschema.validate(json.loads(out), schema("sweep.schema.json"))


def test_sweep_random_samples_deterministic():
    spec = SweepSpec("symmetric", samples=5, seed=11)
    assert spec.points() == SweepSpec("symmetric", samples=5, seed=11).points()
    assert spec.points() != SweepSpec("symmetric", samples=5, seed=12).points()
    header, rows = run_sweep(spec)
    assert len(rows) == 5 and header[-4:] == ["lambda_sq", "e_g", "method", "degenerate"]


def test_sweep_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"s{k}.csv"
        subprocess.run(
            [sys.executable, "-m", "geomeas", "sweep", "wtype", "--samples", "20", "--seed", "99", "--out", str(path)],
            check=True,
        )
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_parse_number():
    assert parse_number("pi/2") == math.pi / 2
    assert parse_number("-1e-3") == -1e-3
    assert parse_number("2*pi") == 2 * math.pi
    for bad in ("__import__('os')", "1/0", "pi**2", "x"):
        with pytest.raises(ValueError):
            parse_number(bad)


def test_sweep_parallel_matches_serial():
    serial = run_sweep(SweepSpec("wtype", samples=24, seed=5))
    parallel = run_sweep(SweepSpec("wtype", samples=24, seed=5, jobs=3))
    assert serial == parallel
