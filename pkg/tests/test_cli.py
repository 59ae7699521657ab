import csv
import io
import json
import math

import numpy as np
import pytest

from bayesphase.cli import main
from bayesphase.core import build_r10, optimal_cost
from bayesphase.optimizer import OptimizerConfig
from bayesphase.prior import diffusive_prior
from bayesphase.states import noon
from bayesphase.sweep import CSV_HEADER, parse_t_grid, run_sweep, sweep_point, write_sweep_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_optimal_bw_uniform(capsys):
    code, out, _ = run(capsys, "optimal", "--state", "bw", "--n", "10", "--prior", "uniform")
    assert code == 0
    data = json.loads(out)
    assert data["cost"] == pytest.approx(0.0681483, abs=1e-6)
    assert {"cost", "fidelity", "posterior_uncertainty", "phases", "basis"} <= set(data)


def test_optimal_noon_local(capsys):
    code, out, _ = run(capsys, "optimal", "--state", "noon", "--n", "3", "--prior", "diffusive", "--t", "0.02")
    assert code == 0
    data = json.loads(out)
    assert data["cost"] < 0.05
    basis = np.array([[complex(*z) for z in vec] for vec in data["basis"]])  # one row per outcome
    weight = np.abs(basis @ noon(3).amplitudes.conj()) ** 2
    assert np.sum(weight > 1e-10) == 2


def test_zero_state_file_is_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"type": "amplitudes", "values": [[0, 0], [0, 0]]}))
    code, out, err = run(capsys, "optimal", "--state", f"file:{bad}")
    assert code == 2 and out == "" and "zero vector" in err


@pytest.mark.parametrize("argv", [
    ["optimal", "--state", "bw", "--n", "3"],  # diffusive prior without --t
    ["optimal", "--state", "sqz", "--n", "3", "--prior", "uniform"],
    ["optimal", "--state", "bw", "--prior", "uniform"],
    ["optimal", "--state", "bw", "--n", "3", "--prior", "gauss"],
    ["optimal", "--state", "bw", "--n", "3", "--t", "-1"],
    ["sweep", "--n", "3", "--t-grid", "1:0.1:log:5"],
    ["sweep", "--n", "3", "--t-grid", "0.1:1:log:5", "--states", "noon,squeezed"],
    ["optimize", "--prior", "uniform"],
    ["optimize", "--n", "3", "--prior", "uniform", "--restarts", "0"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("bayesphase: error:")


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["optimal", "--n", "three"])
    assert exc.value.code == 2


def test_file_inputs(capsys, tmp_path):
    prior_file = tmp_path / "prior.json"
    prior_file.write_text(json.dumps({"type": "diffusive", "t": 0.2}))
    state_file = tmp_path / "rho.json"
    state_file.write_text(json.dumps({"type": "density", "matrix": [[[0.5, 0], [0.2, 0]], [[0.2, 0], [0.5, 0]]]}))
    code, out, _ = run(capsys, "optimal", "--state", f"file:{state_file}", "--prior", f"fourier-file:{prior_file}")
    assert code == 0
    data = json.loads(out)
    assert data["n"] == 1 and data["prior"] == {"type": "diffusive", "t": 0.2, "tol": 1e-14}
    code, _, _ = run(capsys, "optimal", "--state", f"file:{state_file}", "--n", "2", "--prior", "uniform")
    assert code == 2


def test_optimize_command(capsys, tmp_path):
    out_path = tmp_path / "opt.json"
    code, out, _ = run(capsys, "optimize", "--n", "3", "--t", "0.02", "--out", str(out_path))
    assert code == 0 and out == ""
    data = json.loads(out_path.read_text())
    amps = np.array([complex(*z) for z in data["state"]["values"]])
    assert abs(amps[0]) ** 2 + abs(amps[3]) ** 2 >= 0.99
    assert data["converged"] and np.all(np.diff(data["fidelity_trace"]) >= -1e-13)


def test_parse_t_grid():
    assert np.allclose(parse_t_grid("0.001:30:log:40"), np.geomspace(1e-3, 30, 40))
    assert np.allclose(parse_t_grid("1:2:lin:3"), [1, 1.5, 2])
    assert parse_t_grid("0.5:0.5:lin:1").tolist() == [0.5]
    for bad in ("1:2:log", "2:1:lin:3", "0:1:log:4", "1:2:cubic:3", "1:2:lin:0", "1:2:lin:1"):
        with pytest.raises(ValueError):
            parse_t_grid(bad)


def test_sweep_csv_via_cli_matches_library(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    argv = ["sweep", "--n", "4", "--t-grid", "0.01:10:log:6", "--states", "noon,bw,binomial,optimal",
            "--jobs", "1", "--out", str(out_path)]
    assert run(capsys, *argv)[0] == 0
    text = out_path.read_bytes()
    assert b"\r" not in text
    rows = list(csv.reader(io.StringIO(text.decode())))
    assert rows[0] == CSV_HEADER == ["t", "delta_phi_prior", "state", "cost", "delta_phi", "ratio"]
    assert len(rows) == 1 + 6 * 4

    buf = io.StringIO()
    write_sweep_csv(buf, run_sweep(4, parse_t_grid("0.01:10:log:6"), ["noon", "bw", "binomial", "optimal"],
                                   OptimizerConfig()))
    assert buf.getvalue().encode() == text

    # parallel workers must not change the bytes
    par = tmp_path / "par.csv"
    assert run(capsys, *argv[:-2], "--jobs", "3", "--out", str(par))[0] == 0
    assert par.read_bytes() == text


def test_sweep_record_invariants():
    for t in (0.003, 0.1, 2.0):
        rows = sweep_point(t, 5, ["noon", "bw", "binomial", "flat", "optimal"], OptimizerConfig())
        for r in rows:
            assert abs(r.delta_phi - math.sqrt(r.cost)) < 1e-14
            assert 0 <= r.ratio <= 1 + 1e-12  # noon at large t learns nothing: ratio is 1 up to rounding
            assert r.delta_phi_prior == pytest.approx(math.sqrt(2 - 2 * math.exp(-t)), abs=1e-15)
        opt = rows[-1].cost
        assert all(opt <= r.cost + 1e-10 for r in rows)
        assert rows[0].cost == optimal_cost(build_r10(noon(5), diffusive_prior(t, min_order=6)))


def test_bw_best_fixed_state_in_global_regime():
    rows = sweep_point(30.0, 10, ["noon", "bw", "binomial", "flat"], OptimizerConfig())
    assert min(rows, key=lambda r: r.ratio).state == "bw"


def test_profile_outputs(capsys, tmp_path):
    out_path = tmp_path / "prof.csv"
    code, _, _ = run(capsys, "profile", "--n", "3", "--t", "20", "--state", "optimal", "--points", "90",
                     "--out", str(out_path))
    assert code == 0
    rows = list(csv.reader(out_path.open()))
    assert rows[0] == ["phi", "p0", "p1", "p2", "p3"]
    table = np.array(rows[1:], dtype=float)
    assert table.shape == (90, 5)
    assert np.abs(table[:, 1:].sum(axis=1) - 1).max() < 1e-11  # 12 printed digits per entry
    meta = json.loads(out_path.with_suffix(".json").read_text())
    assert len(meta["phases"]) == 4 and len(meta["amplitudes"]) == 4
    gaps = np.diff(meta["phases"])
    assert np.abs(gaps - np.pi / 2).max() < 1e-6


def test_profile_rejects_mixed_state(capsys, tmp_path):
    state_file = tmp_path / "rho.json"
    state_file.write_text(json.dumps({"type": "density", "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}))
    assert run(capsys, "profile", "--state", f"file:{state_file}", "--prior", "uniform")[0] == 2


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4 and all(line.startswith("PASS") for line in lines)
