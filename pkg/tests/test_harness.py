import json

import numpy as np
import pytest

from njl_qet.errors import ConfigError
from njl_qet.harness import cli, sweep as sweep_mod
from njl_qet.harness.circuit import (export_circuit, parse_circuit, pipeline_final_state, replay,
                                     trotter_terms)
from njl_qet.harness.config import SweepSpec, parse_config, read_config_file
from njl_qet.harness.sweep import (CSV_COLUMNS, csv_text, grid, read_results, run_sweep,
                                   write_results)
from njl_qet.njl.lattice import LatticeParams
from njl_qet.protocol import ProtocolConfig, prepare_initial_state, run_protocol
from njl_qet.statevector import fidelity

SMALL = ["--sites", "4", "--steps", "40", "--dt", "0.01"]


@pytest.fixture(scope="module")
def small_spec():
    return parse_config(argv=SMALL)


@pytest.fixture(scope="module")
def small_prep(small_spec):
    return prepare_initial_state(small_spec.base)


def test_empty_config_is_production(tmp_path):
    f = tmp_path / "empty.cfg"
    f.write_text("# nothing\n\n")
    spec = parse_config(f)
    b = spec.base
    assert (b.lattice.sites, b.lattice.spacing, b.dt, b.steps) == (10, 1.0, 0.01, 600)
    assert (b.lattice.m_dyn, b.lattice.G, b.n0, b.mode) == (0.4, 0.3, 0, "exact")
    assert spec.lambda_a == (0.05, 0.0625, 0.075, 0.0875, 0.1)
    assert spec.lambda_b == (0.5, 2.0, 3.0)
    assert parse_config() == spec


def test_time_mismatch_rejected():
    with pytest.raises(ConfigError, match="t1 - t0"):
        parse_config(argv=["--steps", "600", "--dt", "0.01", "--t1", "5.0"])


def test_file_errors_name_line(tmp_path):
    f = tmp_path / "bad.cfg"
    f.write_text("sites = 4\nsteps = many\n")
    with pytest.raises(ConfigError, match=r"bad.cfg:2"):
        read_config_file(f)
    f.write_text("sites = 4\nflavour = up\n")
    with pytest.raises(ConfigError, match=r"bad.cfg:2: unknown key"):
        read_config_file(f)
    f.write_text("sites 4\n")
    with pytest.raises(ConfigError, match=r"bad.cfg:1"):
        read_config_file(f)


def test_flag_errors_name_flag():
    with pytest.raises(ConfigError, match="--force-mu"):
        parse_config(argv=["--force-mu", "2"])
    with pytest.raises(ConfigError, match="invalid lattice"):
        parse_config(argv=["--sites", "0"])


def test_flags_override_file(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("sites = 6\nlambda_a = 0.1, 0.2\nforce_mu = -1\nsplit = yes\n")
    spec = parse_config(argv=["--config", str(f), "--sites", "4", "--steps", "10"])
    assert spec.base.lattice.sites == 4
    assert spec.lambda_a == (0.1, 0.2)
    assert spec.base.forced_outcome == -1 and spec.split
    assert spec.base.t1 == pytest.approx(0.1)


def test_spec_invariants():
    with pytest.raises(ConfigError):
        SweepSpec(lambda_a=())
    with pytest.raises(ConfigError):
        SweepSpec(lambda_b=(float("nan"),))


def test_grid_order():
    spec = SweepSpec(lambda_a=(0.1, 0.05), lambda_b=(3.0, 0.5))
    assert grid(spec) == [(0.05, 3.0), (0.1, 3.0), (0.05, 0.5), (0.1, 0.5)]


def test_full_grid_count(small_spec, small_prep):
    points = run_sweep(small_spec, small_prep)
    assert len(points) == 15 and all(p.ok for p in points)
    assert [(p.lambda_a, p.lambda_b) for p in points] == grid(small_spec)


def test_single_point_equals_direct(small_spec, small_prep):
    spec = SweepSpec(lambda_a=(0.075,), lambda_b=(2.0,), base=small_spec.base)
    (pt,) = run_sweep(spec, small_prep)
    direct = run_protocol(small_spec.base.with_couplings(0.075, 2.0), small_prep)
    assert pt.report.to_dict() == direct.to_dict()


def test_csv_deterministic(small_spec, tmp_path):
    spec = SweepSpec(lambda_a=(0.05, 0.1), lambda_b=(0.5,), base=small_spec.base)
    texts = []
    for k in range(2):
        reports = [p.report for p in run_sweep(spec)]
        (path,) = write_results(reports, "csv", tmp_path / f"r{k}.csv")
        texts.append(path.read_bytes())
    assert texts[0] == texts[1]
    lines = texts[0].decode().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) == "lambda_a,lambda_b,delta_e_a,delta_e_b,delta_e_net,mu,p_mu"
    assert lines[1].startswith("0.050000000000000003,0.5,")
    rows = read_results(tmp_path / "r0.csv")
    assert rows[1]["delta_e_a"] == reports[1].dE_A


def test_json_roundtrip(small_spec, small_prep, tmp_path):
    spec = SweepSpec(lambda_a=(0.05,), lambda_b=(0.5, 2.0), base=small_spec.base)
    reports = [p.report for p in run_sweep(spec, small_prep)]
    (path,) = write_results(reports, "json", tmp_path / "out.json")
    assert read_results(path) == reports
    assert json.loads(path.read_text())[0]["lambda_b"] == 0.5


def test_empty_reports_write_nothing(tmp_path):
    with pytest.raises(ValueError):
        write_results([], "csv", tmp_path / "x.csv")
    assert not (tmp_path / "x.csv").exists()


def test_io_error_names_path(small_spec, small_prep, tmp_path):
    r = run_protocol(small_spec.base, small_prep)
    target = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError, match="missing"):
        write_results([r], "csv", target)


def test_split_files(small_spec, small_prep, tmp_path):
    spec = SweepSpec(lambda_a=(0.05, 0.1), lambda_b=(0.5, 2.0), base=small_spec.base)
    reports = [p.report for p in run_sweep(spec, small_prep)]
    paths = write_results(reports, "csv", tmp_path / "table.csv", split=True)
    assert [p.name for p in paths] == ["table_lb0.5.csv", "table_lb2.csv"]
    assert all(len(p.read_text().splitlines()) == 3 for p in paths)


def test_failed_point_recorded(small_spec, small_prep, monkeypatch):
    real = sweep_mod.run_protocol

    def flaky(cfg, *a, **kw):
        if cfg.lambda_b == 2.0 and cfg.lambda_a == 0.1:
            raise RuntimeError("boom")
        return real(cfg, *a, **kw)

    monkeypatch.setattr(sweep_mod, "run_protocol", flaky)
    spec = SweepSpec(lambda_a=(0.05, 0.1), lambda_b=(0.5, 2.0), base=small_spec.base)
    points = run_sweep(spec, small_prep)
    assert [p.ok for p in points] == [True, True, True, False]
    assert "boom" in points[-1].error


def test_csv_text_17_digits(small_spec, small_prep):
    r = run_protocol(small_spec.base, small_prep)
    fields = csv_text([r]).splitlines()[1].split(",")
    assert float(fields[2]) == r.dE_A and fields[5] == "1"


# ------------------------------------------------------------ circuit ---


def test_alice_block_lines(small_spec, small_prep):
    text = export_circuit(small_spec.base, small_prep.model).render().splitlines()
    i = text.index("// @alice")
    assert text[i + 1:i + 4] == ["cx q[4],q[0];", "rz(0.1) q[0];", "cx q[4],q[0];"]
    assert text[i + 4] == "measure q[4] -> c[0];"
    assert any(line.startswith("initialize q[0],q[1],q[2],q[3]") for line in text)


def test_zero_steps_no_evolution(small_spec, small_prep):
    s = export_circuit(small_spec.base, small_prep.model, steps=0)
    assert s.section("evolution begin", "evolution end") == []


def test_trotter_block_count(small_spec, small_prep):
    s = export_circuit(small_spec.base, small_prep.model)
    body = s.section("evolution begin", "evolution end")
    n_terms = len(trotter_terms(small_prep.model))
    assert n_terms == 3 + 4 + 4 + 3  # XX/YY bonds, Z mass, Z interaction
    assert sum(op.name == "rz" for op in body) == 40 * n_terms


def test_production_block_count():
    from njl_qet.njl.lattice import build_hamiltonian
    cfg = ProtocolConfig()
    m = build_hamiltonian(cfg.lattice, [0.4] * 10)
    s = export_circuit(cfg, m)
    body = s.section("evolution begin", "evolution end")
    assert sum(op.name == "rz" for op in body) == 600 * 38


def test_script_invariants(small_spec, small_prep):
    s = export_circuit(small_spec.base.with_couplings(0.05, 2.0), small_prep.model)
    names = [op.name for op in s.ops]
    first_cond = next(i for i, op in enumerate(s.ops) if op.condition is not None)
    assert names.index("measure") < first_cond
    assert all(q < s.num_qubits for op in s.ops for q in op.qubits)
    assert parse_circuit(s.render()).render() == s.render()
    with pytest.raises(IndexError):
        s.add("x", 6)


@pytest.mark.parametrize("rule", ["mu", "-mu", "-1"])
def test_round_trip_replay(small_spec, small_prep, rule):
    from dataclasses import replace
    cfg = replace(small_spec.base, lambda_a=0.2, lambda_b=1.5, bob_rule=rule)
    text = export_circuit(cfg, small_prep.model).render()
    replayed = replay(parse_circuit(text), small_prep.field_vacuum, forced_outcome=1)
    final, mu = pipeline_final_state(cfg, small_prep)
    assert mu == 1
    assert 1 - fidelity(replayed, final) < 1e-10


def test_replay_rejects_unknown_gate():
    s = parse_circuit("OPENQASM 2.0;\nqreg q[2];\ncreg c[1];\nccx q[0],q[1];\n")
    with pytest.raises(ValueError):
        from njl_qet.statevector import StateVector
        replay(s, StateVector.zero_state(1))


# ---------------------------------------------------------------- cli ---


def test_cli_success(tmp_path):
    out = tmp_path / "res.csv"
    circ = tmp_path / "c.qasm"
    rc = cli.main(SMALL + ["--lambda-a", "0.05", "--lambda-b", "0.5,2",
                           "--output", str(out), "--export-circuit", str(circ)])
    assert rc == 0
    assert len(out.read_text().splitlines()) == 3
    assert (tmp_path / "res.model.txt").read_text().startswith("# lattice NJL model")
    assert circ.read_text().startswith("OPENQASM 2.0;")


def test_cli_config_error(capsys):
    assert cli.main(["--steps", "-3"]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_cli_failed_point(tmp_path):
    # forcing an impossible outcome makes every point fail
    rc = cli.main(SMALL + ["--lambda-a", "0.05", "--lambda-b", "0.5", "--force-mu", "-1"])
    assert rc == 1


def test_cli_stdout_json(capsys):
    assert cli.main(SMALL + ["--lambda-a", "0.05", "--lambda-b", "0.5", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data[0]["mu"] == 1
