import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from blockcert.bundle import dump_json, network_to_dict, save_system
from blockcert.catalog import five_state_system, two_block_system, witness_matrices
from blockcert.certify import certify_hinf
from blockcert.cli import main
from blockcert.linalg import hinf_norm
from blockcert.network import NetworkModel
from blockcert.partition import PartitionedSystem


@pytest.fixture
def bundles(tmp_path):
    paths = {}
    save_system(two_block_system(1, 1), tmp_path / "two_block.json")
    paths["two_block"] = tmp_path / "two_block.json"
    save_system(five_state_system(), tmp_path / "five.json")
    paths["five"] = tmp_path / "five.json"
    A = np.diag([-1.0, 1.0, -1.0])
    save_system(PartitionedSystem(A, np.ones((3, 1)), np.ones((1, 3)), state_partition=(1, 1, 1)),
                tmp_path / "nonhurwitz.json")
    paths["nonhurwitz"] = tmp_path / "nonhurwitz.json"
    save_system(PartitionedSystem([[-1.0, 2.0], [2.0, -1.0]], [[1.0], [1.0]], [[1.0, 1.0]],
                                  state_partition=(1, 1)), tmp_path / "loop.json")
    paths["loop"] = tmp_path / "loop.json"
    save_system(PartitionedSystem(witness_matrices()["IV"], state_partition=(2, 2, 2)), tmp_path / "w4.json")
    paths["w4"] = tmp_path / "w4.json"
    lag = (np.array([[-1.0]]), np.array([[1.0]]), np.array([[1.0]]))
    for name, gain in (("ring", 0.5), ("ring_unstable", 1.0)):
        net = NetworkModel((lag, lag), np.array([[0, gain], [gain, 0]]), np.eye(2), np.eye(2), (1, 1), (1, 1))
        (tmp_path / f"{name}.json").write_text(dump_json(network_to_dict(net)))
        paths[name] = tmp_path / f"{name}.json"
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_certify_json(capsys, bundles):
    code, out, _ = run(capsys, "certify", bundles["two_block"])
    doc = json.loads(out)
    assert code == 0
    assert doc["verdict"] == "certified" and doc["format"] == "blockcert/1"
    assert doc["residuals"]["lyapunov"] < 0 and doc["residuals"]["riccati"] < 0
    assert set(doc["scaling"]) >= {"d", "e", "g", "f"}
    assert {"comparison", "lp", "riccati", "verify", "total"} <= set(doc["timings"])
    s = two_block_system(1, 1)
    cert = certify_hinf(s)
    assert doc["comparison_norm"] == cert.comparison_norm
    assert doc["ratio"] == pytest.approx(cert.comparison_norm / hinf_norm(s.A, s.B, s.C), rel=1e-8)
    assert len(doc["blocks"]) == 2 and np.array(doc["blocks"][1]).shape == (3, 3)


def test_certify_text_and_delta(capsys, bundles):
    code, out, _ = run(capsys, "certify", bundles["five"], "--text", "--delta", "10")
    assert code == 0
    assert "verdict: certified" in out and "delta: 10" in out


def test_certify_non_hurwitz_block(capsys, bundles):
    code, out, err = run(capsys, "certify", bundles["nonhurwitz"])
    assert code == 1
    assert json.loads(out)["block"] == 2
    assert "block 2" in err


def test_certify_inconclusive(capsys, bundles):
    code, out, _ = run(capsys, "certify", bundles["loop"])
    assert code == 2
    assert json.loads(out)["verdict"] == "inconclusive"


def test_certify_malformed(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"A": [[1, 2], [3]]}')
    code, _, err = run(capsys, "certify", p)
    assert code == 1 and "row 1" in err


@pytest.mark.parametrize("variant", ["M", "Mtilde", "N"])
def test_compare(capsys, bundles, variant):
    code, out, _ = run(capsys, "compare", bundles["two_block"], "--variant", variant)
    doc = json.loads(out)
    assert code == 0 and doc["hurwitz"]
    assert np.array(doc["matrix"]).shape == (2, 2)


def test_compare_unstable_exit_code(capsys, bundles):
    code, _, _ = run(capsys, "compare", bundles["loop"])
    assert code == 2


def test_tests_verb(capsys, bundles):
    code, out, _ = run(capsys, "tests", bundles["w4"])
    doc = json.loads(out)
    assert code == 0
    assert [r["hurwitz"] for r in doc["reports"]] == [False, False, False, True]
    assert doc["certificate"]["lyapunov_residual"] < 0
    code, out, _ = run(capsys, "tests", bundles["two_block"], "--text", "--epsilon", "1e-5")
    assert "equivalent" in out


def test_simulate_csv(capsys, bundles):
    code, out, _ = run(capsys, "simulate", bundles["five"], "--x0=-1,0,0,0,0",
                       "--horizon", "5", "--step", "5e-4")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out.split("#")[0])))
    assert rows[0][:2] == ["t", "x1"] and len(rows) == 10002
    viol = float(out.rsplit("max_violation", 1)[1])
    assert viol <= 1e-6


def test_simulate_json_with_input(capsys, bundles, tmp_path):
    u = tmp_path / "u.csv"
    np.savetxt(u, np.ones((101, 1)), delimiter=",")
    code, out, _ = run(capsys, "simulate", bundles["two_block"], "--json", "--x0", "1 1 1 1 1",
                       "--horizon", "0.1", "--step", "0.001", "--input", u)
    doc = json.loads(out)
    assert code == 0 and len(doc["samples"]) == 101 and doc["max_violation"] <= 1e-9


def test_simulate_bad_x0(capsys, bundles):
    code, _, err = run(capsys, "simulate", bundles["five"], "--x0", "1,2")
    assert code == 1 and "x0" in err


def test_network_verb(capsys, bundles):
    code, out, _ = run(capsys, "network", bundles["ring"])
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "certified"
    assert all(r <= 0 for r in doc["residuals"]["local"])
    code, out, _ = run(capsys, "network", bundles["ring"], "--decoupled", "--delta", "2.5")
    assert code == 0 and json.loads(out)["delta"] == 2.5
    code, _, _ = run(capsys, "network", bundles["ring_unstable"])
    assert code == 2


def test_norm_verb(capsys, bundles):
    code, out, _ = run(capsys, "norm", bundles["five"], "--text")
    s = five_state_system()
    assert code == 0
    assert float(out) == pytest.approx(hinf_norm(s.A, s.B, s.C, s.D), rel=1e-9)


def test_output_file_and_determinism(capsys, bundles, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "compare", bundles["two_block"], "-o", a)
    run(capsys, "compare", bundles["two_block"], "-o", b)
    assert a.read_text() == b.read_text()


def test_module_entry_point(bundles):
    r = subprocess.run([sys.executable, "-m", "blockcert", "compare", str(bundles["two_block"]), "--text"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and "Hurwitz: True" in r.stdout
