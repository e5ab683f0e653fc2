import json
import math

import numpy as np
import pytest

from oscent.cli import main, parse_args


@pytest.fixture()
def two_site_config(tmp_path):
    matrix = tmp_path / "twosite.csv"
    np.savetxt(matrix, np.array([[2.0, -1.0], [-1.0, 2.0]]), delimiter=",")
    config = tmp_path / "ground.json"
    config.write_text(
        json.dumps(
            {
                "dimension": 1,
                "lengths": [2],
                "region": {"sites": [[0]]},
                "matrix_csv": str(matrix),
                "eps": [0.5, 1.0],
            }
        )
    )
    return config


@pytest.fixture()
def scan_config(tmp_path):
    config = tmp_path / "scan.json"
    config.write_text(
        json.dumps(
            {
                "dimension": 1,
                "lengths": [12],
                "region": {"corner": [4], "lengths": [3]},
                "disorder": {"k_max": 8.0},
                "seed": 11,
                "realizations": 3,
                "eps": [0.5, 1.0],
                "excitations": "all",
                "p": 1.0,
                "s": 0.5,
            }
        )
    )
    return config


def test_parse_requires_subcommand():
    with pytest.raises(SystemExit) as info:
        parse_args([])
    assert info.value.code == 2


def test_parse_rejects_unknown_command():
    with pytest.raises(SystemExit) as info:
        parse_args(["frobnicate"])
    assert info.value.code == 2


def test_missing_config_exits_2(tmp_path, capsys):
    assert main(["scan", "--config", str(tmp_path / "missing.json")]) == 2
    assert "not found" in capsys.readouterr().err


def test_bad_eps_exits_2(two_site_config, tmp_path, capsys):
    code = main(
        ["ground-entropy", "--config", str(two_site_config), "--eps", "1.5", "--out", str(tmp_path / "o")]
    )
    assert code == 2
    assert "eps" in capsys.readouterr().err


def test_ground_entropy_two_site(two_site_config, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["ground-entropy", "--config", str(two_site_config), "--out", str(out)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "eps=0.5" in stdout
    payload = json.loads((out / "ground_entropy.json").read_text())
    # frozen value for the coupled two-site system (series oracle)
    assert payload["ground_renyi"][0] == pytest.approx(0.274653072167027, abs=1e-12)
    assert payload["log_negativity"] == pytest.approx(payload["ground_renyi"][0])
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "ground-entropy"
    assert "numpy" in manifest["versions"]


def test_excited_entropy_writes_bounds(two_site_config, tmp_path):
    out = tmp_path / "out"
    code = main(["excited-entropy", "--config", str(two_site_config), "--out", str(out)])
    assert code == 0
    payload = json.loads((out / "excited_bounds.json").read_text())
    assert payload["excited_modes"] == [1, 2]
    assert all(math.isfinite(v) for v in payload["excited_computed_bounds"])


def test_ensemble_bound_hypothesis_violation_exits_1(tmp_path, capsys):
    config = tmp_path / "bad.json"
    config.write_text(
        json.dumps(
            {
                "dimension": 1,
                "lengths": [9],
                "region": {"corner": [0], "lengths": [4]},
                "disorder": {"k_max": 4.0, "seed": 3},
            }
        )
    )
    assert main(["ensemble-bound", "--config", str(config), "--out", str(tmp_path / "o")]) == 1
    assert "hypothesis" in capsys.readouterr().err


def test_scan_end_to_end(scan_config, tmp_path):
    out = tmp_path / "scan_out"
    code = main(["scan", "--config", str(scan_config), "--out", str(out)])
    assert code == 0
    for name in ("records.csv", "aggregates.json", "scaling.dat", "manifest.json"):
        assert (out / name).exists()
    header = (out / "records.csv").read_text().splitlines()[0]
    assert header.split(",")[:5] == [
        "realization_index",
        "lattice_size",
        "region_size",
        "boundary_size",
        "eps",
    ]


def test_scan_threads_env_fallback(scan_config, tmp_path, monkeypatch):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    monkeypatch.setenv("OSCENT_THREADS", "1")
    assert main(["scan", "--config", str(scan_config), "--out", str(out1)]) == 0
    monkeypatch.setenv("OSCENT_THREADS", "7")
    assert main(["scan", "--config", str(scan_config), "--out", str(out2)]) == 0
    assert (out1 / "records.csv").read_bytes() == (out2 / "records.csv").read_bytes()
    monkeypatch.setenv("OSCENT_THREADS", "not-a-number")
    assert main(["scan", "--config", str(scan_config), "--out", str(tmp_path / "c")]) == 2


def test_scan_does_not_mutate_config(scan_config, tmp_path):
    before = scan_config.read_bytes()
    main(["scan", "--config", str(scan_config), "--out", str(tmp_path / "o")])
    assert scan_config.read_bytes() == before


def test_verify_passes_and_writes_report(tmp_path, capsys):
    out = tmp_path / "v"
    code = main(["verify", "--out", str(out)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "pass" in stdout and "FAIL" not in stdout
    payload = json.loads((out / "verify.json").read_text())
    assert all(row["passed"] for row in payload)


def test_verify_fails_with_absurd_tolerance(capsys):
    assert main(["verify", "--tolerance", "1e-30"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_seed_override_changes_draw(two_site_config, tmp_path):
    # matrix-file config ignores seeds; use a disorder config instead
    config = tmp_path / "disorder.json"
    config.write_text(
        json.dumps(
            {
                "dimension": 1,
                "lengths": [6],
                "region": {"corner": [2], "lengths": [2]},
                "disorder": {"k_max": 6.0, "seed": 1},
                "eps": [0.5],
            }
        )
    )
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    assert main(["ground-entropy", "--config", str(config), "--out", str(out1)]) == 0
    assert main(["ground-entropy", "--config", str(config), "--seed", "2", "--out", str(out2)]) == 0
    v1 = json.loads((out1 / "ground_entropy.json").read_text())["ground_renyi"][0]
    v2 = json.loads((out2 / "ground_entropy.json").read_text())["ground_renyi"][0]
    assert v1 != v2
