import json

import numpy as np
import pytest

from edgelab.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, dumps, figure1_rows, histogram_rows, main, read_csv


def run(tmp_path, name, *args):
    out = tmp_path / name
    return main([args[0], "--out-dir", str(out), *args[1:]]), out


def result(path):
    return json.loads(path.read_text())["result"]


def test_float_serialization_round_trips():
    for x in (0.1, 1.0, 1 / 3, 2.0 ** -40, 1e300, -0.0):
        assert float(json.loads(dumps({"x": x}))["x"]) == x
    assert dumps(1.0) == "1.0" and dumps(0.1) == "0.10000000000000001"
    assert json.loads(dumps({"z": 1 + 2j, "a": np.arange(3)})) == {"z": [1.0, 2.0], "a": [0, 1, 2]}


def test_same_config_same_payload(tmp_path):
    args = ("sample-edge", "--xi", "0.5", "--n", "20", "--reps", "30", "--seed", "4", "--dist", "rademacher")
    code_a, a = run(tmp_path, "a", *args)
    code_b, b = run(tmp_path, "b", *args)
    assert code_a == code_b == EXIT_OK
    # the manifests differ only through --out-dir, so compare payloads
    assert result(a / "edge.json") == result(b / "edge.json")
    body = lambda p: p.read_text().split("\n", 1)[1]
    assert body(a / "edge.csv") == body(b / "edge.csv")


def test_manifest_hash_stamps_results(tmp_path):
    import hashlib

    code, out = run(tmp_path, "law", "law", "--xi", "0.25", "--n", "50")
    assert code == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["xi"] == 0.25 and "wall_time_s" in manifest
    stamps = [json.loads(p.read_text())["manifest_sha256"] for p in out.glob("*.json") if p.name != "manifest.json"]
    stamps += [p.read_text().splitlines()[0].split("=")[1] for p in out.glob("*.csv")]
    assert stamps and len(set(stamps)) == 1
    body = dict(manifest)
    del body["wall_time_s"]
    assert hashlib.sha256(dumps(body).encode()).hexdigest() == stamps[0]


def test_missing_population_file(tmp_path, capsys):
    code, _ = run(tmp_path, "d", "deformed", "--population", str(tmp_path / "nope.txt"), "--xi", "0.5")
    assert code == EXIT_USAGE
    assert "nope.txt" in capsys.readouterr().err


def test_rate_needs_four_ns(tmp_path):
    code, out = run(tmp_path, "r", "rate", "--xi", "1", "--ns", "50,100", "--reps", "10")
    assert code == EXIT_USAGE
    assert not (out / "rate.json").exists()


def test_bad_usage_codes(tmp_path):
    assert main(["nonsense"]) == EXIT_USAGE
    assert run(tmp_path, "x", "law", "--xi", "1.5")[0] == EXIT_USAGE
    assert run(tmp_path, "y", "characteristics", "--xi", "0.25", "--z0", "1-0.1j", "--t-end", "0.1")[0] == EXIT_USAGE


def test_numeric_failure_code(tmp_path, monkeypatch, capsys):
    from edgelab import cli
    from edgelab.characteristics import PathError

    def boom(a):
        raise PathError("path reached the real axis")

    monkeypatch.setattr(cli, "cmd_law", boom)
    assert run(tmp_path, "n", "law", "--xi", "0.5")[0] == EXIT_NUMERIC
    assert "numeric failure" in capsys.readouterr().err


def test_output_stays_in_run_directory(tmp_path):
    code, out = run(tmp_path, "tw", "tw", "--out", str(tmp_path / "escaped.csv"), "--no-check")
    assert code == EXIT_USAGE
    assert not (tmp_path / "escaped.csv").exists()


def test_figure1_series():
    header, rows = figure1_rows(401)
    data = np.array(rows)
    assert header[1] == "rho_xi_1" and len(header) == 4
    assert data[0, 1] == pytest.approx(1 / np.pi, rel=1e-15)
    # the two rectangular cases have a gap at the origin
    assert data[0, 2] == 0 and data[0, 3] == 0


def test_histogram_counts():
    samples = np.random.default_rng(1).normal(-1.2, 1.2, 500)
    _, rows, _, _ = histogram_rows(samples, 25)
    assert sum(r[2] for r in rows) == 500
    assert sum(r[3] for r in rows) < 500


def test_plotdata_end_to_end(tmp_path):
    assert run(tmp_path, "fig", "plotdata", "--kind", "figure1", "--points", "11")[0] == EXIT_OK
    header, data = read_csv(tmp_path / "fig" / "figure1.csv")
    assert data.shape == (11, 4) and data[0, 1] == pytest.approx(1 / np.pi)

    assert run(tmp_path, "se", "sample-edge", "--xi", "1", "--n", "10", "--reps", "40")[0] == EXIT_OK
    code, out = run(tmp_path, "h", "plotdata", "--kind", "histogram", "--record", str(tmp_path / "se" / "edge.csv"),
                    "--bins", "7")
    assert code == EXIT_OK
    assert read_csv(out / "histogram.csv")[1][:, 2].sum() == 40

    assert run(tmp_path, "rate", "rate", "--xi", "1", "--ns", "10,12,14,16,18", "--reps", "30")[0] == EXIT_OK
    rate = result(tmp_path / "rate" / "rate.json")
    assert set(rate["per_N"]) == {"10", "12", "14", "16", "18"}
    assert rate["sigma_xi"] == pytest.approx(2 ** (4 / 3))
    code, out = run(tmp_path, "ll", "plotdata", "--kind", "loglog", "--record", str(tmp_path / "rate" / "rate.json"))
    assert code == EXIT_OK
    assert read_csv(out / "loglog.csv")[1].shape[0] == 5

    assert run(tmp_path, "bad", "plotdata", "--kind", "histogram")[0] == EXIT_USAGE


def test_tw_command(tmp_path):
    code, out = run(tmp_path, "tw", "tw", "--out", "tw1.csv", "--no-check")
    assert code == EXIT_OK
    header, data = read_csv(out / "tw1.csv")
    assert header == ["s", "F1"] and data[0, 0] == -12.0 and data[-1, 0] == 8.0


def test_characteristics_command(tmp_path):
    code, out = run(tmp_path, "c", "characteristics", "--xi", "1", "--z0", "1.9+0.01j", "--t-end", "0.5",
                    "--field", "sc", "--points", "5")
    assert code == EXIT_OK
    header, data = read_csv(out / "path.csv")
    assert header == ["t", "re", "im"] and data[0, 0] == 0 and np.all(np.diff(data[:, 2]) > 0)
    code, out = run(tmp_path, "v", "characteristics", "--xi", "0.25", "--z0", "1.49+0.001j", "--t-end", "0.5",
                    "--verify")
    assert code == EXIT_OK
    assert "rows" in result(out / "verify.json")


def test_rigidity_and_locations(tmp_path):
    code, out = run(tmp_path, "rg", "rigidity", "--xi", "1", "--n", "40", "--reps", "5")
    assert code == EXIT_OK
    rep = result(out / "rigidity.json")
    assert 0 <= rep["soft_pass_rate"] <= 1 and rep["hard_pass_rate"] is not None
    assert run(tmp_path, "loc", "locations", "--xi", "0.5", "--n", "30", "--check")[0] == EXIT_OK


def test_deformed_and_dbm(tmp_path):
    pop = tmp_path / "pop.txt"
    pop.write_text("\n".join(["1"] * 20 + ["2"] * 20))
    code, out = run(tmp_path, "d", "deformed", "--population", str(pop), "--xi", "0.5", "--density-points", "5")
    assert code == EXIT_OK
    code, out = run(tmp_path, "dbm", "dbm", "--n", "10", "--xi", "0.5", "--t-end", "0.01", "--couple", "wishart",
                    "--record", "gaps", "--record-every", "5")
    assert code == EXIT_OK
