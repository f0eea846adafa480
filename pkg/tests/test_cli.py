import csv
import io
import json
import math
import subprocess
import sys

import jsonschema
import pytest

from qdleak.cli import ANALYZE_SCHEMA, TRANSCRIPT_COLUMNS, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_json(capsys):
    code, out, _ = run(["analyze", "--protocol", "epr-qd", "--format", "json", "--rounds", "2000"], capsys)
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, ANALYZE_SCHEMA)
    assert data["exact"]["i_abe_bits"] == 2.0
    assert data["exact"]["holevo_violation"] is True
    assert data["monte_carlo"]["rounds"] == 2000


def test_analyze_text_dense(capsys):
    code, out, _ = run(["analyze", "--protocol", "dense-key", "--rounds", "500"], capsys)
    assert code == 0
    assert "Eve's gain I(AB:E)   1 bits" in out


def test_analyze_exact_only(capsys):
    code, out, _ = run(["analyze", "--protocol", "single-photon", "--rounds", "0", "--format", "json"], capsys)
    data = json.loads(out)
    jsonschema.validate(data, ANALYZE_SCHEMA)
    assert data["monte_carlo"] is None
    assert data["exact"]["i_abe_bits"] == 1.0


def test_json_numbers_have_at_most_12_significant_digits(capsys):
    _, out, _ = run(["analyze", "--format", "json", "--rounds", "300", "--seed", "5"], capsys)

    def walk(x):
        if isinstance(x, float):
            assert len(repr(x).lstrip("-").replace(".", "").lstrip("0").split("e")[0]) <= 12
        elif isinstance(x, dict):
            for v in x.values():
                walk(v)

    walk(json.loads(out))


def test_table_outputs(capsys):
    code, out, _ = run(["table"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "σ00^A σ00^B → Ψ−"
    assert "differences from the published table: none" in out
    _, out, _ = run(["table", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 16
    assert rows[0] == {"alice_op": "00", "bob_op": "00", "outcome": "Psi-"}
    _, out, _ = run(["table", "--format", "json"], capsys)
    assert json.loads(out)["mismatches"] == []


def test_table_rejects_other_protocols(capsys):
    code, _, err = run(["table", "--protocol", "dense-key"], capsys)
    assert code == 2 and "epr-qd" in err


def test_simulate_csv(capsys, tmp_path):
    path = tmp_path / "t.csv"
    code, _, err = run(["simulate", "--rounds", "200", "--format", "csv", "--out", str(path)], capsys)
    assert code == 0
    assert "decode_accuracy: 1.0" in err
    raw = path.read_bytes()
    assert b"\r" not in raw
    rows = list(csv.DictReader(io.StringIO(raw.decode("utf-8"))))
    assert list(rows[0]) == TRANSCRIPT_COLUMNS
    assert len(rows) == 200
    for r in rows:
        actual = "".join(str(int(a) ^ int(b)) for a, b in zip(r["alice_msg"], r["bob_msg"]))
        assert r["eve_known_relation"] == f"xor={actual}"
        assert r["alice_decoded"] == r["bob_msg"] and r["bob_decoded"] == r["alice_msg"]


def test_simulate_summary_json(capsys):
    _, out, _ = run(["simulate", "--protocol", "single-photon", "--rounds", "300", "--format", "json", "--eve", "none"], capsys)
    summary = json.loads(out)["summary"]
    assert summary["decode_accuracy"] == 1.0
    assert summary["eve_relation_accuracy"] == 1.0


def test_cm_commands(capsys):
    _, out, _ = run(["cm", "--eve", "none", "--rounds", "300", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["pass_rate"] == 1.0 and data["abort"] is False
    _, out, _ = run(["cm", "--eve", "intercept-resend", "--rounds", "10000", "--format", "json"], capsys)
    data = json.loads(out)
    assert abs(data["pass_rate"] - 0.75) < 0.02 and data["abort"] is True
    _, out, err = run(["cm", "--rounds", "1", "--format", "json"], capsys)
    assert json.loads(out)["pass_rate"] in (0.0, 1.0)
    assert "wide uncertainty" in err


def test_distill(capsys):
    _, out, _ = run(["distill", "--protocol", "epr-qd", "--rounds", "100", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["structural"]["output_len"] == 200
    assert data["structural"]["parties_agree"] and data["toeplitz"]["parties_agree"]
    assert len(data["structural"]["key_hex"]) == 50
    _, out, _ = run(["distill", "--protocol", "dense-key", "--rounds", "100", "--margin-bits", "10", "--format", "json"], capsys)
    assert json.loads(out)["toeplitz"]["output_len"] == 90


def test_distill_zero_length_warns(capsys):
    code, out, err = run(["distill", "--protocol", "dense-key", "--rounds", "3", "--margin-bits", "50", "--format", "json"], capsys)
    assert code == 0
    assert "zero" in err
    assert json.loads(out)["toeplitz"]["key_hex"] == ""


def test_holevo(capsys, tmp_path):
    _, out, _ = run(["holevo", "--protocol", "epr-qd", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["holevo_chi_bits"] == 2.0 and data["claimed_bits_per_run"] == 4.0
    assert data["holevo_violation"]
    _, out, _ = run(["holevo", "--protocol", "single-photon", "--format", "json"], capsys)
    data = json.loads(out)
    assert data["holevo_chi_bits"] == 1.0 and data["holevo_violation"]

    ens = tmp_path / "ens.json"
    ens.write_text(json.dumps({"members": [{"p": 1.0, "state": [[1, 0], [0, 0]]}]}))
    _, out, _ = run(["holevo", "--ensemble", str(ens), "--format", "json"], capsys)
    assert json.loads(out)["holevo_chi_bits"] == 0.0


def test_holevo_mixed_member_file(capsys, tmp_path):
    ens = tmp_path / "ens.json"
    ens.write_text(json.dumps({"members": [
        {"p": 0.5, "density": [[0.5, 0], [0, 0.5]]},
        {"p": 0.5, "state": [1, 0]},
    ]}))  # fmt: skip
    code, out, _ = run(["holevo", "--ensemble", str(ens), "--format", "json"], capsys)
    assert code == 0
    # S(diag(3/4, 1/4)) - 0.5 * 1
    h = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))
    assert json.loads(out)["holevo_chi_bits"] == pytest.approx(h - 0.5, abs=1e-10)


def test_exit_codes(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--protocol", "bogus"])
    assert exc.value.code == 2
    assert main(["cm", "--rounds", "0"]) == 2
    assert main(["distill", "--margin-bits", "-1"]) == 2
    assert main(["holevo", "--ensemble", str(tmp_path / "missing.json")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["holevo", "--ensemble", str(bad)]) == 2
    assert main(["table", "--out", str(tmp_path / "no" / "such" / "dir.txt")]) == 3
    capsys.readouterr()


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("QDL_SEED", "42")
    _, from_env, _ = run(["simulate", "--rounds", "20", "--format", "csv"], capsys)
    monkeypatch.delenv("QDL_SEED")
    _, explicit, _ = run(["simulate", "--rounds", "20", "--format", "csv", "--seed", "42"], capsys)
    _, other, _ = run(["simulate", "--rounds", "20", "--format", "csv", "--seed", "43"], capsys)
    assert from_env == explicit != other


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qdleak", "holevo", "--protocol", "epr-qd"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "VIOLATES" in proc.stdout
