import io
import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from sectorlab.cli import main
from sectorlab.commands import Flags, compare_trees, corpus_files, run_command
from sectorlab.errors import InputError, SchemaError
from sectorlab.io import build_algebra, build_group, decode_matrix, encode_matrix, parse_spec
from sectorlab.report import Report, parse_machine, render_human, render_machine, render_report

CORPUS = Path(corpus_files()[0]).parent


def spec(kind, payload, **meta):
    return {"schema_version": 1, "kind": kind, "payload": payload, **meta}


def test_parse_group():
    s = parse_spec(spec("group", {"cyclic_orders": [2]}))
    assert build_group(s.payload).order == 2


def test_parse_flip_algebra():
    s = parse_spec(spec("algebra", {"ambient_dim": 2, "generators": [[[[0, 0], [1, 0]], [[1, 0], [0, 0]]]]}))
    a = build_algebra(s.payload, 1e-9)
    assert a.dim == 2 and a.is_commutative


def test_malformed_complex_names_path():
    with pytest.raises(SchemaError) as exc:
        parse_spec(spec("state", {"algebra": {"full": 2}, "vector": [[1, 0, 0], [0, 0]]}))
    assert "payload/vector/0" in str(exc.value)


def test_non_square_matrix():
    with pytest.raises(SchemaError, match="square"):
        parse_spec(spec("modular", {"algebra": {"full": 2}, "density": [[[1, 0], [0, 0]]]}))


def test_declared_unitary_checked():
    payload = {
        "algebra": {"full": 2},
        "group": {"cyclic_orders": [2]},
        "generators": [[[[2, 0], [0, 0]], [[0, 0], [1, 0]]]],
    }
    with pytest.raises(SchemaError, match="unitary"):
        parse_spec(spec("action", payload))


def test_unknown_kind_and_version():
    with pytest.raises(SchemaError):
        parse_spec(spec("banana", {}))
    with pytest.raises(SchemaError):
        parse_spec({"schema_version": 2, "kind": "group", "payload": {"cyclic_orders": [2]}})


def test_invalid_json_stream():
    with pytest.raises(SchemaError, match="invalid JSON"):
        parse_spec(io.StringIO("{nope"))


def test_matrix_codec_round_trip(rng):
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    np.testing.assert_array_equal(decode_matrix(encode_matrix(m)), m)


def test_sectors_table_example():
    rep = run_command("sectors", [CORPUS / "m2_m3_sectors.json"])
    rows = rep.tree()["results"][0]["sectors"]
    assert [(r["sector"], r["dim"], r["weight"]) for r in rows] == [(1, 2, 0.3), (2, 3, 0.7)]


def test_measure_example():
    rep = run_command("measure", [CORPUS / "qubit_measurement.json"])
    probs = [r["probability"] for r in rep.tree()["results"][0]["probabilities"]]
    assert probs == [0.5, 0.5]


def test_machine_round_trip():
    for f in corpus_files():
        s = parse_spec(f)
        report = run_command("verify", [s])
        assert parse_machine(render_machine(report)) == report.tree()


def test_machine_output_is_deterministic():
    f = CORPUS / "qubit_measurement.json"
    flags = Flags(samples=500, seed=3)
    a = render_machine(run_command("measure", [f], flags))
    b = render_machine(run_command("measure", [f], flags))
    assert a == b
    c = render_machine(run_command("measure", [f], Flags(samples=500, seed=4)))
    assert a != c


def test_empty_report_renders_header_only():
    assert render_human(Report("sectors")) == "== sectors ==\n"
    assert json.loads(render_report(Report("sectors"), "machine"))["results"] == []


def test_human_table_is_aligned():
    text = render_human(run_command("sectors", [CORPUS / "m2_m3_sectors.json"]))
    lines = [l.strip() for l in text.splitlines()]
    i = lines.index("sectors:")
    header, rule, row1, row2 = lines[i + 1 : i + 5]
    assert set(rule) <= {"-", " "}
    # every column starts at the same offset in each row
    starts = [header.index(c) for c in ("dim", "weight")]
    assert [row1[s - 1] for s in starts] == [" ", " "]
    assert row1.split() == ["1", "2", "1", "2", "0.3"]
    assert row2.split() == ["2", "3", "1", "3", "0.7"]


def test_every_residual_has_a_tolerance():
    tree = run_command("verify", []).tree()

    def walk(node):
        if isinstance(node, dict):
            if "residual" in node:
                assert "tol" in node
            for v in node.values():
                walk(v)

    walk(tree["verdicts"])


def test_arity_and_kind_errors():
    with pytest.raises(InputError):
        run_command("gns", [])
    with pytest.raises(InputError):
        run_command("measure", [CORPUS / "dhr_z3.json"])
    with pytest.raises(InputError):
        run_command("explode", [])


def test_tolerance_override_in_file():
    s = parse_spec(spec("algebra", {"full": 2}, tolerance=1e-6))
    rep = run_command("verify", [s], Flags(tol=1e-9))
    checks = next(iter(rep.tree()["verdicts"].values()))["algebra"]
    tols = {v["tol"] for v in checks.values() if "tol" in v}
    assert tols == {1e-6}


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["verify"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "kind": "group", "payload": {"cyclic_orders": [0]}}')
    assert main(["verify", str(bad)]) == 2
    assert main(["sectors", str(tmp_path / "missing.json")]) == 2
    out = capsys.readouterr()
    assert "input error" in out.err


def test_cli_reports_regression_failure(tmp_path, capsys):
    src = CORPUS / "m2_m3_sectors.json"
    shutil.copy(src, tmp_path / src.name)
    expected = json.loads((CORPUS / "m2_m3_sectors.expected.json").read_text())
    expected["results"][0]["sectors"][0]["weight"] = 0.31
    (tmp_path / "m2_m3_sectors.expected.json").write_text(json.dumps(expected))
    assert main(["verify", str(tmp_path / src.name)]) == 1
    assert "FAIL  expected_report" in capsys.readouterr().out


def test_compare_trees():
    assert compare_trees({"a": [1.0, 2]}, {"a": [1.0 + 1e-12, 2]}) == []
    assert compare_trees({"a": 1}, {"b": 1})
    assert compare_trees({"a": True}, {"a": 1})


def test_cli_writes_output_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["modular", str(CORPUS / "modular_diag.json"), "--format", "machine", "-o", str(out)]) == 0
    tree = json.loads(out.read_text())
    assert tree["passed"] and tree["command"] == "modular"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sectorlab", "sectors", str(CORPUS / "sigma_x_algebra.json"), "--format", "machine"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["results"][0]["structure"] == [[1, 1], [1, 1]]
