import copy
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given, settings, strategies as st

from artifact.cli import BundleError, emit_bundle, emit_bundle_text, main, parse_bundle, parse_bundle_text

ROOT = Path(__file__).resolve().parent.parent
BUNDLES = ROOT / "bundles"
SCHEMA = json.loads((ROOT / "docs" / "bundle.schema.json").read_text())
ALL = sorted(BUNDLES.glob("*.json"))


def last_line(text):
    return text.strip().splitlines()[-1]


@pytest.mark.parametrize("path", ALL, ids=lambda p: p.name)
def test_sample_bundles_match_schema_and_round_trip(path):
    doc = json.loads(path.read_text())
    jsonschema.validate(doc, SCHEMA)
    b1 = parse_bundle(str(path))
    text = emit_bundle_text(b1)
    b2 = parse_bundle_text(text)
    assert b2 == b1
    assert emit_bundle_text(b2) == text
    jsonschema.validate(emit_bundle(b2), SCHEMA)


def _torus_doc():
    return json.loads((BUNDLES / "torus_generated.json").read_text())


def test_floats_are_rejected():
    text = (BUNDLES / "circle_energy_zero.json").read_text()
    bad = text.replace('"E": "1"', '"E": 1.0')
    assert bad != text
    with pytest.raises(BundleError, match="floating point"):
        parse_bundle_text(bad)
    doc = json.loads(text)
    doc["truncation"]["E"] = 1
    with pytest.raises(BundleError, match="p/q"):
        parse_bundle(doc)
    with pytest.raises(BundleError, match="floating point"):
        parse_bundle_text(text.replace('"provenance": {', '"provenance": {"x": 1e3,'))


def test_duplicates_are_rejected():
    doc = _torus_doc()
    doc["model_L"]["basis"].append(["th1", 1])
    with pytest.raises(BundleError, match="duplicate basis name"):
        parse_bundle(doc)
    doc = _torus_doc()
    doc["variables"].append(dict(doc["variables"][0]))
    with pytest.raises(BundleError, match="duplicate variable name"):
        parse_bundle(doc)
    doc = _torus_doc()
    doc["correlators"]["disk"].append(copy.deepcopy(doc["correlators"]["disk"][0]))
    with pytest.raises(BundleError, match="duplicate slot"):
        parse_bundle(doc)
    text = (BUNDLES / "circle_energy_zero.json").read_text().replace('"K_max": 4', '"K_max": 4, "K_max": 3')
    with pytest.raises(BundleError, match="duplicate key"):
        parse_bundle_text(text)


def test_degree_law_violation_names_the_slot():
    doc = _torus_doc()
    blk = next(b for b in doc["correlators"]["disk"] if b["k"] == 1 and b["l"] == 0)
    ent = blk["entries"][0]
    ent["value"] = {"vol": "1"}
    with pytest.raises(BundleError) as err:
        parse_bundle(doc)
    msg = str(err.value)
    assert f"slot (({blk['beta'][0]}), 1, 0)" in msg.replace(",)", ")")
    assert "degree law violated at (" + ",".join(ent["alpha"]) + ");()" in msg


def test_unknown_section_and_missing_truncation():
    doc = _torus_doc()
    doc["extra"] = {}
    with pytest.raises(BundleError, match="unknown section"):
        parse_bundle(doc)
    doc = _torus_doc()
    del doc["truncation"]
    with pytest.raises(BundleError, match="missing section"):
        parse_bundle(doc)


names = st.sampled_from(["1", "th1", "th2", "vol", "u", "v", "w", "z"])
rationals = st.tuples(st.integers(-9, 9), st.integers(1, 6)).map(lambda t: f"{t[0]}/{t[1]}")


@settings(max_examples=30, deadline=None)
@given(st.dictionaries(st.sampled_from(["om", "b", "c"]), rationals, max_size=3))
def test_round_trip_with_random_divisor_and_periods(periods):
    doc = json.loads((BUNDLES / "torus_template.json").read_text())
    doc["variables"][0]["divisor"] = periods
    doc["periods"] = [periods]
    try:
        b = parse_bundle(doc)
    except BundleError:
        return
    again = parse_bundle_text(emit_bundle_text(b))
    assert again == b
    assert parse_bundle_text(emit_bundle_text(again)) == again


# -- commands


@pytest.mark.parametrize("command", ["check-model", "check-correlators", "build-m", "check-ainfty", "check-axioms",
                                     "isotopy-build", "isotopy-check"])
def test_energy_zero_commands_pass(command, capsys):
    status = main([command, str(BUNDLES / "circle_energy_zero.json"), "--limit", "300"])
    out = capsys.readouterr().out
    assert status == 0, out
    assert last_line(out).startswith("residuals: 0 of ")


def test_nonzero_residual_sets_exit_code(tmp_path, capsys):
    doc = _torus_doc()
    blk = next(b for b in doc["correlators"]["disk"] if b["k"] == 2 and b["l"] == 0)
    ent = blk["entries"][0]
    name, val = next(iter(ent["value"].items()))
    ent["value"][name] = str(int(val.split("/")[0]) + 1) + ("/" + val.split("/")[1] if "/" in val else "")
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    status = main(["check-correlators", str(path)])
    out = capsys.readouterr().out
    line = last_line(out)
    assert status == 1
    r, total = int(line.split()[1]), int(line.split()[3])
    assert line.startswith("residuals:") and 0 < r <= total


def test_bad_bundle_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"lattice": {"generators": []}, "model_L": 1.5}')
    assert main(["check-model", str(path)]) == 2
    assert "floating point" in capsys.readouterr().err


def test_overrides(capsys):
    path = str(BUNDLES / "torus_generated.json")
    assert main(["check-ainfty", path, "--truncation-E", "1", "--kmax", "2"]) == 0
    out = capsys.readouterr().out
    assert last_line(out) == f"residuals: 0 of {sum(8 ** k for k in range(3))} nonzero"
    assert main(["isotopy-check", path, "--flag-gw-sign", "-1", "--kmax", "1", "--limit", "200"]) == 0
    assert "scalar relation (no sphere channel)" in capsys.readouterr().out


def test_check_properties(tmp_path, capsys):
    doc = _torus_doc()
    doc["variables"] = [{"name": "s", "degree": 2, "role": "fundamental", "divisor": None},
                        {"name": "t", "degree": 0, "role": "divisor", "divisor": {"om": "1"}},
                        {"name": "u", "degree": 0, "role": None, "divisor": None}]
    rec = lambda t, c="1": {"beta": [0], "t": t, "coeff": c}
    doc["gamma"] = {"1": [rec([1, 0, 0])], "om": [rec([0, 1, 0]), rec([0, 0, 2])], "b": [rec([0, 0, 1])]}
    for sec in ("gamma_prime", "eta"):
        doc.pop(sec)
    path = tmp_path / "props.json"
    path.write_text(json.dumps(doc))
    assert main(["check-properties", str(path)]) == 0
    assert "fundamental class derivative" in capsys.readouterr().out


def test_generate_writes_provenance(tmp_path, capsys):
    out = tmp_path / "gen.json"
    assert main(["generate", str(BUNDLES / "torus_template.json"), "--seed", "5", "-o", str(out)]) == 0
    assert last_line(capsys.readouterr().out).startswith("residuals: 0 of ")
    doc = json.loads(out.read_text())
    jsonschema.validate(doc, SCHEMA)
    prov = doc["provenance"]
    assert prov["seed"] == 5
    assert prov["order"][0] == [[1], 0, 0]
    assert prov["options"]["contractions"][0]["vol"] == {"th2": "1"}
    assert main(["check-correlators", str(out)]) == 0


def test_generate_reproduces_the_sample(tmp_path):
    out = tmp_path / "gen.json"
    assert main(["generate", str(BUNDLES / "torus_template.json"), "-o", str(out)]) == 0
    assert out.read_text() == (BUNDLES / "torus_generated.json").read_text()


def test_jobs_do_not_change_reports(capsys):
    path = str(BUNDLES / "torus_generated.json")
    outputs = []
    for jobs in ("1", "3"):
        assert main(["check-ainfty", path, "--jobs", jobs]) == 0
        assert main(["check-correlators", path, "--jobs", jobs, "--truncation-E", "1"]) == 0
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]


def test_dump_signs(capsys):
    assert main(["dump-signs"]) == 0
    out = capsys.readouterr().out
    assert "epsilon k=2 l=0 n=1 alpha=[1, 0] gamma=[] parity=1 sign=-1" in out
    assert main(["dump-signs", "--cyclic", "k=1,dmax=1", "--delta", "k=2,n=2"]) == 0
    out = capsys.readouterr().out
    assert "cyclic k=1 degrees=[1, 1] parity=0 sign=+1" in out
    assert "delta k1=1 k2=2 i=1 n=2" in out


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "artifact", "check-model", str(BUNDLES / "torus_energy_zero.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert last_line(proc.stdout).startswith("residuals: 0 of ")
