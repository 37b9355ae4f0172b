import json
import subprocess
import sys

import pytest

from bottchern import catalog, cli
from bottchern.errors import InvariantViolation, ParseError
from bottchern.io import coframe_to_json, dumps, family_to_json, parse_class, parse_entry, parse_form
from bottchern.scalars import GaussRat

IWASAWA_JSON = """{
  "name": "iw",
  "n": 3,
  "structure": [
    {"target": 3, "type": "20", "i": 1, "j": 2, "coeff": "-1"}
  ]
}"""


def test_parse_coframe():
    kind, cf, _ = parse_entry(IWASAWA_JSON)
    assert kind == "coframe" and cf.n == 3
    assert coframe_to_json(cf)["structure"][0]["coeff"] == {"re": "-1", "im": "0"}


def test_parse_family_detection():
    text = json.dumps({"name": "f", "n": 3, "domain_radius": "1/2", "structure": [
        {"target": 3, "type": "11", "i": 1, "j": 2, "polynomial": [{"t_power": 1, "re": "1"}]}]})
    kind, fam, _ = parse_entry(text)
    assert kind == "family" and fam.domain_radius == GaussRat("1/2").re
    again = parse_entry(json.dumps(family_to_json(fam)))[1]
    assert again == fam


@pytest.mark.parametrize("text,field", [
    (IWASAWA_JSON.replace('"-1"', "-1.0"), "structure[0].coeff"),
    (IWASAWA_JSON.replace('"target": 3', '"target": 7'), "structure[0].target"),
    (IWASAWA_JSON.replace('"20"', '"21"'), "structure[0].type"),
    (IWASAWA_JSON.replace('"n": 3', '"n": 9'), "n"),
    (IWASAWA_JSON.replace('"i": 1, ', ""), "structure[0].i"),
])
def test_parse_errors_carry_field(text, field):
    with pytest.raises(ParseError) as exc:
        parse_entry(text)
    assert exc.value.field == field


def test_parse_error_line_numbers():
    with pytest.raises(ParseError) as exc:
        parse_entry(IWASAWA_JSON.replace('"20"', '"21"'))
    assert exc.value.line == 5
    with pytest.raises(ParseError) as exc:
        parse_entry("{\n  \"n\": 3,\n  oops\n}")
    assert exc.value.line == 3


def test_parse_form_and_class():
    f = parse_form('{"n": 2, "terms": [{"holo": [1], "anti": [1], "coeff": {"im": "1"}}]}')
    assert f.is_real()
    assert parse_class('{"coordinates": ["1/2", {"re": "0", "im": "1"}]}') == [GaussRat("1/2"), GaussRat(0, 1)]
    with pytest.raises(ParseError):
        parse_form('{"n": 2, "terms": [{"holo": [3], "coeff": "1"}]}')


def test_catalog_unknown_and_file(tmp_path):
    with pytest.raises(ParseError):
        catalog.load("no-such-entry")
    p = tmp_path / "iw.json"
    p.write_text(IWASAWA_JSON)
    e = catalog.load(str(p))
    assert e.n == 3 and e.kind == "coframe"
    assert "iwasawa" in catalog.builtin_names()


def test_dumps_deterministic_and_roundtrip():
    obj = {"b": 0.1 + 0.2, "a": [GaussRat("1/3")], (1, 2): True}
    s = dumps(obj)
    assert s == dumps(json.loads(s))
    assert json.loads(s)["b"] == 0.3 and list(json.loads(s)) == ["1,2", "a", "b"]


@pytest.mark.parametrize("tok,val", [("1/4", GaussRat("1/4")), ("-1/8i", GaussRat(0, "-1/8")),
                                     ("1/4+1/8i", GaussRat("1/4", "1/8")), ("i", GaussRat(0, 1)),
                                     ("0", GaussRat(0))])
def test_parse_t(tok, val):
    assert cli.parse_t(tok) == val


def test_parse_grid():
    assert len(cli.parse_grid("default")) == 21
    assert len(cli.parse_grid("real")) == 11
    assert cli.parse_grid("0,1/4") == (GaussRat(0), GaussRat("1/4"))


def _stdout(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exit_codes(capsys, monkeypatch):
    assert _stdout(["cohomology", "torus2", "--all"], capsys)[0] == 0
    code, _, err = _stdout(["cohomology", "nowhere"], capsys)
    assert code == 2 and json.loads(err.strip().splitlines()[-1])["kind"] == "precondition"
    assert _stdout(["no-such-command"], capsys)[0] == 2

    def boom(args, entry):
        raise InvariantViolation("forced")
    monkeypatch.setitem(cli.COMMANDS, "ops", boom)
    code, _, err = _stdout(["ops", "check", "torus2"], capsys)
    assert code == 3 and "forced" in err


def test_machine_block_roundtrip(capsys):
    _, out, _ = _stdout(["hypotheses", "kodaira-thurston", "--p", "1", "--k", "1"], capsys)
    block = cli.extract_machine_block(out)
    assert dumps(json.loads(block)) == block
    data = json.loads(block)
    assert data["command"] == "hypotheses" and data["entry"]["name"] == "kodaira-thurston"


def test_formats_and_output_file(capsys, tmp_path):
    target = tmp_path / "m.json"
    _, out, _ = _stdout(["--format", "json", "--output", str(target), "frolicher", "iwasawa"], capsys)
    assert json.loads(out) == json.loads(target.read_text())
    _, out, _ = _stdout(["--format", "table", "frolicher", "iwasawa"], capsys)
    assert cli.MACHINE_BEGIN not in out and out.strip()


def test_cli_commands_smoke(capsys, tmp_path):
    form = tmp_path / "w.json"
    form.write_text('{"n": 2, "terms": [{"holo": [1], "anti": [1], "coeff": {"im": "1"}},'
                    ' {"holo": [2], "anti": [2], "coeff": {"im": "1"}}]}')
    runs = [
        ["ops", "check", "iwasawa"],
        ["--sample-size", "300", "cones", "kodaira-thurston", "--p", "1"],
        ["tower", "kodaira-thurston", "--p", "1", "--form", str(form)],
        ["sweep", "--family", "iwasawa-family", "--grid", "0,1/4"],
        ["openness", "--family", "framemix-torus2", "--form", str(form), "--grid", "real"],
    ]
    results = {}
    for argv in runs:
        code, out, _ = _stdout(argv, capsys)
        assert code == 0, argv
        results[argv[-1] if argv[0] != "--sample-size" else "cones"] = json.loads(
            cli.extract_machine_block(out))["result"]
    assert results["cones"]["equality"]["verdict"] == "NotEqual"
    assert results[str(form)]["solvable"] is False


def test_report_deterministic_subprocess():
    argv = [sys.executable, "-m", "bottchern.cli", "--sample-size", "300", "report", "kodaira-thurston"]
    outs = [subprocess.run(argv, capture_output=True, text=True, check=True).stdout for _ in range(2)]
    assert cli.extract_machine_block(outs[0]) == cli.extract_machine_block(outs[1])
