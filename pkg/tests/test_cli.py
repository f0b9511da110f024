import json

import pytest

from braceworks.bimod import PeriodicResolution, dual_numbers
from braceworks.cli import main


@pytest.fixture(autouse=True)
def cache(tmp_path, monkeypatch):
    monkeypatch.setenv("BRACEWORKS_CACHE", str(tmp_path / "cache"))
    return tmp_path / "cache"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def dims(doc):
    return [r["dimension"] for r in doc["degrees"]]


def test_hochschild_dual(capsys):
    code, out, _ = run(capsys, "hochschild", "--input", "dual")
    doc = json.loads(out)
    assert code == 0 and doc["pass"]
    assert dims(doc)[:4] == [2, 1, 1, 1]


def test_untrusted_degrees_exit_one(capsys):
    code, out, err = run(capsys, "hochschild", "--input", "ground", "--degree-max", "5")
    doc = json.loads(out)
    assert code == 1
    assert [r["degree"] for r in doc["degrees"] if not r["trusted"]] == [4, 5]
    assert "trusted window" in err


def test_missing_input_exits_two(capsys):
    code, _, err = run(capsys, "hochschild", "--input", "no-such-algebra")
    assert code == 2 and "no such file" in err


def test_bad_json_is_located(tmp_path, capsys):
    p = tmp_path / "a.json"
    p.write_text('{"dim": 2,\n "unit": [1, 0]\n "products": []}')
    code, _, err = run(capsys, "hochschild", "--input", str(p))
    assert code == 2 and "line 3" in err


def test_non_associative_exits_two(tmp_path, capsys):
    spec = {"dim": 2, "basis": ["1", "x"], "unit": ["1", "0"],
            "products": [[0, 0, 0, "1"], [0, 1, 1, "1"], [1, 0, 1, "1"], [1, 1, 0, "1"], [1, 1, 1, "1"]]}
    spec["products"][1][3] = "2"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(spec))
    code, _, err = run(capsys, "hochschild", "--input", str(p))
    assert code == 2 and "error" in err


def test_csv_output(capsys):
    code, out, _ = run(capsys, "cohochschild", "--input", "dual", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "degree,dimension,trusted"
    assert lines[1].startswith("0,2,")


def test_cohochschild_resolutions_agree(capsys):
    _, a, _ = run(capsys, "cohochschild", "--input", "dual", "--resolution", "bar")
    _, b, _ = run(capsys, "cohochschild", "--input", "dual", "--resolution", "periodic")
    assert dims(json.loads(a)) == dims(json.loads(b))


def test_cache_returns_identical_bytes(cache, capsys):
    _, first, _ = run(capsys, "bar", "--input", "dual", "--max-arity", "2")
    assert any(cache.iterdir())
    _, second, _ = run(capsys, "bar", "--input", "dual", "--max-arity", "2")
    _, fresh, _ = run(capsys, "bar", "--input", "dual", "--max-arity", "2", "--no-cache")
    assert first == second == fresh


def test_report_is_exact(capsys):
    _, out, _ = run(capsys, "lift", "--input", "dual", "--truncation", "4", "--max-arity", "3")
    doc = json.loads(out)
    assert doc["pass"]

    def walk(x):
        if isinstance(x, float):
            raise AssertionError(x)
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        if isinstance(x, list):
            for v in x:
                walk(v)
    walk(doc)


def test_timings_go_to_stderr(capsys):
    _, out, err = run(capsys, "verify", "--suite", "table", "--timings")
    assert "elapsed" in err and "elapsed" not in out


def test_output_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--suite", "signs", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["pass"]


def _periodic_document(D):
    P = PeriodicResolution(dual_numbers(), D)
    name = {g: f"g{k}_{i}" for k in range(D + 1) for i, g in enumerate(P.gens(k))}
    return {
        "generators": {str(k): [name[g] for g in P.gens(k)] for k in range(D + 1)},
        "differential": {name[g]: [[l, name[h], r, str(c)] for (l, h, r), c in P.d_gen(g).items()]
                         for k in range(1, D + 1) for g in P.gens(k)},
        "augmentation": {name[g]: [[a, str(c)] for a, c in P.eps_gen(g).items()] for g in P.gens(0)},
        "unit": name[P.unit_gen()],
    }


def test_lift_from_resolution_file(tmp_path, capsys):
    p = tmp_path / "res.json"
    p.write_text(json.dumps(_periodic_document(4)))
    code, out, _ = run(capsys, "lift", "--input", "dual", "--resolution", "file",
                       "--resolution-file", str(p), "--truncation", "4", "--max-arity", "3")
    doc = json.loads(out)
    assert code == 0, doc["checks"]
    assert doc["data"]["nonzero_arities"] == [2]


def test_malformed_resolution_file(tmp_path, capsys):
    doc = _periodic_document(3)
    doc["differential"]["g2_0"][0][1] = "g2_0"
    p = tmp_path / "res.json"
    p.write_text(json.dumps(doc))
    code, _, err = run(capsys, "lift", "--input", "dual", "--resolution", "file",
                       "--resolution-file", str(p), "--truncation", "3")
    assert code == 2 and "outside index" in err


def test_periodic_needs_dual_numbers(capsys):
    code, _, err = run(capsys, "lift", "--input", "product", "--resolution", "periodic")
    assert code == 2


def test_unknown_suite_is_an_argparse_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nope"])
    assert exc.value.code == 2


def _schemas():
    import pathlib
    import re
    text = (pathlib.Path(__file__).parent.parent / "docs" / "schemas.md").read_text()
    blocks = [json.loads(b) for b in re.findall(r"```json\n(.*?)```", text, re.S)]
    return {b["title"]: b for b in blocks}


def test_documents_match_published_schemas(tmp_path, capsys):
    jsonschema = pytest.importorskip("jsonschema")
    S = _schemas()
    from braceworks.bimod import bundled_names, load_algebra
    for n in bundled_names():
        jsonschema.validate(load_algebra(n).to_spec(), S["AlgebraSpec"])
    jsonschema.validate(_periodic_document(3), S["Resolution"])
    for argv in (["hochschild", "--input", "dual"], ["verify", "--suite", "sigma"], ["bar", "--input", "ground"]):
        _, out, _ = run(capsys, *argv)
        jsonschema.validate(json.loads(out), S["Report"])
