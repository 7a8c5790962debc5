import json

import pytest

from tangent_cylinders.cli import main
from tangent_cylinders.config_io import load

from conftest import DATA


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def summary(out: str) -> dict:
    return json.loads(out.strip().splitlines()[-1])


def test_distance_touching(capsys):
    code, out, _ = run(capsys, "distance", "--a", "0,0", "--b", "0,0", "--c", "1,0", "--d", "0,2")
    assert code == 0
    assert "F = 0.0" in out
    assert summary(out)["class"] == "ExternallyTangent"


def test_distance_overlapping(capsys):
    code, out, _ = run(capsys, "distance", "--a", "0,0", "--b", "0,0", "--c", "1,0", "--d", "0,1")
    assert code == 1
    assert "Overlapping" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["distance", "--a", "0,zz", "--b", "0,0", "--c", "1,0", "--d", "0,1"],
        ["distance", "--a", "0,0", "--b", "0,0"],
        ["distance", "--a", "0,0", "--b", "0,0", "--c", "1,0,0", "--d", "0,1,0"],
        ["search", "--d", "2", "--n", "3"],
        ["bounds", "--d", "1"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_argparse_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["search", "--n", "3"])
    assert exc.value.code == 2


def test_bounds_d3(capsys):
    code, out, _ = run(capsys, "bounds", "--d", "3")
    assert code == 0
    for value in ("1372", "48020", "4116", "192080"):
        assert value in out
    s = summary(out)
    assert (s["parameter_count_prediction"], s["parallel_family_unit"], s["parallel_family_general"]) == (7, 3, 4)


def test_quiet_prints_only_summary(capsys):
    code, out, _ = run(capsys, "bounds", "--d", "4", "--quiet")
    assert code == 0
    assert len(out.strip().splitlines()) == 1


def test_verify_pinned(capsys):
    code, out, _ = run(capsys, "verify", "--in", str(DATA / "unit_d3_n7.json"))
    assert code == 0
    assert summary(out)["certified"] is True


def test_verify_bad_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 3, "cylinders": [{"a": [0], "b": [0, 0]}]}')
    code, _, err = run(capsys, "verify", "--in", str(bad))
    assert code == 2
    assert "cylinder 0" in err


def test_search_small(capsys, tmp_path):
    out_path = tmp_path / "pair.json"
    code, out, _ = run(capsys, "search", "--d", "3", "--n", "2", "--unit", "--starts", "1", "--out", str(out_path))
    assert code == 0
    assert summary(out)["status"] == "Certified"
    assert len(load(out_path)) == 2
    assert (tmp_path / "pair.json.report.json").exists()


def test_search_eleven_in_3d_fails_honestly(capsys):
    code, out, _ = run(capsys, "search", "--d", "3", "--n", "11", "--starts", "5", "--max-iter", "100", "-q")
    assert code == 1
    assert summary(out)["status"] != "Certified"


def test_search_seeds_file(capsys, tmp_path):
    seeds = tmp_path / "seeds.txt"
    seeds.write_text("5\n9\n")
    code, out, _ = run(capsys, "search", "--d", "3", "--n", "3", "--seeds-file", str(seeds), "-q")
    assert code == 0
    assert summary(out)["seed"] in (5, 9)


def test_extend_pinned(capsys, tmp_path):
    full = load(DATA / "unit_d3_n7.json")
    from tangent_cylinders.config_io import save

    base = tmp_path / "six.json"
    save(full.without(0), base)
    code, out, _ = run(capsys, "extend", "--base", str(base), "--starts", "200", "--stop-on-certified", "-q")
    assert code == 0
    s = summary(out)
    assert s["n"] == 7 and s["status"] == "Certified"


def test_export(capsys, tmp_path):
    path = tmp_path / "seven.obj"
    code, out, _ = run(capsys, "export", "--in", str(DATA / "unit_d3_n7.json"), "--out", str(path), "--segments", "8")
    assert code == 0
    assert summary(out)["vertices"] == 7 * 16
    assert path.read_text().count("\nv ") + path.read_text().startswith("v ") == 7 * 16


def test_export_rejects_4d(capsys, tmp_path):
    code, _, err = run(capsys, "export", "--in", str(DATA / "unit_d4_n6.json"), "--out", str(tmp_path / "x.obj"))
    assert code == 2
    assert "verify" in err
