import json

import pytest

# guard on a submodule: the bare name can resolve to the repo checkout as an
# empty namespace package even when plotkit is not installed
pytest.importorskip("plotkit.cli")

from plotkit.cli import main

from fixture_data import ENERGY, write


def test_render_subcommand(tmp_path, capsys):
    csv = write(tmp_path / "energy_scan.csv", ENERGY)
    out = tmp_path / "fig.svg"
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "input_csv": str(csv),
        "kind": "energy-ratio-loglog",
        "output": str(out),
        "title": "deviation vs amplitude",
    }))
    assert main(["render", "--spec", str(spec)]) == 0
    assert out.is_file()
    assert "deviation vs amplitude" in out.read_text()
    first = out.read_bytes()
    assert main(["render", "--spec", str(spec)]) == 0
    assert out.read_bytes() == first


def test_render_rejects_bad_specs(tmp_path, capsys):
    spec = tmp_path / "spec.json"

    spec.write_text("{not json")
    assert main(["render", "--spec", str(spec)]) == 2
    assert "not valid JSON" in capsys.readouterr().err

    spec.write_text(json.dumps({"kind": "energy-ratio-loglog"}))
    assert main(["render", "--spec", str(spec)]) == 2
    assert "needs keys" in capsys.readouterr().err

    assert main(["render", "--spec", str(tmp_path / "missing.json")]) == 2
    assert "cannot read spec" in capsys.readouterr().err


def test_render_schema_mismatch_exit_code(tmp_path, capsys):
    csv = write(tmp_path / "energy_scan.csv", ENERGY)
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "input_csv": str(csv),
        "kind": "lifespan-loglog",
        "output": str(tmp_path / "f.svg"),
    }))
    assert main(["render", "--spec", str(spec)]) == 2
    assert "does not match kind" in capsys.readouterr().err


def test_all_subcommand(fixture_dir, capsys):
    assert main(["all", "--dir", str(fixture_dir)]) == 0
    out = capsys.readouterr().out
    assert "rendered 5 figure(s)" in out
    assert (fixture_dir / "simulate" / "trajectory.svg").is_file()


def test_all_missing_directory(tmp_path, capsys):
    assert main(["all", "--dir", str(tmp_path / "nope")]) == 2
    assert "is not a directory" in capsys.readouterr().err


def test_subcommand_required():
    with pytest.raises(SystemExit):
        main([])
