import json

import pytest

from whitham_lab import cli
from whitham_lab.cli import (
    ConfigError,
    build_config,
    load_config_tree,
    main,
    symbol_from_dict,
)
from whitham_lab.io import read_table

TWO_MODE = "cos(x)+0.5*cos(2*x)"
THREE_MODE = "cos(x)+0.5*sin(2*x)+0.25*cos(3*x)"


def run_cli(*args):
    return main(list(args))


# ---------------------------------------------------------------------------
# configuration handling


def test_symbol_from_dict_builtins():
    assert symbol_from_dict({"name": "whitham"}).name == "whitham"
    assert symbol_from_dict({"name": "fkdv", "alpha": 0.5}).alpha == 0.5
    sym = symbol_from_dict({"name": "capillary_whitham", "beta": 2.0})
    assert "capillary" in sym.name


def test_symbol_from_dict_custom():
    sym = symbol_from_dict({"name": "custom", "p": "1/sqrt(1+xi**2)", "alpha": -1.0, "j_star": 1})
    assert sym.satisfies_a3


@pytest.mark.parametrize(
    "desc",
    [
        "whitham",
        {},
        {"name": "nope"},
        {"name": "whitham", "beta": 1.0},
        {"name": "capillary_whitham"},
        {"name": "custom", "p": "xi"},
        {"name": "custom", "p": "xi", "alpha": 1.0, "j_star": 1, "bogus": 2},
        {"name": "custom", "p": "import os", "alpha": 1.0, "j_star": 1},
    ],
)
def test_symbol_from_dict_rejects(desc):
    with pytest.raises(ConfigError):
        symbol_from_dict(desc)


def test_build_config_defaults():
    cfg = build_config("simulate", load_config_tree(None, []))
    assert cfg.sym.name == "whitham"
    assert cfg.grid.n_points == 256
    assert cfg.solver.dt == 1e-3
    assert cfg.amplitudes == (0.1,)
    assert cfg.n_max == 3
    assert cfg.samples is None
    assert str(cfg.output_dir) == "outputs"


@pytest.mark.parametrize(
    "mutate",
    [
        {"bogus_key": 1},
        {"grid": {"n_points": 100, "scale": 1.0}},
        {"grid": {"n_points": 64}},
        {"grid": 64},
        {"grid": {"n_points": 64, "rows": 2}},
        {"solver": {"dt": -1.0}},
        {"solver": {"step_size": 1e-3}},
        {"solver": 0.001},
        {"amplitudes": []},
        {"amplitudes": [0.1, 0.2]},
        {"amplitudes": [0.2, -0.1]},
        {"amplitudes": "abc"},
        {"amplitudes": 5},
        {"profile": "cos(x) + import"},
        {"profile": 5},
        {"n_max": 1},
        {"n_max": "lots"},
        {"seed": -1},
        {"samples": 0},
    ],
)
def test_build_config_rejects(mutate):
    tree = load_config_tree(None, [])
    tree.update(json.loads(json.dumps(mutate)))
    with pytest.raises(ConfigError):
        build_config("simulate", tree)


def test_build_config_unknown_experiment():
    with pytest.raises(ConfigError, match="unknown experiment"):
        build_config("frobnicate", load_config_tree(None, []))


def test_n_max_floor_depends_on_symbol():
    tree = load_config_tree(None, [("symbol.name", "bessel"), ("n_max", "3")])
    cfg = build_config("simulate", tree)
    assert cfg.n_max == 3
    # bessel has j_star = 2 so n_max = 2 is below the 2 j* - 1 floor
    tree = load_config_tree(None, [("symbol.name", "bessel"), ("n_max", "2")])
    with pytest.raises(ConfigError, match="n_max"):
        build_config("simulate", tree)


def test_load_config_tree_file_and_override_precedence(tmp_path):
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text(json.dumps({"grid": {"n_points": 64}, "amplitudes": [0.3]}))
    tree = load_config_tree(str(cfg_file), [("grid.n_points", "32"), ("seed", "7")])
    assert tree["grid"]["n_points"] == 32  # override beats file
    assert tree["grid"]["scale"] == 1.0  # default survives partial file
    assert tree["amplitudes"] == [0.3]  # file beats default
    assert tree["seed"] == 7


def test_load_config_tree_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config_tree("/nonexistent/run.json", [])


def test_load_config_tree_bad_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config_tree(str(bad), [])
    lst = tmp_path / "list.json"
    lst.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="JSON object"):
        load_config_tree(str(lst), [])


def test_collect_overrides_forms():
    pairs = cli._collect_overrides(["--solver.dt", "5e-4", "--seed=3", "--profile", "cos(x)"])
    assert pairs == [("solver.dt", "5e-4"), ("seed", "3"), ("profile", "cos(x)")]


@pytest.mark.parametrize(
    "extras",
    [["positional"], ["--solver.dt"], ["--bad-key", "1"], ["--", "x"]],
)
def test_collect_overrides_rejects(extras):
    with pytest.raises(ConfigError):
        cli._collect_overrides(extras)


def test_override_json_parsing():
    tree = load_config_tree(
        None,
        [
            ("amplitudes", "[0.4, 0.2, 0.1]"),
            ("solver.dt", "5e-4"),
            ("solver.dealias", "false"),
            ("profile", "cos(x)"),
        ],
    )
    assert tree["amplitudes"] == [0.4, 0.2, 0.1]
    assert tree["solver"]["dt"] == 5e-4
    assert tree["solver"]["dealias"] is False
    assert tree["profile"] == "cos(x)"  # non-JSON stays a plain string


# ---------------------------------------------------------------------------
# end-to-end runs


def test_unknown_experiment_exits_2_via_argparse(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("frobnicate")
    assert exc.value.code == 2


def test_config_error_exit_code(tmp_path, capsys):
    code = run_cli("simulate", "--grid.n_points", "100", "--output_dir", str(tmp_path))
    assert code == 2
    assert "config error:" in capsys.readouterr().err


def test_identity_check_small_run(tmp_path):
    out = tmp_path / "out"
    code = run_cli(
        "identity-check",
        "--grid.n_points", "64",
        "--samples", "3",
        "--output_dir", str(out),
    )
    assert code == 0
    header, rows = read_table(out / "residuals.csv")
    assert header == ["sample_index", "bilinear_residual", "cancellation_residual"]
    assert len(rows) == 3
    assert all(float(r[1]) <= 1e-10 and float(r[2]) <= 1e-10 for r in rows)
    meta = json.loads((out / "residuals.meta.json").read_text())
    assert meta["config"]["samples"] == 3
    assert meta["config"]["experiment"] == "identity-check"


def test_verify_symbol_whitham(tmp_path):
    out = tmp_path / "out"
    code = run_cli("verify-symbol", "--samples", "500", "--output_dir", str(out))
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is True
    assert report["symbol"] == "whitham"
    assert report["multiplier_identities"]["max_residual"] <= 1e-12
    header, rows = read_table(out / "bounds.csv")
    assert [r[0] for r in rows] == ["phi_bound", "m_bound"]
    assert all(0.0 < float(r[1]) <= float(r[2]) for r in rows)
    for name in ("phi_ratio.csv", "m_ratio.csv"):
        header, rows = read_table(out / name)
        assert header == ["a", "b", "ratio"]
        assert len(rows) > 1000


def test_verify_symbol_without_local_expansion_skips_bounds(tmp_path):
    out = tmp_path / "out"
    code = run_cli(
        "verify-symbol",
        "--symbol.name", "fkdv",
        "--symbol.alpha", "0.5",
        "--samples", "500",
        "--output_dir", str(out),
    )
    assert code == 0
    assert (out / "report.json").exists()
    assert not (out / "bounds.csv").exists()


def test_verify_symbol_failing_model_exits_4(tmp_path, capsys):
    out = tmp_path / "out"
    code = run_cli(
        "verify-symbol",
        "--symbol.name", "capillary_whitham",
        "--symbol.beta", "0.2",
        "--samples", "300",
        "--output_dir", str(out),
    )
    assert code == 4
    err = capsys.readouterr().err
    assert "check failed:" in err
    assert "monotonicity" in err
    # the report is still written so the failure can be inspected
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is False


def test_simulate_writes_artifacts(tmp_path):
    out = tmp_path / "out"
    code = run_cli(
        "simulate",
        "--grid.n_points", "64",
        "--solver.dt", "0.01",
        "--solver.t_end", "0.1",
        "--solver.checkpoint_every", "5",
        "--output_dir", str(out),
    )
    assert code == 0
    for name in ("trajectory.csv", "breakdown.json", "final_field.csv", "final_spectrum.json"):
        assert (out / name).exists()
    assert (out / "trajectory.meta.json").exists()
    assert json.loads((out / "breakdown.json").read_text()) == {"time": None, "reason": None}
    header, rows = read_table(out / "trajectory.csv")
    assert header[:4] == ["t", "sup_grad", "l2", "tail_fraction"]
    assert float(rows[-1][0]) == 0.1
    spectrum = json.loads((out / "final_spectrum.json").read_text())
    assert spectrum["n_points"] == 64


def test_energy_scan(tmp_path):
    out = tmp_path / "out"
    code = run_cli(
        "energy-scan",
        "--grid.n_points", "64",
        "--profile", TWO_MODE,
        "--amplitudes", "[0.4, 0.2, 0.1]",
        "--output_dir", str(out),
    )
    assert code == 0
    header, rows = read_table(out / "energy_scan.csv")
    assert header == ["eps", "deviation", "fitted_slope", "fitted_intercept"]
    assert [float(r[0]) for r in rows] == [0.4, 0.2, 0.1]
    slopes = {r[2] for r in rows}
    assert len(slopes) == 1  # one shared fit, repeated per row
    assert 0.5 <= float(slopes.pop()) <= 1.5


def test_energy_scan_degenerate_profile_exits_3(tmp_path, capsys):
    out = tmp_path / "out"
    code = run_cli(
        "energy-scan",
        "--grid.n_points", "64",
        "--profile", "cos(x)",
        "--output_dir", str(out),
    )
    assert code == 3
    err = capsys.readouterr().err
    assert "numerical failure:" in err
    assert "try e.g." in err


def test_quartic_scan(tmp_path):
    out = tmp_path / "out"
    code = run_cli(
        "quartic-scan",
        "--grid.n_points", "64",
        "--profile", THREE_MODE,
        "--amplitudes", "[0.2, 0.1]",
        "--solver.dt", "0.002",
        "--solver.t_end", "0.02",
        "--solver.checkpoint_every", "1",
        "--output_dir", str(out),
    )
    assert code == 0
    header, rows = read_table(out / "quartic_scan.csv")
    assert header == ["eps", "rhs_max", "fd_max", "rel_mismatch", "fitted_exponent", "fitted_intercept"]
    assert len(rows) == 2
    assert 3.5 <= float(rows[0][4]) <= 4.5
    assert all(float(r[3]) < 1e-2 for r in rows)


def test_lifespan_scan_all_censored(tmp_path):
    out = tmp_path / "out"
    code = run_cli(
        "lifespan-scan",
        "--grid.n_points", "64",
        "--amplitudes", "[0.1, 0.05]",
        "--solver.t_end", "0.05",
        "--solver.dt", "0.01",
        "--output_dir", str(out),
    )
    assert code == 0
    header, rows = read_table(out / "lifespan_scan.csv")
    assert header == ["eps", "lifespan", "censored", "reason", "fitted_exponent", "fitted_intercept"]
    for row in rows:
        assert row[2] == "1"
        assert row[3] == ""
        assert row[4] == "" and row[5] == ""  # no fit from censored runs


def test_lifespan_scan_with_breakdowns(tmp_path):
    out = tmp_path / "out"
    code = run_cli(
        "lifespan-scan",
        "--grid.n_points", "256",
        "--amplitudes", "[0.5, 0.45]",
        "--solver.dt", "0.003",
        "--solver.t_end", "3.0",
        "--solver.tail_fraction_limit", "1e-10",
        "--output_dir", str(out),
    )
    assert code == 0
    header, rows = read_table(out / "lifespan_scan.csv")
    assert all(r[2] == "0" for r in rows)
    assert all(r[3] in {"gradient", "tail"} for r in rows)
    assert rows[0][4] != ""  # two uncensored points give a fit
    # smaller amplitude survives longer
    assert float(rows[1][1]) > float(rows[0][1])


def test_commutator_scan(tmp_path):
    out = tmp_path / "out"
    code = run_cli("commutator-scan", "--samples", "200", "--output_dir", str(out))
    assert code == 0
    header, rows = read_table(out / "commutator_scan.csv")
    assert [r[0] for r in rows] == ["commutator_n_bound", "commutator_u_bound"]
    assert all(float(r[2]) > 0 for r in rows)


def test_runs_are_byte_deterministic(tmp_path):
    out = tmp_path / "out"
    args = (
        "identity-check",
        "--grid.n_points", "64",
        "--samples", "2",
        "--seed", "11",
        "--output_dir", str(out),
    )
    assert run_cli(*args) == 0
    first = (out / "residuals.csv").read_bytes()
    first_meta = (out / "residuals.meta.json").read_bytes()
    assert run_cli(*args) == 0
    assert (out / "residuals.csv").read_bytes() == first
    assert (out / "residuals.meta.json").read_bytes() == first_meta


def test_custom_symbol_end_to_end(tmp_path):
    out = tmp_path / "out"
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text(
        json.dumps(
            {
                "symbol": {
                    "name": "custom",
                    "p": "1/sqrt(1+xi**2)",
                    "alpha": -1.0,
                    "j_star": 1,
                },
                "samples": 400,
                "output_dir": str(out),
            }
        )
    )
    code = run_cli("verify-symbol", "--config", str(cfg_file))
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is True
