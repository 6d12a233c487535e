import ast
import csv

import pytest

from monopole_lab.cli import (
    COMMANDS,
    SCHEMA,
    UsageError,
    build_config,
    load_config,
    main,
    parse_overrides,
)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def read_manifest(path):
    values = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        key, _, raw = line.partition(" = ")
        values[key] = raw
    return values


def test_defaults_cover_every_command():
    for command in COMMANDS:
        config = build_config(command)
        assert config.command == command
        assert dict(config.items())["n"] == SCHEMA["n"][1]


def test_load_config_parses_comments_and_blank_lines(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# grid\nn = 16\n\nsteps=12  # inline comment\namplitude = 0.05\n",
        encoding="utf-8",
    )
    values = load_config(str(path))
    assert values == {"n": "16", "steps": "12", "amplitude": "0.05"}
    config = build_config("simulate", file_values=values)
    assert config.n == 16 and config.steps == 12 and config.amplitude == 0.05


def test_empty_config_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("", encoding="utf-8")
    config = build_config("simulate", file_values=load_config(str(path)))
    assert dict(config.items()) == dict(build_config("simulate").items())


def test_missing_config_file_is_usage_error():
    with pytest.raises(UsageError, match="not found"):
        load_config("/nonexistent/path.cfg")


def test_config_line_without_equals_rejected(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("steps\n", encoding="utf-8")
    with pytest.raises(UsageError, match="expected key = value"):
        load_config(str(path))


def test_unknown_key_rejected_with_valid_key_list():
    with pytest.raises(UsageError) as err:
        build_config("simulate", overrides={"bogus": "3"})
    message = str(err.value)
    assert "bogus" in message
    for key in SCHEMA:
        assert key in message


def test_override_precedence_flags_beat_file_beat_defaults(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("seed = 5\nsteps = 30\n", encoding="utf-8")
    config = build_config(
        "simulate",
        file_values=load_config(str(path)),
        overrides={"steps": "40"},
        seed=9,
    )
    assert config.seed == 9
    assert config.steps == 40


def test_parse_overrides_requires_equals():
    with pytest.raises(UsageError, match="key=value"):
        parse_overrides(["steps"])


def test_unusable_values_exit_2(tmp_path, capsys):
    assert main(["simulate", "--out", str(tmp_path / "a"), "n=7"]) == 2
    assert "power of two" in capsys.readouterr().err
    assert main(["simulate", "--out", str(tmp_path / "b"), "steps=soon"]) == 2
    assert "invalid value" in capsys.readouterr().err
    assert main(["simulate", "--out", str(tmp_path / "c"), "bogus=1"]) == 2
    assert "valid keys" in capsys.readouterr().err


def test_unknown_flag_exits_2(tmp_path, capsys):
    assert main(["simulate", "--out", str(tmp_path), "--sed", "3"]) == 2
    assert "unrecognized" in capsys.readouterr().err


def test_simulate_writes_artifacts_and_zero_data_stays_zero(tmp_path, capsys):
    out = tmp_path / "run"
    status = main(
        [
            "simulate",
            "--out",
            str(out),
            "--seed",
            "4",
            "n=16",
            "steps=10",
            "sample_every=5",
            "amplitude=0.0",
        ]
    )
    assert status == 0
    assert "finite_evolution: PASS" in capsys.readouterr().out
    rows = read_csv(out / "simulate.csv")
    assert rows[0] == ["step", "time", "max_abs_u", "max_abs_v"]
    assert len(rows) == 4
    for row in rows[1:]:
        assert float(row[2]) == 0.0 and float(row[3]) == 0.0
    manifest = read_manifest(out / "manifest.txt")
    assert manifest["command"] == "simulate"
    assert manifest["status"] == "0"
    assert manifest["check_finite_evolution"].startswith("PASS")
    ast.parse((out / "plot.py").read_text(encoding="utf-8"))


def test_identical_config_and_seed_reproduce_identical_bytes(tmp_path):
    args = ["residuals", "--seed", "11", "n=16", "steps=10", "sample_every=5"]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    assert (out_a / "residuals.csv").read_bytes() == (out_b / "residuals.csv").read_bytes()


def test_residuals_csv_columns_and_constraint_check(tmp_path):
    out = tmp_path / "run"
    assert main(["residuals", "--out", str(out), "n=16", "steps=10"]) == 0
    rows = read_csv(out / "residuals.csv")
    assert rows[0] == ["time", "lorenz", "row_phi", "row_a1", "row_a2"]
    assert all(float(row[1]) <= 1e-8 for row in rows[1:])


def test_verify_null_small_sweep(tmp_path):
    out = tmp_path / "run"
    assert main(["verify-null", "--out", str(out), "--seed", "0", "null_samples=2000"]) == 0
    env = dict(read_csv(out / "null_envelopes.csv")[1:])
    assert float(env["c_sym"]) <= 0.5 + 1e-6
    paths = read_csv(out / "null_paths.csv")
    assert paths[0] == ["path", "base_angle", "theta", "symbol_norm"]
    assert len(paths) == 1 + 10 * 11


def test_verify_cone_default_run(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["verify-cone", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "plus_kernel_bound: PASS" in printed
    assert "minus_kernel_bound: PASS" in printed
    plus = read_csv(out / "cone_plus.csv")
    assert plus[0][0] == "tau_over_mag"
    values = [float(row[3]) for row in plus[1:]]
    assert all(v > 0 for v in values)
    manifest = read_manifest(out / "manifest.txt")
    assert manifest["status"] == "0"


def test_verify_norms_small_run(tmp_path):
    out = tmp_path / "run"
    assert main(["verify-norms", "--out", str(out), "--seed", "2", "n=16", "norm_tuples=3"]) == 0
    rows = read_csv(out / "norms.csv")
    assert rows[0][:4] == ["tuple", "p", "s", "b"]
    assert all(float(row[8]) <= 1e-6 for row in rows[1:])


def test_scaling_run_matches_expected_exponents(tmp_path):
    out = tmp_path / "run"
    assert main(["scaling", "--out", str(out), "n=16"]) == 0
    rows = read_csv(out / "scaling.csv")
    assert len(rows) == 7
    assert all(abs(float(row[5])) <= 1e-3 for row in rows[1:])


def test_probe_bilinear_small_run(tmp_path):
    out = tmp_path / "run"
    status = main(
        ["probe-bilinear", "--out", str(out), "--seed", "3", "n=16", "probe_samples=2", "n_active=16"]
    )
    assert status == 0
    rows = read_csv(out / "probe.csv")
    assert rows[0] == ["eps", "p", "sign", "sample", "lhs", "rhs", "ratio"]
    assert len(rows) == 1 + 3 * 2 * 2
    assert all(float(row[6]) > 0 for row in rows[1:])


def test_manifest_records_versions_and_config_echo(tmp_path):
    out = tmp_path / "run"
    assert main(["scaling", "--out", str(out), "--seed", "6", "n=16"]) == 0
    manifest = read_manifest(out / "manifest.txt")
    for key in ("package_version", "numpy_version", "scipy_version", "python_version"):
        assert manifest[key]
    assert manifest["seed"] == "6"
    assert float(manifest["wall_time_s"]) >= 0.0
    assert manifest["check_scaling_exponent"].startswith("PASS")
