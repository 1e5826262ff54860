import json
import math

import numpy as np
import pytest

from qcomp import Field1D, NO_SOURCE, SolverConfig, WeightedInterval, catalog, solve_parabolic
from qcomp.cli import (
    bundled_configs,
    dumps17,
    emit_plot_data,
    list_scenarios,
    load_config,
    main,
)
from qcomp.errors import ConfigError
from qcomp.verify import modulus_of_continuity

TWO_POINT = {
    "id": "tp-model",
    "kind": "two_point",
    "space": {"length": 2.0, "m": 64,
              "density": {"kind": "model", "kappa": -1, "lam": 0, "N": 3, "shift": 1.0}},
    "curvature": {"kappa": -1, "lam": 0, "N": 3},
}

MC_SMALL = {
    "id": "mc-small",
    "kind": "mc_dirichlet",
    "space": {"length": math.pi, "m": 32},
    "operator": {"name": "laplacian"},
    "curvature": {"kappa": 0, "lam": 0, "N": 3},
    "solver": {"t_end": 0.2},
}


def write_config(tmp_path, scenarios, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"schema_version": 1, "scenarios": scenarios}))
    return path


def read_summary(out):
    return json.loads((out / "summary.json").read_text())


class TestConfig:
    def test_bundled_files_validate(self):
        names = {p.name for p in bundled_configs()}
        assert {"estimates.json", "sharpness.json", "negative_controls.json"} <= names
        for p in bundled_configs():
            assert load_config(p)["schema_version"] == 1

    def test_unknown_field_names_its_path(self, tmp_path):
        bad = dict(TWO_POINT, space=dict(TWO_POINT["space"], lenght=2.0))
        path = write_config(tmp_path, [bad])
        with pytest.raises(ConfigError) as info:
            load_config(path)
        assert str(path) in str(info.value) and "lenght" in str(info.value)
        assert info.value.path == "scenarios/0/space"

    def test_duplicate_ids_rejected(self, tmp_path):
        path = write_config(tmp_path, [TWO_POINT, TWO_POINT])
        with pytest.raises(ConfigError, match="duplicate"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nope.json")

    def test_cfl_bound_enforced_by_schema(self, tmp_path):
        bad = dict(MC_SMALL, solver={"cfl": 0.95})
        with pytest.raises(ConfigError):
            load_config(write_config(tmp_path, [bad]))


class TestRun:
    def test_empty_config(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", str(write_config(tmp_path, [])), "--out", str(out)]) == 0
        summary = read_summary(out)
        assert summary["scenarios"] == [] and summary["all_ok"] is True

    def test_config_error_exit_code(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2
        assert "missing.json" in capsys.readouterr().err

    def test_outputs_are_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, [TWO_POINT, MC_SMALL])
        outs = [tmp_path / "a", tmp_path / "b"]
        for out in outs:
            assert main(["run", str(cfg), "--out", str(out), "--seed", "3"]) == 0
        files = sorted(p.name for p in outs[0].iterdir())
        assert "mc-small_modulus.dat" in files and "tp-model.json" in files
        for name in files:
            if name == "summary.json":
                continue
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name

    def test_env_overrides_out(self, tmp_path, monkeypatch):
        target = tmp_path / "from_env"
        monkeypatch.setenv("QCOMP_OUT", str(target))
        cfg = write_config(tmp_path, [TWO_POINT])
        assert main(["run", str(cfg), "--out", str(tmp_path / "ignored")]) == 0
        assert (target / "summary.json").exists()
        assert not (tmp_path / "ignored").exists()

    def test_error_is_isolated(self, tmp_path):
        broken = {"id": "decay-neumann", "kind": "decay",
                  "space": {"length": 2.0, "m": 32}, "operator": {"name": "laplacian"},
                  "curvature": {"kappa": 0, "lam": 0, "N": 3},
                  "options": {"bc": "neumann_both"}}
        out = tmp_path / "out"
        assert main(["run", str(write_config(tmp_path, [broken, TWO_POINT])), "--out", str(out)]) == 1
        by_id = {s["id"]: s for s in read_summary(out)["scenarios"]}
        assert by_id["decay-neumann"]["outcome"] == "error"
        assert "Dirichlet" in by_id["decay-neumann"]["error"]
        assert by_id["tp-model"]["outcome"] == "pass"

    def test_rate_for_nonlinear_degree_is_recorded_only(self, tmp_path):
        sc = {"id": "rate-p3", "kind": "decay_rate", "space": {"length": 2.0, "m": 32},
              "operator": {"name": "p_laplacian", "params": {"p": 3}},
              "curvature": {"kappa": 0, "lam": 0, "N": 3}, "solver": {"t_end": 0.2}}
        out = tmp_path / "out"
        assert main(["run", str(write_config(tmp_path, [sc])), "--out", str(out)]) == 0
        report = json.loads((out / "rate-p3.json").read_text())
        assert report["checks"] == [] and report["metrics"]["asserted"] is False
        assert report["metrics"]["rate"] > 0

    def test_control_passing_is_flagged(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, [dict(TWO_POINT, control=True)])
        assert main(["run", str(cfg), "--out", str(out)]) == 1
        assert read_summary(out)["scenarios"][0]["outcome"] == "unexpected-pass"

    def test_parallel_matches_serial(self, tmp_path):
        cfg = write_config(tmp_path, [TWO_POINT, MC_SMALL])
        main(["run", str(cfg), "--out", str(tmp_path / "s")])
        main(["run", str(cfg), "--out", str(tmp_path / "p"), "--jobs", "2"])
        for name in ("tp-model.json", "mc-small.json", "summary.csv"):
            assert (tmp_path / "s" / name).read_bytes() == (tmp_path / "p" / name).read_bytes()


@pytest.mark.slow
class TestBundled:
    def test_sharpness(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "sharpness.json", "--out", str(out)]) == 0
        scen = read_summary(out)["scenarios"]
        assert len(scen) >= 12
        assert max(s["metrics"]["max_abs_rel_gap"] for s in scen) <= 1e-6

    def test_estimates(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "estimates.json", "--out", str(out)]) == 0
        assert {s["outcome"] for s in read_summary(out)["scenarios"]} == {"pass"}

    def test_negative_controls(self, tmp_path):
        out = tmp_path / "out"
        assert main(["run", "negative_controls.json", "--out", str(out)]) == 0
        assert {s["outcome"] for s in read_summary(out)["scenarios"]} == {"expected-fail"}


def test_list_covers_bundled(capsys):
    rows = list_scenarios()
    ids = {r[0] for r in rows}
    assert {"thm1.1-mc-dirichlet", "thm5.2-neumann-eigen-p", "thm9.1-elliptic-gradient"} <= ids
    assert main(["list"]) == 0
    assert "control-mc-flipped-drift" in capsys.readouterr().out


class TestPlotData:
    def read(self, path):
        lines = path.read_text().splitlines()
        return lines[0], np.loadtxt(path)

    def test_modulus_curve(self, tmp_path):
        sp = WeightedInterval(math.pi, None, 40)
        mc = modulus_of_continuity(Field1D.from_function(sp, np.sin))
        header, data = self.read(emit_plot_data(mc, tmp_path / "m.dat"))
        assert header == "# s omega"
        np.testing.assert_array_equal(data[:, 1], mc.omega)

    def test_sweep_mapping(self, tmp_path):
        R = np.array([0.5, 1.0, 2.0])
        header, data = self.read(emit_plot_data({"R": R, "lambda1": (math.pi / (2 * R)) ** 2},
                                                tmp_path / "sweep.dat"))
        assert header == "# R lambda1"
        np.testing.assert_array_equal(data[:, 0], R)

    def test_trajectory(self, tmp_path):
        sp = WeightedInterval(math.pi, None, 32)
        tr = solve_parabolic(Field1D.from_function(sp, np.sin), catalog("laplacian"), NO_SOURCE,
                             SolverConfig(t_end=0.1, snapshot_every=50))
        header, data = self.read(emit_plot_data(tr, tmp_path / "t.dat"))
        assert header == "# t log_sup_norm"
        np.testing.assert_array_equal(data[:, 0], tr.times)

    def test_ragged_columns_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_plot_data({"a": [1, 2], "b": [1]}, tmp_path / "x.dat")


class TestDumps17:
    def test_round_trip_exact(self):
        values = [0.1, 1 / 3, math.pi * 1e-300, -2.5e17, 5e-324]
        assert json.loads(dumps17({"v": values}))["v"] == values

    def test_non_finite(self):
        text = dumps17([math.inf, -math.inf, math.nan])
        assert text.split() == ["[", "Infinity,", "-Infinity,", "NaN", "]"]
