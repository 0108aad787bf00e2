import json
from pathlib import Path

import numpy as np
import pytest

from stgneiting import catalog
from stgneiting.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, main, run
from stgneiting.fields import FieldRealization
from stgneiting.io import ConfigError, load_config, parse_config, read_raw, sha256_file, write_field
from stgneiting.model import GridSpec, SpaceTimePointSet
from stgneiting.simulation import Method, simulate_field
from stgneiting.spectral import DEFAULT_EPS

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

MODEL = """
[model]
k = 2
[model.mixture]
kind = "dirac"
r = 0.01
[model.variogram]
family = "{family}"
{params}
"""

SMALL_GRID = """
[grid]
shape = [5, 4]
t_mesh = 0.2
t_count = 3
"""


def cfg(family="linear", params="b = 1.0", extra="", grid=SMALL_GRID):
    return MODEL.format(family=family, params=params) + extra + grid


def errors_of(text):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    return exc.value.errors


class TestParseConfig:
    def test_minimal_defaults(self):
        c = load_config(CONFIGS / "minimal.toml")
        assert c.model == catalog.fig1()
        assert c.method is Method.SPECTRAL
        assert (c.p, c.seed, c.eps, c.n_realizations) == (5000, 0, DEFAULT_EPS, 1)
        assert (c.format, c.out_dir, c.prefix, c.threads) == ("raw", "out", "field", 1)
        assert c.grid.shape == (300, 200) and c.grid.mesh == (1.0, 1.0) and c.grid.origin == (0.0, 0.0)
        assert c.instants is None

    @pytest.mark.parametrize("name", ["fig1", "fig2", "fig3", "fig4", "fig5", "validation_fig3"])
    def test_shipped_configs_parse(self, name):
        c = load_config(CONFIGS / f"{name}.toml")
        assert c.model.k == 2

    def test_fig4_uses_substitution(self):
        c = load_config(CONFIGS / "fig4.toml")
        assert c.method is Method.SUBSTITUTION
        assert len(c.instants) == 6

    def test_alpha_out_of_range(self):
        errs = errors_of(cfg("cauchy_class", "a = 1.0\nalpha = 2.5\nbeta = 0.5"))
        assert any("alpha=2.5" in e and "(0, 2]" in e for e in errs)

    def test_substitution_needs_instants(self):
        errs = errors_of(cfg(extra='[simulation]\nmethod = "substitution"\n'))
        assert any("instants" in e and "required" in e for e in errs)

    def test_point_time_missing_from_instants(self):
        errs = errors_of(cfg(extra='[simulation]\nmethod = "substitution"\ninstants = [0.0, 0.2]\n'))
        assert any("not among the instants" in e for e in errs)

    def test_atom_at_zero_with_spectral(self):
        text = MODEL.replace('kind = "dirac"\nr = 0.01',
                             'kind = "tabulated"\natoms = [[0.0, 0.5], [0.01, 0.5]]').format(
            family="linear", params="b = 1.0") + SMALL_GRID
        errs = errors_of(text)
        assert any("atom at r = 0" in e for e in errs)
        ok = parse_config(text.replace("[grid]", '[simulation]\nmethod = "substitution"\n'
                                                 'instants = [0.0, 0.2, 0.4]\n[grid]'))
        assert ok.model.mu.has_atom_at_zero()

    def test_unknown_family(self):
        assert any("family" in e for e in errors_of(cfg("sinusoidal", "")))

    def test_errors_are_aggregated(self):
        errs = errors_of(cfg("cauchy_class", "a = -1.0\nalpha = 2.5\nbeta = 0.5",
                             '[simulation]\np = 0\n[output]\nformat = "hdf5"\n'))
        assert len(errs) >= 4

    def test_unknown_key(self):
        assert any("colour" in e for e in errors_of(cfg(extra="[output]\ncolour = 1\n")))

    def test_points_section(self):
        c = parse_config(cfg(grid="[points]\ncoords = [[0.0, 0.0, 0.0], [1.0, 2.0, 0.4]]\n"))
        assert c.grid is None and c.points.n == 2
        np.testing.assert_array_equal(c.points.times, [0.0, 0.4])

    def test_syntax_error(self):
        assert errors_of("[model\n")[0].startswith("syntax")


class TestWriteField:
    def one_point(self):
        return FieldRealization(SpaceTimePointSet([[0.5, 1.0 / 3.0]], [0.2]), np.array([-1.25e-7]),
                                {"method": "spectral", "seed": 1})

    def test_csv_one_point(self, tmp_path):
        (path,) = write_field(self.one_point(), tmp_path / "f.csv", "csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "x1,x2,t,value"
        assert len(lines) == 2
        vals = [float(v) for v in lines[1].split(",")]
        assert vals == [0.5, 1.0 / 3.0, 0.2, -1.25e-7]

    def test_raw_round_trip(self, tmp_path):
        pts = SpaceTimePointSet.from_grid(GridSpec((0.0, 0.0), (1.0, 1.0), (7, 3), 0.0, 0.2, 2))
        fld = simulate_field(catalog.fig2(), "spectral", 50, pts, 4)
        path, side = write_field(fld, tmp_path / "f.f64")
        values, meta = read_raw(path)
        assert values.tobytes() == fld.values.tobytes()
        assert meta["byte_order"] == "little" and meta["n"] == 42
        assert meta["grid"]["shape"] == [7, 3]
        assert meta["provenance"]["method"] == "spectral"
        assert json.loads(side.read_text())["provenance"]["model_hash"] == catalog.fig2().digest()

    def test_point_list_sidecar_keeps_points(self, tmp_path):
        path, _ = write_field(self.one_point(), tmp_path / "p.f64")
        _, meta = read_raw(path)
        assert meta["points"] == [[0.5, 1.0 / 3.0, 0.2]]

    def test_full_size_raw(self, tmp_path):
        pts = SpaceTimePointSet.from_grid(GridSpec((0.0, 0.0), (1.0, 1.0), (300, 200), 0.0, 0.2, 6))
        fld = FieldRealization(pts, np.zeros(pts.n), {})
        path, _ = write_field(fld, tmp_path / "big.f64")
        assert path.stat().st_size == 360_000 * 8

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            write_field(self.one_point(), tmp_path / "x", "hdf5")


def write_cfg(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestRun:
    def test_run_writes_fields_and_manifest(self, tmp_path):
        c = parse_config(cfg(extra=f'[simulation]\np = 20\nrealizations = 3\n[output]\ndir = "{tmp_path}"\n'))
        res = run(c)
        assert [p.name for p in res.files if p.suffix == ".f64"] == ["field_0000.f64", "field_0001.f64",
                                                                     "field_0002.f64"]
        man = json.loads(res.manifest.read_text())
        assert man["model_hash"] == c.model.digest()
        assert {f["name"]: f["sha256"] for f in man["files"]}["field_0001.f64"] == \
            sha256_file(tmp_path / "field_0001.f64")

    def test_threads_do_not_change_output(self, tmp_path):
        text = cfg(extra='[simulation]\np = 30\nrealizations = 4\n')
        a = run(parse_config(text + f'[output]\ndir = "{tmp_path / "a"}"\n'), threads=1)
        b = run(parse_config(text + f'[output]\ndir = "{tmp_path / "b"}"\n'), threads=3)
        for fa, fb in zip(a.files, b.files):
            assert fa.read_bytes() == fb.read_bytes()

    def test_csv_output(self, tmp_path):
        c = parse_config(cfg(extra=f'[simulation]\np = 5\n[output]\ndir = "{tmp_path}"\nformat = "csv"\n'))
        (path,) = run(c).files
        assert len(path.read_text().splitlines()) == 1 + 60


class TestCli:
    def test_simulate_exit_ok_and_deterministic(self, tmp_path, capsys):
        conf = write_cfg(tmp_path, cfg(extra="[simulation]\np = 40\nseed = 9\n"))
        assert main(["simulate", "--config", str(conf), "--out", str(tmp_path / "a")]) == EXIT_OK
        assert main(["simulate", "--config", str(conf), "--out", str(tmp_path / "b")]) == EXIT_OK
        assert (tmp_path / "a/field_0000.f64").read_bytes() == (tmp_path / "b/field_0000.f64").read_bytes()
        assert (tmp_path / "a/manifest.json").read_bytes() == (tmp_path / "b/manifest.json").read_bytes()

    def test_seed_override(self, tmp_path):
        conf = write_cfg(tmp_path, cfg(extra="[simulation]\np = 40\nseed = 9\n"))
        main(["simulate", "--config", str(conf), "--out", str(tmp_path / "a")])
        main(["simulate", "--config", str(conf), "--out", str(tmp_path / "b"), "--seed", "10"])
        assert (tmp_path / "a/field_0000.f64").read_bytes() != (tmp_path / "b/field_0000.f64").read_bytes()

    def test_config_error_exit_and_no_output(self, tmp_path, capsys):
        out = tmp_path / "never"
        conf = write_cfg(tmp_path, cfg("cauchy_class", "a = 1.0\nalpha = 2.5\nbeta = 0.5",
                                       f'[output]\ndir = "{out}"\n'))
        assert main(["simulate", "--config", str(conf)]) == EXIT_CONFIG
        assert "alpha=2.5" in capsys.readouterr().err
        assert not out.exists()

    def test_bad_override(self, tmp_path):
        conf = write_cfg(tmp_path, cfg())
        assert main(["simulate", "--config", str(conf), "--realizations", "0"]) == EXIT_CONFIG

    def test_missing_config_file(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "absent.toml")]) == EXIT_IO

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        conf = write_cfg(tmp_path, cfg(extra="[simulation]\np = 5\n"))
        assert main(["simulate", "--config", str(conf), "--out", str(blocker / "sub")]) == EXIT_IO

    def test_dimple(self, capsys):
        assert main(["dimple", "--model", "fig3", "--h", "10", "10"]) == EXIT_OK
        assert "has_dimple=true" in capsys.readouterr().out
        assert main(["dimple", "--model", "fig3", "--h", "0.1", "0.1"]) == EXIT_OK
        assert "has_dimple=false" in capsys.readouterr().out

    def test_dimple_unknown_model(self):
        assert main(["dimple", "--model", "fig99", "--h", "1", "1"]) == EXIT_CONFIG

    def test_validate_small(self, tmp_path, capsys):
        conf = write_cfg(tmp_path, MODEL.format(family="cauchy_class", params="a = 1.0\nalpha = 1.0\nbeta = 0.5")
                         + "[simulation]\np = 300\nrealizations = 5\n"
                         + "[grid]\nshape = [25, 25]\nt_mesh = 0.2\nt_count = 21\n")
        code = main(["validate", "--config", str(conf), "--out", str(tmp_path / "v")])
        assert code in (0, 1)
        header = (tmp_path / "v/variogram_spectral.csv").read_text().splitlines()[0]
        assert header.startswith("curve,lag,empirical_mean")
