import json
import subprocess
import sys

import numpy as np
import pytest

from anomalylab.cli import main
from anomalylab.config import ConfigError, parse_config
from anomalylab.fields import block_initial_density
from anomalylab.io import read_snapshot, write_snapshot

MINIMAL = """
grid.n = 256
schedule.b = 2
schedule.m = 4
schedule.kind = high
schedule.continuation = hold
"""


class TestParseConfig:
    def test_minimal_with_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg.grid_n == 256 and cfg.m == 4 and cfg.kind == "high"
        assert cfg.steps_per_stage == 64  # default filled
        assert cfg.delta == 0.1

    def test_bad_grid_named(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("grid.n = 100")
        assert len(exc.value.violations) == 1
        assert "grid.n" in exc.value.violations[0]

    def test_resolution_guard_violation(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("grid.n = 256\nschedule.m = 6\nschedule.b = 5")
        assert any("lambda_7" in v for v in exc.value.violations)

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("grid.n = 256\nnot.a.key = 1")
        assert any("unknown key" in v for v in exc.value.violations)

    def test_collects_all_violations(self):
        bad = "grid.n = 100\nschedule.b = 1\nsolver.splitting = magic\nlongtime.tau = 2.0"
        with pytest.raises(ConfigError) as exc:
            parse_config(bad)
        assert len(exc.value.violations) >= 4

    def test_comments_and_blanks(self):
        cfg = parse_config("# a comment\n\ngrid.n = 64  # trailing\n")
        assert cfg.grid_n == 64

    def test_duplicate_key(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("grid.n = 64\ngrid.n = 128")
        assert any("duplicate" in v for v in exc.value.violations)

    def test_type_mismatch_names_key(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("schedule.m = four")
        assert "schedule.m" in exc.value.violations[0]


def cli(tmp_path, command, text, extra=()):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(text)
    out = tmp_path / "out"
    return main([command, "--config", str(cfg), "--out", str(out), "--quiet", *extra]), out


SMALL_RUN = """
grid.n = 64
schedule.m = 2
schedule.kind = explicit
schedule.nu = 0.0
solver.steps_per_stage = 16
"""


class TestDispatch:
    def test_run_inviscid_zero_dissipation_column(self, tmp_path):
        code, out = cli(tmp_path, "run", SMALL_RUN)
        assert code == 0
        rows = (out / "ledger.csv").read_text().splitlines()
        d_col = [float(r.split(",")[2]) for r in rows[1:]]
        assert all(d == 0.0 for d in d_col)
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert "ledger.csv" in manifest["outputs"]

    def test_report_empty_dir(self, tmp_path, capsys):
        assert main(["report", "--out", str(tmp_path / "nothing")]) == 1

    def test_guard_failure_exit_code(self, tmp_path):
        code, _ = cli(tmp_path, "run", "grid.n = 100")
        assert code == 1

    def test_rerun_byte_identical(self, tmp_path):
        text = SMALL_RUN.replace("0.0", "0.001")
        code1, out = cli(tmp_path, "run", text)
        first = (out / "ledger.csv").read_bytes()
        code2, out = cli(tmp_path, "run", text)
        assert code1 == code2 == 0
        assert (out / "ledger.csv").read_bytes() == first

    def test_block_verify(self, tmp_path):
        code, out = cli(tmp_path, "block-verify", "grid.n = 128\nschedule.m = 2")
        assert code == 0
        doc = json.loads((out / "block_00.json").read_text())
        assert doc["pass"] is True
        manifest = json.loads((out / "block-verify_manifest.json").read_text())
        assert manifest["diagnostics"]["all_pass"] is True

    def test_thm_aliases(self, tmp_path):
        text = "grid.n = 64\nschedule.m = 2\nschedule.kind = high\nsolver.steps_per_stage = 16"
        code, out = cli(tmp_path, "forward", text)
        assert code == 0
        assert (out / "thm1_manifest.json").exists()

    def test_find_nu_small(self, tmp_path):
        text = ("grid.n = 128\nschedule.m = 3\nfindnu.targets = 0.5\n"
                "solver.steps_per_stage = 16\nsolver.ledger_stride = 8")
        code, out = cli(tmp_path, "find-nu", text)
        assert code == 0
        doc = json.loads((out / "findnu.json").read_text())
        assert abs(doc[0]["achieved"] - 0.5) <= 0.02

    def test_report_reads_manifests(self, tmp_path, capsys):
        code, out = cli(tmp_path, "run", SMALL_RUN)
        assert main(["report", "--out", str(out)]) == 0


class TestSnapshotIO:
    def test_round_trip(self, tmp_path):
        f = block_initial_density(32)
        p = tmp_path / "f.bin"
        write_snapshot(p, f, 0.75)
        g, t = read_snapshot(p)
        assert t == 0.75
        assert np.array_equal(g.values, f.values)
        assert p.stat().st_size == 32 + 32 * 32 * 8

    def test_rejects_bad_magic(self, tmp_path):
        p = tmp_path / "junk.bin"
        p.write_bytes(b"NOTMAGIC" + b"\0" * 64)
        with pytest.raises(ValueError):
            read_snapshot(p)


class TestEntryPoint:
    def test_module_invocation(self):
        res = subprocess.run([sys.executable, "-m", "anomalylab.cli", "--help"],
                             capture_output=True, text=True)
        assert res.returncode == 0
        assert "block-verify" in res.stdout
