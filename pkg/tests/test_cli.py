import json

import pytest

from qfrac.cli import load_config, main
from qfrac.cli import ConfigError
from qfrac.qcore import QParams, q_gamma, q_number


def write_cfg(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


SOLVE_CFG = """
# linear test problem
q = 0.5
alpha = 0.5
zeta = 1
rhs = u
r = 10
max_iter = 150
lattice_depth = 8
"""


class TestLoadConfig:
    def test_defaults_and_comments(self, tmp_path):
        cfg = load_config(write_cfg(tmp_path, "a.cfg", SOLVE_CFG), "solve")
        assert cfg.q == 0.5
        assert cfg.p == 1.0  # default
        assert cfg.b == 1.0  # default
        assert cfg.rhs == "u"
        assert cfg.max_iter == 150

    def test_unknown_key(self, tmp_path):
        path = write_cfg(tmp_path, "a.cfg", "q = 0.5\nbogus = 1\n")
        with pytest.raises(ConfigError, match="unknown key 'bogus'"):
            load_config(path, "verify")

    def test_duplicate_key(self, tmp_path):
        path = write_cfg(tmp_path, "a.cfg", "q = 0.5\nq = 0.6\n")
        with pytest.raises(ConfigError, match="duplicate key 'q'"):
            load_config(path, "verify")

    def test_command_mismatch(self, tmp_path):
        path = write_cfg(tmp_path, "a.cfg",
                         "command = solve\nq = 0.5\nalpha = 0.5\n")
        with pytest.raises(ConfigError, match="command"):
            load_config(path, "eval")

    def test_range_validation(self, tmp_path):
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 1.5\nalpha = 0.5\nm_terms = 2\n")
        with pytest.raises(ConfigError, match="q: must lie in"):
            load_config(path, "ml")

    def test_missing_required(self, tmp_path):
        path = write_cfg(tmp_path, "a.cfg", "q = 0.5\nalpha = 0.5\n")
        with pytest.raises(ConfigError, match="required for command 'solve'"):
            load_config(path, "solve")


class TestExitCodes:
    def test_bad_config_is_2(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "a.cfg", "nonsense\n")
        assert main(["solve", "--config", path]) == 2
        assert "expected key = value" in capsys.readouterr().err

    def test_malformed_expression_is_2(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 0.5\nalpha = 0.5\nzeta = 1\nrhs = t +\n")
        assert main(["solve", "--config", path]) == 2
        assert "1:4: expected expression" in capsys.readouterr().err

    def test_max_iter_exhaustion_is_4(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 0.5\nalpha = 0.5\nzeta = 1\nrhs = u\n"
                         "r = 10\nmax_iter = 2\n")
        out = str(tmp_path / "sol.csv")
        assert main(["solve", "--config", path, "--out", out]) == 4
        assert "did not converge" in capsys.readouterr().err

    def test_trust_region_exit_is_5(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 0.5\nalpha = 0.5\nzeta = 1\nrhs = u\n"
                         "r = 0.05\nmax_iter = 50\n")
        assert main(["solve", "--config", path]) == 5
        assert "trust-region exit" in capsys.readouterr().err

    def test_series_budget_exhaustion_is_3(self, tmp_path, capsys,
                                           monkeypatch):
        monkeypatch.setenv("QFRAC_MAX_TERMS", "5")
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 0.5\nalpha = 0.5\nzeta = 1\nrhs = u\nr = 10\n")
        assert main(["solve", "--config", path]) == 3
        assert "non-convergence" in capsys.readouterr().err


class TestEval:
    def test_integral_of_one_matches_closed_form(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 0.5\nalpha = 0.5\noperator = J\n"
                         "function = 1\nlattice_depth = 4\n")
        assert main(["eval", "--config", path, "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        xs = payload["table"]["x"]
        vals = payload["table"]["value"]
        for x, v in zip(xs, vals):
            want = x**0.5 / q_gamma(1.5, 0.5)
            assert v == pytest.approx(want, rel=1e-10)

    def test_caputo_kills_constants(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 0.5\nalpha = 0.5\noperator = caputo\n"
                         "function = 1\nlattice_depth = 4\n")
        assert main(["eval", "--config", path, "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["table"]["value"] == pytest.approx([0.0] * 4,
                                                          abs=1e-12)

    def test_expression_sees_config_constants(self, tmp_path, capsys):
        # alpha is bound inside the expression language
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 0.5\nalpha = 0.5\noperator = J\n"
                         "function = alpha*0 + 1\nlattice_depth = 2\n")
        assert main(["eval", "--config", path, "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["table"]["value"][0] == pytest.approx(
            1.0 / q_gamma(1.5, 0.5), rel=1e-10)

    def test_csv_has_full_precision(self, tmp_path):
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 0.5\nalpha = 0.5\noperator = J\n"
                         "function = 1\nlattice_depth = 3\n")
        out = str(tmp_path / "t.csv")
        assert main(["eval", "--config", path, "--out", out]) == 0
        lines = open(out).read().strip().splitlines()
        assert lines[0] == "x,value"
        assert len(lines) == 4
        x0 = float(lines[1].split(",")[0])
        assert x0 == 1.0
        # round-trip through repr must be exact at 17 significant digits
        v0 = lines[1].split(",")[1]
        assert float(v0) == pytest.approx(1.0 / q_gamma(1.5, 0.5), rel=1e-15)


class TestMl:
    def test_zero_terms_is_all_ones(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 0.5\nalpha = 0.5\nm_terms = 0\n"
                         "lattice_depth = 3\n")
        assert main(["ml", "--config", path, "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["table"]["value"] == [1.0, 1.0, 1.0]

    def test_one_term_manual(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "a.cfg",
                         "q = 0.5\nalpha = 0.5\nm_terms = 1\n"
                         "lattice_depth = 1\n")
        assert main(["ml", "--config", path, "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        want = 1.0 + 1.0 / q_gamma(1.5, 0.5)
        assert payload["table"]["value"][0] == pytest.approx(want, rel=1e-13)


class TestSolve:
    def test_linear_solution_matches_ml(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "s.cfg", SOLVE_CFG)
        assert main(["solve", "--config", path, "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["converged"] is True
        ml_path = write_cfg(tmp_path, "m.cfg",
                            "q = 0.5\nalpha = 0.5\nm_terms = 120\n"
                            "lattice_depth = 8\n")
        assert main(["ml", "--config", ml_path, "--format", "json"]) == 0
        ml_payload = json.loads(capsys.readouterr().out)
        for u, e in zip(payload["table"]["u"], ml_payload["table"]["value"]):
            assert u == pytest.approx(e, abs=1e-8)

    def test_csv_writes_report_sidecar(self, tmp_path):
        path = write_cfg(tmp_path, "s.cfg", SOLVE_CFG)
        out = str(tmp_path / "sol.csv")
        assert main(["solve", "--config", path, "--out", out]) == 0
        assert open(out).readline().strip() == "x,u"
        report = json.loads(open(out + ".report.json").read())
        assert report["converged"] is True
        assert "table" not in report

    def test_deterministic_output(self, tmp_path):
        path = write_cfg(tmp_path, "s.cfg", SOLVE_CFG)
        out1 = str(tmp_path / "a.json")
        out2 = str(tmp_path / "b.json")
        assert main(["solve", "--config", path, "--out", out1,
                     "--format", "json"]) == 0
        assert main(["solve", "--config", path, "--out", out2,
                     "--format", "json"]) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()


class TestVerify:
    def test_restricted_registry_passes(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "v.cfg", "q = 0.5\n")
        assert main(["verify", "--config", path]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert all(r["passed"] for r in payload["identity_results"])
        assert len(payload["identity_results"]) == 7

    def test_injected_fault_is_1(self, tmp_path, capsys):
        path = write_cfg(tmp_path, "v.cfg", "q = 0.5\np = 2\n")
        code = main(["verify", "--config", path,
                     "--inject-fault", "beta_integral_lemma"])
        captured = capsys.readouterr()
        assert code == 1
        assert "failing identities: beta_integral_lemma" in captured.err
        payload = json.loads(captured.out)
        flags = {r["name"]: r["passed"] for r in payload["identity_results"]}
        assert flags["beta_integral_lemma"] is False
        assert flags["inversion_identities"] is True
