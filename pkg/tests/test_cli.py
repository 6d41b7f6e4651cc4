import contextlib
import copy
import io
import json
import tempfile
import unittest
from pathlib import Path

from py_chemostat import find_hopf
from py_chemostat.cli import main
from py_chemostat.cli._config import parse_config, read_document, with_overrides
from py_chemostat.cli._verify import _run_one, all_passed, run_checks
from py_chemostat.errors import ConfigError, ConvergenceError
from tests.reference_cases.parameter_sets import CONFIG_DIR


def _run(*argv: str) -> tuple[int, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue() + err.getvalue()


class TestParseConfig(unittest.TestCase):
    def setUp(self):
        self.document = read_document(CONFIG_DIR / "holling2_equal.json")

    def _field_error(self, document) -> str:
        with self.assertRaises(ConfigError) as ctx:
            parse_config(document)
        return ctx.exception.field

    def test_shipped_config(self):
        config = parse_config(self.document)
        self.assertEqual(config.parameters.mu, 0.65)
        self.assertEqual(config.parameters.D2, 1.0)
        self.assertEqual(config.options.bracket, (0.5, 0.7))
        self.assertEqual(config.options.seed, 7)
        self.assertIsNone(config.mu_range)

    def test_before_configs_straddle_crossing(self):
        for stem in ("holling2_equal", "holling2_perturbed", "holling3_perturbed"):
            with self.subTest(config=stem):
                after = parse_config(read_document(CONFIG_DIR / f"{stem}.json"))
                before = parse_config(read_document(CONFIG_DIR / f"{stem}_before.json"))
                self.assertEqual(before.options, after.options)
                certificate = find_hopf(after.parameters, after.options.bracket)
                self.assertLess(before.parameters.mu, certificate.mu_c2)
                self.assertGreater(after.parameters.mu, certificate.mu_c2)

    def test_field_paths(self):
        cases = {
            "parameters.D": ("parameters", "D", -1.0),
            "parameters.f1": ("parameters", "f1", 3.0),
            "parameters.f1.kind": ("parameters", "f1", {"kind": "ivlev", "m": 1.0, "alpha": 1.0}),
            "parameters.f1.m": ("parameters", "f1", {"kind": "holling2", "m": -1.0, "alpha": 0.2}),
            "parameters.f2.alpha": ("parameters", "f2", {"kind": "holling3", "m": 2.0}),
            "parameters.f2.beta": ("parameters", "f2", {"kind": "holling2", "m": 2.0, "alpha": 0.5,
                                                       "beta": 1.0}),
            "options.foo": ("options", "foo", 1),
            "options.bracket": ("options", "bracket", [0.7, 0.5]),
            "options.workers": ("options", "workers", 0),
        }
        for expected, (block, key, value) in cases.items():
            document = copy.deepcopy(self.document)
            document[block][key] = value
            with self.subTest(field=expected):
                self.assertEqual(self._field_error(document), expected)

    def test_missing_parameter(self):
        document = copy.deepcopy(self.document)
        del document["parameters"]["gamma1"]
        self.assertEqual(self._field_error(document), "parameters.gamma1")

    def test_mu_range(self):
        document = copy.deepcopy(self.document)
        document["parameters"]["mu"] = {"lo": 0.4, "hi": 0.8, "n": 5}
        config = parse_config(document)
        self.assertEqual(config.require_range().n, 5)
        self.assertEqual(config.parameters.mu, 0.4)
        with self.assertRaises(ConfigError):
            config.scalar_parameters()

        document["parameters"]["mu"] = {"lo": 0.8, "hi": 0.4, "n": 5}
        self.assertEqual(self._field_error(document), "parameters.mu")

    def test_overrides(self):
        config = with_overrides(parse_config(self.document), rel_tol=1e-6, seed=None)
        self.assertEqual(config.options.rel_tol, 1e-6)
        self.assertEqual(config.options.seed, 7)
        with self.assertRaises(ConfigError):
            with_overrides(config, t_end=-1.0)


class TestCommands(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp_dir = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def _config(self, name: str) -> str:
        return str(CONFIG_DIR / name)

    def _write_config(self, document: dict) -> str:
        path = self.tmp_dir / "config.json"
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    def test_analyze(self):
        code, _ = _run("analyze", "--config", self._config("holling2_equal.json"),
                       "--out", str(self.tmp_dir))
        self.assertEqual(code, 0)
        report = json.loads((self.tmp_dir / "analyze.json").read_text(encoding="utf-8"))
        self.assertEqual([e["name"] for e in report["equilibria"]], ["E0", "E1", "E2"])
        self.assertEqual(report["equilibria"][0]["classification"], "unstable")
        self.assertAlmostEqual(report["mu_c1"], 0.325, places=12)

    def test_analyze_washout_only(self):
        document = read_document(CONFIG_DIR / "holling2_equal.json")
        document["parameters"]["mu"] = 0.1
        code, _ = _run("analyze", "--config", self._write_config(document),
                       "--out", str(self.tmp_dir))
        self.assertEqual(code, 0)
        report = json.loads((self.tmp_dir / "analyze.json").read_text(encoding="utf-8"))
        self.assertEqual(len(report["equilibria"]), 1)
        self.assertEqual(report["equilibria"][0]["classification"], "stable")

    def test_scan(self):
        code, _ = _run("scan", "--config", self._config("holling2_equal_scan.json"),
                       "--out", str(self.tmp_dir))
        self.assertEqual(code, 0)
        lines = (self.tmp_dir / "scan.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(lines[0], "mu,N,Z,re_pair,im_pair,alpha,discriminant,classification")
        self.assertGreater(len(lines), 50)

    def test_scan_needs_range(self):
        code, output = _run("scan", "--config", self._config("holling2_equal.json"),
                            "--out", str(self.tmp_dir))
        self.assertEqual(code, 1)
        self.assertIn("error: parameters.mu", output)

    def test_hopf(self):
        code, output = _run("hopf", "--config", self._config("holling2_equal.json"),
                            "--out", str(self.tmp_dir))
        self.assertEqual(code, 0)
        self.assertIn("mu_c2=", output)
        certificate = json.loads((self.tmp_dir / "hopf.json").read_text(encoding="utf-8"))
        self.assertGreater(certificate["mu_c2"], 0.55)
        self.assertLess(certificate["mu_c2"], 0.65)

    def test_simulate(self):
        code, _ = _run("simulate", "--config", self._config("holling2_equal.json"),
                       "--out", str(self.tmp_dir), "--t-end", "20")
        self.assertEqual(code, 0)
        lines = (self.tmp_dir / "trajectory.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(lines[0], "t,N,P,Z")
        self.assertEqual(len(lines), 1 + 401)
        cycle = json.loads((self.tmp_dir / "cycle.json").read_text(encoding="utf-8"))
        self.assertIn(cycle["cycle"]["classification"],
                      {"equilibrium", "limit_cycle", "undetermined"})

    def test_verify_rejects_decreasing_response(self):
        code, output = _run("verify", "--config", self._config("holling2_decreasing.json"),
                            "--out", str(self.tmp_dir))
        self.assertEqual(code, 1)
        self.assertIn("FAIL", output)
        report = json.loads((self.tmp_dir / "verify.json").read_text(encoding="utf-8"))
        self.assertFalse(report["passed"])
        self.assertEqual(report["checks"][0]["name"], "parameters")

    def test_verify_passes_on_shipped_config(self):
        code, output = _run("verify", "--config", self._config("holling2_equal.json"),
                            "--out", str(self.tmp_dir))
        self.assertEqual(code, 0, output)
        report = json.loads((self.tmp_dir / "verify.json").read_text(encoding="utf-8"))
        self.assertTrue(report["passed"])
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        self.assertEqual(failed, [])

    def test_simulate_either_side_of_crossing(self):
        cases = {
            "holling2_equal_before.json": "equilibrium",
            "holling2_equal.json": "limit_cycle",
        }
        for name, expected in cases.items():
            out = self.tmp_dir / name
            with self.subTest(config=name):
                code, _ = _run("simulate", "--config", self._config(name), "--out", str(out))
                self.assertEqual(code, 0)
                cycle = json.loads((out / "cycle.json").read_text(encoding="utf-8"))
                self.assertEqual(cycle["cycle"]["classification"], expected)

    def test_reruns_are_byte_identical(self):
        runs = [
            ("analyze", "holling2_equal.json", "analyze.json"),
            ("scan", "holling2_equal_scan.json", "scan.csv"),
            ("hopf", "holling2_equal.json", "hopf.json"),
        ]
        for command, config, artifact in runs:
            with self.subTest(command=command):
                written = []
                for attempt in ("first", "second"):
                    out = self.tmp_dir / command / attempt
                    code, _ = _run(command, "--config", self._config(config), "--out", str(out))
                    self.assertEqual(code, 0)
                    written.append((out / artifact).read_bytes())
                self.assertEqual(written[0], written[1])

    def test_missing_config_file(self):
        code, output = _run("analyze", "--config", str(self.tmp_dir / "missing.json"),
                            "--out", str(self.tmp_dir))
        self.assertEqual(code, 1)
        self.assertIn("file not found", output)

    def test_usage_errors_exit_2(self):
        for argv in ([], ["bogus", "--config", "x.json"], ["analyze"]):
            with self.subTest(argv=argv):
                with self.assertRaises(SystemExit) as ctx:
                    _run(*argv)
                self.assertEqual(ctx.exception.code, 2)


class TestVerifyChecks(unittest.TestCase):
    def test_raising_check_is_reported_as_failure(self):
        config = parse_config(read_document(CONFIG_DIR / "holling2_equal.json"))

        def unresolved(_config):
            raise ArithmeticError("crossing not resolved")

        def unconverged(_config):
            raise ConvergenceError("solver stopped early")

        for func in (unresolved, unconverged):
            with self.subTest(check=func.__name__):
                with self.assertLogs("py_chemostat.cli._verify", level="ERROR"):
                    result = _run_one(func.__name__, func, config)
                self.assertFalse(result.passed)
                self.assertFalse(result.skipped)
                self.assertIn("Error", result.detail.split(":")[0])

    def test_perturbed_holling2_passes(self):
        document = read_document(CONFIG_DIR / "holling2_perturbed.json")
        results = run_checks(document, {"t_end": 50.0})
        by_name = {r.name: r for r in results}
        self.assertTrue(all_passed(results), [r for r in results if not r.passed])
        self.assertTrue(by_name["appendix_bound"].skipped)
        self.assertIn("20 random starts", by_name["trajectory_envelope"].detail)
        self.assertFalse(by_name["break_even_closed_form"].skipped)

    def test_holling3_skips_closed_forms(self):
        document = read_document(CONFIG_DIR / "holling3_perturbed.json")
        by_name = {r.name: r for r in run_checks(document)}
        self.assertTrue(by_name["break_even_closed_form"].skipped)
        self.assertTrue(by_name["coexistence_nutrient_closed_form"].skipped)
        self.assertTrue(by_name["trajectory_envelope"].passed)


if __name__ == "__main__":
    unittest.main()
