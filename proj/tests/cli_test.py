#!/usr/bin/env python3
"""End-to-end checks of the securemode CLI: exit codes, output files and JSON schemas.

usage: cli_test.py <securemode executable> <models dir> <docs dir>
"""

import json
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

CLI, MODELS, DOCS = sys.argv[1:4]
del sys.argv[1:4]

BOOST = os.path.join(MODELS, "boost.json")
TWO_INPUT = os.path.join(MODELS, "two_input.json")


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("SECUREMODE_BACKEND", None)
    if env:
        full_env.update(env)
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=full_env, timeout=120)


def load_schema(name):
    with open(os.path.join(DOCS, name)) as f:
        return json.load(f)


def read_jsonl(path):
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


class Analyze(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.report = os.path.join(self.tmp.name, "report.json")

    def tearDown(self):
        self.tmp.cleanup()

    def test_boost_full_model_is_not_reconstructable(self):
        r = run("analyze", "--model", BOOST, "--sigma", "1", "--rho", "0", "--output", self.report)
        self.assertEqual(r.returncode, 2, r.stderr)
        with open(self.report) as f:
            rep = json.load(f)
        jsonschema.validate(rep, load_schema("report.schema.json"))
        ranks = {(p["i"], p["j"]): p["ranks"] for p in rep["rank_table"]["pairs"]}
        self.assertEqual(rep["rank_table"]["gammas"], [[1, 2], [1, 3], [2, 3]])
        self.assertEqual(ranks, {("1", "2"): [4, 3, 3], ("1", "3"): [4, 3, 3], ("2", "3"): [2, 2, 2]})
        by_pair = {(p["i"], p["j"]): p["distinguishable"] for p in rep["pairs"]}
        self.assertTrue(by_pair[("1", "2")])
        self.assertTrue(by_pair[("1", "3")])
        self.assertFalse(by_pair[("2", "3")])
        self.assertIn("all pairs distinguishable: no", r.stdout)

    def test_single_secure_pair_exits_zero(self):
        r = run("analyze", "--model", BOOST, "--sigma", "1", "--rho", "0", "--pair", "1", "2", "--output", self.report)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertIn("all pairs distinguishable: yes", r.stdout)

    def test_autonomous_mode(self):
        r = run("analyze", "--model", BOOST, "--sigma", "1", "--autonomous", "--output", self.report)
        self.assertEqual(r.returncode, 2, r.stderr)
        with open(self.report) as f:
            rep = json.load(f)
        self.assertTrue(rep["autonomous"])
        jsonschema.validate(rep, load_schema("report.schema.json"))

    def test_sensor_budget_violation_is_an_error(self):
        r = run("analyze", "--model", BOOST, "--sigma", "2", "--output", self.report)
        self.assertEqual(r.returncode, 1)
        self.assertIn("2*sigma < p", r.stderr)

    def test_missing_model_is_an_error(self):
        r = run("analyze", "--model", os.path.join(self.tmp.name, "nope.json"))
        self.assertNotEqual(r.returncode, 0)
        self.assertNotEqual(r.returncode, 2)

    def test_float_backend_from_environment(self):
        r = run("analyze", "--model", BOOST, "--sigma", "1", "--rho", "0", "--output", self.report,
                env={"SECUREMODE_BACKEND": "float"})
        self.assertEqual(r.returncode, 2, r.stderr)
        with open(self.report) as f:
            rep = json.load(f)
        self.assertEqual(rep["backend"], "float")
        exact = os.path.join(self.tmp.name, "exact.json")
        run("analyze", "--model", BOOST, "--sigma", "1", "--rho", "0", "--output", exact)
        with open(exact) as f:
            ref = json.load(f)
        self.assertEqual(rep["rank_table"], ref["rank_table"])
        self.assertEqual([p["distinguishable"] for p in rep["pairs"]], [p["distinguishable"] for p in ref["pairs"]])

    def test_two_input_model_is_reconstructable(self):
        r = run("analyze", "--model", TWO_INPUT, "--output", self.report)
        self.assertEqual(r.returncode, 0, r.stdout + r.stderr)


class SimulateAndEstimate(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def simulate(self, name, *extra):
        path = os.path.join(self.tmp.name, name)
        r = run("simulate", "--model", BOOST, "--mode", "2", "--tau", "4", "--seed", "7", "--output", path, *extra)
        self.assertEqual(r.returncode, 0, r.stderr)
        return path

    def test_same_seed_is_byte_identical(self):
        a, b = self.simulate("a.jsonl"), self.simulate("b.jsonl")
        with open(a, "rb") as fa, open(b, "rb") as fb:
            self.assertEqual(fa.read(), fb.read())

    def test_trace_matches_schema(self):
        schema = load_schema("trace.schema.json")
        recs = read_jsonl(self.simulate("t.jsonl"))
        self.assertEqual(len(recs), 5)
        for rec in recs:
            jsonschema.validate(rec, schema)
        self.assertEqual([r["t"] for r in recs], [0, 1, 2, 3, 4])
        # at most sigma = 1 sensor attacked
        attacked = {k for r in recs[:-1] for k, w in enumerate(r["w"]) if w != "0"}
        self.assertLessEqual(len(attacked), 1)

    def test_estimate_recovers_mode(self):
        r = run("estimate", "--model", BOOST, "--trace", self.simulate("t.jsonl"))
        self.assertEqual(r.returncode, 0, r.stderr)
        est = json.loads(r.stdout)
        self.assertTrue(est["unique"])
        self.assertEqual(est["mode"], "2")

    def test_estimate_bad_trace_is_an_error(self):
        path = os.path.join(self.tmp.name, "bad.jsonl")
        with open(path, "w") as f:
            f.write("{not json\n")
        r = run("estimate", "--model", BOOST, "--trace", path)
        self.assertEqual(r.returncode, 1)


class Witness(unittest.TestCase):
    def test_witness_traces_have_identical_outputs(self):
        with tempfile.TemporaryDirectory() as d:
            r = run("witness", "--model", BOOST, "--sigma", "1", "--pair", "1", "2", "--output-dir", d)
            self.assertEqual(r.returncode, 0, r.stderr)
            a = read_jsonl(os.path.join(d, "witness_1_2_mode1.jsonl"))
            b = read_jsonl(os.path.join(d, "witness_1_2_mode2.jsonl"))
            self.assertEqual([x["y"] for x in a[:-1]], [x["y"] for x in b[:-1]])
            self.assertEqual({x["mode"] for x in a}, {"1"})
            self.assertEqual({x["mode"] for x in b}, {"2"})
            # the shared output is consistent with both modes under autonomous dynamics
            e = run("estimate", "--model", BOOST, "--trace", os.path.join(d, "witness_1_2_mode1.jsonl"),
                    "--sigma", "1", "--autonomous")
            self.assertEqual(e.returncode, 2, e.stderr)
            self.assertFalse(json.loads(e.stdout)["unique"])

    def test_secure_pair_has_no_witness(self):
        with tempfile.TemporaryDirectory() as d:
            r = run("witness", "--model", TWO_INPUT, "--sigma", "1", "--pair", "a", "b", "--output-dir", d)
            self.assertEqual(r.returncode, 2, r.stderr)
            self.assertEqual(os.listdir(d), [])


class Discretize(unittest.TestCase):
    def test_euler_step(self):
        with tempfile.TemporaryDirectory() as d:
            out = os.path.join(d, "disc.json")
            r = run("discretize", "--model", BOOST, "--method", "euler", "--h", "0.1", "--output", out)
            self.assertEqual(r.returncode, 0, r.stderr)
            self.assertIn("9/10", r.stdout)
            with open(out) as f:
                doc = json.load(f)
            jsonschema.validate(doc, load_schema("model.schema.json"))
            self.assertFalse(doc["continuous_time"])
            mode2 = next(m for m in doc["modes"] if m["id"] == "2")
            self.assertEqual(mode2["A"], [["9/10", "0"], ["0", "1"]])


class Schemas(unittest.TestCase):
    def test_shipped_models_validate(self):
        schema = load_schema("model.schema.json")
        for name in sorted(os.listdir(MODELS)):
            if name.endswith(".json"):
                with open(os.path.join(MODELS, name)) as f:
                    jsonschema.validate(json.load(f), schema)


if __name__ == "__main__":
    unittest.main(verbosity=2)
