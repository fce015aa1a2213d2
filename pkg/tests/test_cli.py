import contextlib
import io
import json
import os
import re
import tempfile
import unittest
from unittest import mock

import chromatica
from chromatica.cli import run


def test_resource_path(path):
    return os.path.join(os.path.dirname(os.path.realpath(__file__)), path)


test_resource_path.__test__ = False  # helper, not a test


def invoke(*argv):
    """
    Runs the command line and returns (status, stdout, stderr).
    """
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        status = run(list(argv))
    return status, out.getvalue(), err.getvalue()


def read(path):
    with open(path, "rb") as f:
        return f.read()


class TestCommandLine(unittest.TestCase):
    def setUp(self):
        self._temp_dir = tempfile.TemporaryDirectory()
        self.temp_dir = self._temp_dir.name
        self.example = chromatica.get_example_corpus_filename()

    def tearDown(self):
        self._temp_dir.cleanup()

    def path(self, name):
        return os.path.join(self.temp_dir, name)

    def test_mozart_diagram(self):
        status, _, _ = invoke("diagram", "--corpus", chromatica.get_mozart_1761_filename(), "--out", self.path("p.csv"))
        self.assertEqual(status, 0)
        self.assertEqual(
            read(self.path("p.csv")),
            b"composer,x,y,weighting,normalization\nmozart,-0.166667,0,Unweighted,TotalCount\n",
        )

    def test_validate_empty(self):
        status, out, _ = invoke("validate", "--corpus", test_resource_path("data/empty.csv"))
        self.assertEqual(status, 0)
        self.assertIn("works=0", out)

    def test_validate_reports(self):
        status, out, _ = invoke("validate", "--corpus", chromatica.get_mozart_1761_filename())
        self.assertEqual(status, 0)
        self.assertIn("works=6", out)
        self.assertIn("BelowWorkThreshold", out)

        status, out, _ = invoke("validate", "--corpus", chromatica.get_mozart_1761_filename(), "--threshold", "6")
        self.assertIn("diagnostics=0", out)

    def test_missing_file(self):
        status, _, err = invoke("diagram", "--corpus", test_resource_path("data/missing.csv"))
        self.assertEqual(status, 1)
        self.assertIn("FileUnreadable", err)
        self.assertTrue(err.startswith("chromatica: error: "))

    def test_row_error(self):
        status, _, err = invoke("diagram", "--corpus", test_resource_path("data/bad_key.csv"))
        self.assertEqual(status, 2)
        self.assertIn("bad_key.csv:3:", err)

        status, out, _ = invoke("diagram", "--corpus", test_resource_path("data/bad_key.csv"), "--lenient")
        self.assertEqual(status, 0)
        self.assertTrue(out.startswith("composer,x,y"))

    def test_usage_errors(self):
        self.assertEqual(invoke("diagram", "--corpus", self.example, "--bogus")[0], 1)
        self.assertEqual(invoke("frobnicate")[0], 1)
        self.assertEqual(invoke()[0], 1)
        self.assertEqual(invoke("diagram")[0], 1)
        self.assertEqual(invoke("career", "--corpus", self.example)[0], 1)
        self.assertEqual(invoke("cluster", "--corpus", self.example, "--cut", "q=3")[0], 1)
        self.assertEqual(invoke("render", "--input", self.path("nothing.csv"), "--svg", self.path("x.svg"))[0], 1)
        self.assertEqual(invoke("diagram", "--corpus", test_resource_path("data/wrong_header.csv"))[0], 1)
        self.assertEqual(invoke("diagram", "--corpus", self.example, "--composer", "salieri")[0], 1)

    def test_degrees(self):
        status, out, _ = invoke("degrees", "--corpus", chromatica.get_degree_table_corpus_filename())
        self.assertEqual(status, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "composer,catalog_id,key,degree")
        self.assertEqual(lines[1], "table,T-7-major,Cb,-7")
        self.assertEqual(len(lines), 31)

    def test_histogram_json(self):
        table = chromatica.get_degree_table_corpus_filename()
        status, _, _ = invoke("histogram", "--corpus", table, "--out", self.path("h.json"))
        self.assertEqual(status, 0)
        doc = json.loads(read(self.path("h.json")))
        self.assertEqual([d["combined"] for d in doc], [2] * 15)

    def test_weighted_diagram(self):
        status, out, _ = invoke("diagram", "--corpus", self.example, "--weighted", "--normalization", "permode")
        self.assertEqual(status, 0)
        rows = out.splitlines()[1:]
        self.assertEqual(len(rows), 4)
        self.assertTrue(all(r.endswith(",DistributionWeighted,PerModeCount") for r in rows))

    def test_career(self):
        status, out, _ = invoke("career", "--corpus", test_resource_path("data/career.csv"), "--composer", "solo")
        self.assertEqual(status, 0)
        self.assertEqual(out, "composer,year,x,y,cumulative_count\nsolo,1700,2,0,1\nsolo,1701,1,-1,2\n")

        status, out, _ = invoke(
            "career", "--corpus", test_resource_path("data/career.csv"), "--composer", "solo", "--per-year"
        )
        self.assertEqual(out.splitlines()[-1], "solo,1701,0,-2,2")

    def test_cluster(self):
        status, out, _ = invoke("cluster", "--corpus", self.example, "--cut", "k=2", "--linkage", "average")
        self.assertEqual(status, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "composer,cluster")
        self.assertEqual([line.split(",")[0] for line in lines[1:]], ["bach", "haydn", "mozart", "schubert"])
        self.assertEqual({line.split(",")[1] for line in lines[1:]}, {"1", "2"})

    def test_gof_seed(self):
        args = ["gof", "--corpus", self.example, "--reps", "100"]
        with mock.patch.dict(os.environ, {"CHROMATICA_SEED": "5"}):
            from_env = invoke(*args)
        explicit = invoke(*args, "--seed", "5")
        self.assertEqual(from_env[0], 0)
        self.assertEqual(from_env[1], explicit[1])
        self.assertEqual(json.loads(explicit[1])["seed"], 5)

        with mock.patch.dict(os.environ, {"CHROMATICA_SEED": ""}):
            self.assertEqual(json.loads(invoke(*args)[1])["seed"], 0)
        with mock.patch.dict(os.environ, {"CHROMATICA_SEED": "five"}):
            self.assertEqual(invoke(*args)[0], 1)

    def test_cache(self):
        cache = self.path("cache.json")
        self.assertEqual(invoke("validate", "--corpus", self.example, "--out", cache)[0], 0)
        from_csv = invoke("diagram", "--corpus", self.example)
        from_cache = invoke("diagram", "--corpus", cache)
        self.assertEqual(from_cache, from_csv)

    def test_inputs_untouched(self):
        before = read(self.example)
        invoke("diagram", "--corpus", self.example, "--out", self.path("p.csv"), "--svg", self.path("p.svg"))
        self.assertEqual(read(self.example), before)
        self.assertEqual(sorted(os.listdir(self.temp_dir)), ["p.csv", "p.svg"])

    def test_deterministic(self):
        commands = [
            ["validate", "--out", "{}.json"],
            ["degrees", "--out", "{}.csv"],
            ["histogram", "--out", "{}.csv", "--svg", "{}.svg"],
            ["histogram", "--out", "{}.json"],
            ["fractions", "--out", "{}.csv", "--svg", "{}.svg"],
            ["fractions", "--out", "{}.json"],
            ["diagram", "--out", "{}.csv", "--svg", "{}.svg"],
            ["diagram", "--weighted", "--out", "{}.json"],
            ["career", "--composer", "mozart", "--out", "{}.csv", "--svg", "{}.svg"],
            ["career", "--composer", "bach", "--out", "{}.json"],
            ["cluster", "--out", "{}.csv", "--svg", "{}.svg"],
            ["cluster", "--metric", "torus", "--out", "{}.json"],
            ["gof", "--reps", "100", "--candidate", "cauchy", "--out", "{}.json"],
        ]
        for i, command in enumerate(commands):
            outputs = []
            for run_number in range(2):
                argv = [a.format(self.path(f"{i}-{run_number}")) for a in command] + ["--corpus", self.example]
                self.assertEqual(invoke(*argv)[0], 0, msg=argv)
                outputs.append([read(a) for a in argv if a.startswith(self.temp_dir)])
            self.assertTrue(outputs[0])
            self.assertEqual(outputs[0], outputs[1], msg=command[0])

    def test_pipeline_closure(self):
        # Drawing an exported CSV gives the same SVG as the one-step command
        cases = [
            ("diagram", "diagram", []),
            ("diagram", "diagram", ["--weighted"]),
            ("fractions", "fractions", []),
            ("histogram", "histogram", []),
            ("career", "trajectory", ["--composer", "mozart"]),
        ]
        for command, kind, extra in cases:
            csv_path, fused, rendered = self.path("data.csv"), self.path("fused.svg"), self.path("rendered.svg")
            status = invoke(command, "--corpus", self.example, "--out", csv_path, "--svg", fused, *extra)[0]
            self.assertEqual(status, 0)
            status = invoke("render", "--input", csv_path, "--kind", kind, "--svg", rendered)[0]
            self.assertEqual(status, 0)
            self.assertEqual(read(fused), read(rendered), msg=command)

    def test_render_wrong_kind(self):
        csv_path = self.path("data.csv")
        invoke("fractions", "--corpus", self.example, "--out", csv_path)
        status, _, _ = invoke("render", "--input", csv_path, "--kind", "diagram", "--svg", self.path("x.svg"))
        self.assertEqual(status, 1)
        self.assertFalse(os.path.exists(self.path("x.svg")))

    def labels(self, svg_path):
        return re.findall(r'<text class="label"[^>]*>([^<]*)</text>', read(svg_path).decode("utf-8"))

    def test_labels_from_cache(self):
        cache = self.path("cache.json")
        self.assertEqual(invoke("validate", "--corpus", self.example, "--out", cache)[0], 0)
        with open(cache, encoding="utf-8") as f:
            doc = json.load(f)
        indices = {"bach": 2, "haydn": 16, "mozart": 20, "schubert": 27}
        for c in doc["composers"]:
            c["index"] = indices[c["id"]]
        with open(cache, "w", encoding="utf-8") as f:
            json.dump(doc, f)

        csv_path, fused = self.path("p.csv"), self.path("fused.svg")
        self.assertEqual(invoke("diagram", "--corpus", cache, "--out", csv_path, "--svg", fused)[0], 0)
        self.assertEqual(self.labels(fused), ["2", "16", "20", "27"])
        clustered = self.path("cluster.svg")
        self.assertEqual(invoke("cluster", "--corpus", cache, "--out", self.path("c.csv"), "--svg", clustered)[0], 0)
        self.assertEqual(self.labels(clustered), ["2", "16", "20", "27"])

        # Rendering the export with the same corpus gives the same drawing, without it the labels are alphabetical
        rendered = self.path("rendered.svg")
        self.assertEqual(invoke("render", "--input", csv_path, "--corpus", cache, "--svg", rendered)[0], 0)
        self.assertEqual(read(rendered), read(fused))
        self.assertEqual(invoke("render", "--input", csv_path, "--svg", rendered)[0], 0)
        self.assertEqual(self.labels(rendered), ["1", "2", "3", "4"])

    def test_single_composer_label(self):
        svg = self.path("p.svg")
        argv = ("diagram", "--corpus", self.example, "--composer", "mozart", "--out", self.path("p.csv"), "--svg", svg)
        self.assertEqual(invoke(*argv)[0], 0)
        self.assertEqual(self.labels(svg), ["3"])

    def test_percentage_weights(self):
        def coords(*extra):
            out = invoke("diagram", "--corpus", self.example, "--weighted", *extra)[1]
            return [(float(r[1]), float(r[2])) for r in (line.split(",") for line in out.splitlines()[1:])]

        for (px, py), (qx, qy) in zip(coords(), coords("--percentage")):
            self.assertAlmostEqual(qx, 100 * px, delta=1e-4 * max(1.0, abs(qx)))
            self.assertAlmostEqual(qy, 100 * py, delta=1e-4 * max(1.0, abs(qy)))

    def test_bad_gof_arguments(self):
        args = ("gof", "--corpus", self.example)
        status, _, err = invoke(*args, "--reps", "50")
        self.assertEqual(status, 1)
        self.assertIn("InvalidArgument", err)
        self.assertEqual(invoke(*args, "--seed", "-1")[0], 1)
        with mock.patch.dict(os.environ, {"CHROMATICA_SEED": "-1"}):
            self.assertEqual(invoke(*args)[0], 1)

    def test_render_bad_rows(self):
        cases = [
            ("diagram", "composer,x,y,weighting,normalization\nmozart,abc,0,Unweighted,TotalCount\n"),
            ("trajectory", "composer,year,x,y,cumulative_count\nmozart,1761,0.5\n"),
            ("fractions", "composer,major_fraction,minor_fraction,ratio\nmozart,half,0.5,1\n"),
            ("histogram", "degree,major_count,minor_count,combined,p\n0,1\n"),
        ]
        for kind, text in cases:
            csv_path, svg = self.path("bad.csv"), self.path("bad.svg")
            with open(csv_path, "w", encoding="utf-8") as f:
                f.write(text)
            status, _, err = invoke("render", "--input", csv_path, "--kind", kind, "--svg", svg)
            self.assertEqual(status, 1, msg=kind)
            self.assertIn("line 2", err, msg=kind)
            self.assertNotIn("Traceback", err)
            self.assertFalse(os.path.exists(svg))
