import itertools
import json
import math
import time
import unittest

import numpy as np
import scipy.stats as sps

import chromatica
from chromatica import (
    Candidate,
    ClusterCut,
    Composer,
    Corpus,
    DegreeHistogram,
    DiagramPoint,
    Key,
    Linkage,
    Metric,
    Mode,
    Scale,
    Work,
)


def make_corpus(keys, composer="solo"):
    works = [Work(composer, f"W{i}", chromatica.parse_key(k), year=1700 + i) for i, k in enumerate(keys, start=1)]
    return Corpus(composers=[Composer(composer, composer)], works=works)


def points(coords):
    return [DiagramPoint(float(x), float(y), cid) for cid, (x, y) in coords.items()]


def diameter(xy):
    if len(xy) < 2:
        return 0.0
    return max(math.dist(a, b) for a, b in itertools.combinations(xy, 2))


class TestHistogram(unittest.TestCase):
    def test_table_fixture(self):
        corpus = chromatica.ingest_csv(chromatica.get_degree_table_corpus_filename())
        h = chromatica.histogram(corpus)
        self.assertEqual(h.degrees, tuple(range(-7, 8)))
        self.assertEqual(h.major, (1,) * 15)
        self.assertEqual(h.minor, (1,) * 15)
        self.assertEqual(set(h.combined.values()), {2})
        self.assertEqual(h.total, 30)

        p = chromatica.distribution(h).p
        self.assertAlmostEqual(sum(p.values()), 1.0, delta=1e-12)
        for v in p.values():
            self.assertAlmostEqual(v, 1 / 15, delta=1e-15)

    def test_empty(self):
        corpus = chromatica.ingest_csv(chromatica.get_degree_table_corpus_filename())
        empty = Corpus(composers=corpus.composers, works=())
        h = chromatica.histogram(empty)
        self.assertEqual(h.degrees, tuple(range(-7, 8)))
        self.assertEqual(h.major, (0,) * 15)
        self.assertEqual(h.minor, (0,) * 15)
        with self.assertRaises(chromatica.EmptyHistogram):
            chromatica.distribution(h)

    def test_counts(self):
        h = chromatica.histogram(make_corpus(["C", "C", "G", "g"]))
        self.assertEqual(h.counts[(0, Mode.MAJOR)], 2)
        self.assertEqual(h.counts[(1, Mode.MAJOR)], 1)
        self.assertEqual(h.counts[(-2, Mode.MINOR)], 1)
        self.assertEqual(h.counts[(-2, Mode.MAJOR)], 0)

    def test_per_composer(self):
        corpus = chromatica.ingest_csv(chromatica.get_example_corpus_filename())
        total = np.zeros(15, dtype=int)
        for cid in corpus.composer_ids:
            h = chromatica.histogram(corpus, cid)
            total += np.array(h.major) + np.array(h.minor)
        whole = chromatica.histogram(corpus)
        np.testing.assert_array_equal(total, np.array(whole.major) + np.array(whole.minor))
        self.assertEqual(sum(whole.major), corpus.major_count)
        self.assertEqual(sum(whole.minor), corpus.minor_count)

    def test_extended_axis(self):
        works = [Work("a", "A1", Key("F", 2, Mode.MAJOR)), Work("a", "A2", Key("C", 0, Mode.MAJOR))]
        corpus = Corpus(composers=[Composer("a", "a")], works=works, extended_range=True)
        h = chromatica.histogram(corpus)
        self.assertEqual(h.degrees, tuple(range(-13, 14)))

    def test_csv_round_trip(self):
        h = chromatica.histogram(make_corpus(["C", "C", "G", "g"]))
        text = chromatica.stats.histogram_to_csv(h)
        self.assertTrue(text.startswith("degree,major_count,minor_count,combined,p\n-7,0,0,0,0\n"))
        self.assertIn("\n0,2,0,2,0.5\n", text)
        self.assertEqual(chromatica.stats.read_histogram_csv(text), h)
        doc = json.loads(chromatica.stats.histogram_to_json(h))
        self.assertEqual(doc[7], {"degree": 0, "major_count": 2, "minor_count": 0, "combined": 2, "p": 0.5})

    def test_csv_bad_rows(self):
        header = "degree,major_count,minor_count,combined,p\n"
        for row in ["0,2,0\n", "0,two,0,2,1\n", "0.5,2,0,2,1\n"]:
            with self.assertRaises(chromatica.ChromaticaIOError, msg=row):
                chromatica.stats.read_histogram_csv(header + row)


class TestModePeaks(unittest.TestCase):
    def test_major_peak(self):
        h = chromatica.histogram(make_corpus(["C", "C", "G"]))
        self.assertEqual(chromatica.mode_peak(h, Mode.MAJOR), 0)

    def test_tie(self):
        h = chromatica.histogram(make_corpus(["D", "D", "Bb", "Bb"]))
        self.assertEqual(chromatica.mode_peak(h, Mode.MAJOR), -2)

    def test_peaks(self):
        h = chromatica.histogram(make_corpus(["C", "C", "G", "g", "g", "d"]))
        self.assertEqual(chromatica.mode_peaks(h), (0, -2))

    def test_empty_mode(self):
        h = chromatica.histogram(make_corpus(["C", "G"]))
        with self.assertRaises(chromatica.EmptyMode):
            chromatica.mode_peaks(h)


class TestDistribution(unittest.TestCase):
    def test_scales(self):
        h = DegreeHistogram((0, 1), (3, 0), (0, 1))
        self.assertEqual(chromatica.distribution(h, Scale.PROBABILITY).p, {0: 0.75, 1: 0.25})
        self.assertEqual(chromatica.distribution(h, Scale.PERCENTAGE).p, {0: 75.0, 1: 25.0})
        self.assertIs(chromatica.distribution(h, "Percentage").scale, Scale.PERCENTAGE)


class TestCramerVonMises(unittest.TestCase):
    def test_statistic(self):
        # Against a fully specified candidate the statistic is the textbook one
        x = np.random.default_rng(5).normal(size=50)
        expected = sps.cramervonmises(x, "norm").statistic
        self.assertAlmostEqual(float(chromatica.cvm_statistic(x, sps.norm.cdf)), expected, delta=1e-12)

    def test_statistic_rows(self):
        x = np.random.default_rng(6).normal(size=(3, 20))
        w = chromatica.cvm_statistic(x, sps.norm.cdf)
        self.assertEqual(w.shape, (3,))
        for row, value in zip(x, w):
            self.assertAlmostEqual(value, float(chromatica.cvm_statistic(row, sps.norm.cdf)), delta=1e-12)

    def test_degenerate(self):
        with self.assertRaises(chromatica.DegenerateSamples):
            chromatica.cvm_test([2.0] * 20)

    def test_too_few(self):
        with self.assertRaises(chromatica.TooFewSamples):
            chromatica.cvm_test([1.0, 2.0, 3.0])

    def test_bad_arguments(self):
        x = np.arange(20.0)
        with self.assertRaises(chromatica.InvalidArgument):
            chromatica.cvm_test(x, bootstrap_reps=10)
        with self.assertRaises(chromatica.InvalidArgument):
            chromatica.cvm_test(np.append(x, np.nan))
        with self.assertRaises(chromatica.InvalidArgument):
            chromatica.cvm_test(x - 30, Candidate.POISSON)
        for seed in [-1, 1.5, True, "3"]:
            with self.assertRaises(chromatica.InvalidArgument, msg=repr(seed)):
                chromatica.cvm_test(x, bootstrap_reps=100, seed=seed)
        # Still a ValueError for callers that catch that
        with self.assertRaises(ValueError):
            chromatica.cvm_test(x, bootstrap_reps=100, seed=-1)

    def test_reproducible(self):
        x = np.random.default_rng(7).normal(size=100)
        a = chromatica.cvm_test(x, Candidate.NORMAL, bootstrap_reps=200, seed=3)
        b = chromatica.cvm_test(x, Candidate.NORMAL, bootstrap_reps=200, seed=3)
        self.assertEqual(a, b)
        self.assertEqual(a.n, 100)
        self.assertEqual(a.bootstrap_reps, 200)
        self.assertEqual(a.seed, 3)
        self.assertEqual(a.method, "ParametricBootstrap")
        self.assertTrue(0.0 <= a.p_value <= 1.0)

    def test_gross_misfit(self):
        x = np.random.default_rng(8).choice([-3.0, 3.0], size=500)
        result = chromatica.cvm_test(x, Candidate.NORMAL, bootstrap_reps=500, seed=0)
        self.assertLess(result.p_value, 0.01)

    def test_calibration(self):
        # Rejection rate at the 5 % level for normal data tested against the normal family
        start_time = time.perf_counter()
        rejections = 0
        trials = 200
        for s in range(trials):
            x = np.random.default_rng([7, s]).normal(loc=0.5, scale=2.0, size=200)
            result = chromatica.cvm_test(x, Candidate.NORMAL, bootstrap_reps=500, seed=1000 * s)
            rejections += result.p_value < 0.05
        self.assertGreaterEqual(rejections / trials, 0.02)
        self.assertLessEqual(rejections / trials, 0.09)
        self.assertLess(time.perf_counter() - start_time, 120.0)

    def test_other_candidates(self):
        corpus = chromatica.ingest_csv(chromatica.get_example_corpus_filename())
        x = chromatica.stats.corpus_degrees(corpus)
        self.assertEqual(x.size, len(corpus.works))

        poisson = chromatica.cvm_test(x, Candidate.POISSON, bootstrap_reps=100, seed=1)
        self.assertAlmostEqual(poisson.params["mu"], float(np.mean(x)) + 7, delta=1e-12)
        doc = json.loads(chromatica.stats.gof_to_json(poisson))
        self.assertEqual(doc["shift"], 7)
        self.assertEqual(doc["candidate"], "Poisson")

        cauchy = chromatica.cvm_test(x, Candidate.CAUCHY, bootstrap_reps=100, seed=1)
        self.assertAlmostEqual(cauchy.params["loc"], float(np.median(x)), delta=1e-12)
        self.assertTrue(0.0 <= cauchy.p_value <= 1.0)


class TestCentroid(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(chromatica.centroid([(1, 1), (-1, -1)]), (0.0, 0.0))
        self.assertEqual(chromatica.centroid(points({"a": (2, 0), "b": (0, 2), "c": (1, 1)})), (1.0, 1.0))

    def test_empty(self):
        with self.assertRaises(chromatica.EmptyPointSet):
            chromatica.centroid([])

    def test_shift(self):
        # Moving every point by t moves the centroid by t
        rng = np.random.default_rng(22)
        for _ in range(50):
            xy = rng.uniform(-7, 7, size=(int(rng.integers(1, 30)), 2))
            t = rng.uniform(-10, 10, size=2)
            cx, cy = chromatica.centroid([tuple(p) for p in xy])
            sx, sy = chromatica.centroid([tuple(p + t) for p in xy])
            self.assertAlmostEqual(sx, cx + t[0], delta=1e-9)
            self.assertAlmostEqual(sy, cy + t[1], delta=1e-9)


class TestCluster(unittest.TestCase):
    def test_two_pairs(self):
        pts = points({"a": (0, 0), "b": (0.1, 0), "c": (5, 5), "d": (5.1, 5)})
        for linkage in Linkage:
            result = chromatica.cluster(pts, linkage, ClusterCut(count=2))
            self.assertEqual(result.assignments, {"a": 1, "b": 1, "c": 2, "d": 2})
            self.assertEqual(result.clusters, {1: ["a", "b"], 2: ["c", "d"]})

    def test_identical(self):
        pts = points({"a": (1, 1), "b": (1, 1), "c": (1, 1)})
        result = chromatica.cluster(pts, cut=ClusterCut(count=1))
        self.assertEqual(set(result.assignments.values()), {1})
        self.assertEqual(result.heights, (0.0, 0.0))

    def test_collinear(self):
        pts = points({"a": (0, 0), "b": (1, 0), "c": (3, 0)})
        result = chromatica.cluster(pts, Linkage.COMPLETE, ClusterCut(count=2))
        self.assertEqual(result.assignments, {"a": 1, "b": 1, "c": 2})
        self.assertEqual(result.heights, (1.0, 3.0))
        self.assertEqual(result.centroid, (4 / 3, 0.0))

        by_height = chromatica.cluster(pts, Linkage.COMPLETE, ClusterCut(height=1.5))
        self.assertEqual(by_height.assignments, result.assignments)

    def test_brute_force_oracle(self):
        # Complete linkage into two clusters against the partition with the smallest largest diameter
        rng = np.random.default_rng(21)
        for _ in range(30):
            n = int(rng.integers(3, 9))
            in_first = rng.permutation(np.arange(n) < int(rng.integers(1, n)))
            centres = np.where(in_first[:, None], [0.0, 0.0], [5.0, 5.0])
            xy = centres + rng.uniform(-0.35, 0.35, size=(n, 2))
            ids = [f"p{i}" for i in range(n)]
            pts = points(dict(zip(ids, xy)))

            best, best_cost = None, math.inf
            for mask in itertools.product([False, True], repeat=n - 1):
                side = (False,) + mask
                a = [tuple(xy[i]) for i in range(n) if not side[i]]
                b = [tuple(xy[i]) for i in range(n) if side[i]]
                if not b:
                    continue
                cost = max(diameter(a), diameter(b))
                if cost < best_cost:
                    best_cost = cost
                    best = {frozenset(ids[i] for i in range(n) if side[i] == s) for s in (False, True)}

            result = chromatica.cluster(pts, Linkage.COMPLETE, ClusterCut(count=2))
            self.assertEqual({frozenset(v) for v in result.clusters.values()}, best)

            # Input order does not matter
            shuffled = [pts[i] for i in rng.permutation(n)]
            self.assertEqual(chromatica.cluster(shuffled, Linkage.COMPLETE, ClusterCut(count=2)), result)

    def test_torus(self):
        # 7 and -5 are the same place on the torus
        pts = points({"a": (7, 0), "b": (-5, 0.2), "c": (2, 3)})
        planar = chromatica.cluster(pts, cut=ClusterCut(count=2), metric=Metric.PLANAR)
        torus = chromatica.cluster(pts, cut=ClusterCut(count=2), metric=Metric.TORUS)
        self.assertEqual(torus.assignments, {"a": 1, "b": 1, "c": 2})
        self.assertNotEqual(planar.assignments, torus.assignments)

    def test_errors(self):
        with self.assertRaises(chromatica.TooFewPoints):
            chromatica.cluster(points({"a": (0, 0)}))
        with self.assertRaises(chromatica.InvalidCut):
            chromatica.cluster(points({"a": (0, 0), "b": (1, 1)}), cut=ClusterCut(count=3))
        with self.assertRaises(ValueError):
            chromatica.cluster([DiagramPoint(0, 0, "a"), DiagramPoint(1, 1, "a")])

    def test_cut_parse(self):
        self.assertEqual(ClusterCut.parse("k=2"), ClusterCut(count=2))
        self.assertEqual(ClusterCut.parse("h=1.5"), ClusterCut(height=1.5))
        self.assertEqual(str(ClusterCut(height=1.5)), "h=1.5")
        for text in ["2", "k=two", "x=1", "k=0", "h=-1"]:
            with self.assertRaises(chromatica.InvalidCut, msg=text):
                ClusterCut.parse(text)
        with self.assertRaises(chromatica.InvalidCut):
            ClusterCut()

    def test_json(self):
        pts = points({"a": (0, 0), "b": (1, 0), "c": (3, 0)})
        doc = json.loads(chromatica.stats.cluster_to_json(chromatica.cluster(pts)))
        self.assertEqual(doc["assignments"], {"a": 1, "b": 1, "c": 2})
        self.assertEqual(doc["cut"], "k=2")
        self.assertEqual(doc["linkage"], "Complete")
        self.assertEqual(doc["centroid"], [1.33333, 0.0])

    def test_tied_line(self):
        # a-b and b-c are equally close, the pair holding the first composer id merges first
        pts = points({"a": (0, 0), "b": (1, 0), "c": (2, 0)})
        result = chromatica.cluster(pts, Linkage.SINGLE, ClusterCut(count=2))
        self.assertEqual(result.assignments, {"a": 1, "b": 1, "c": 2})
        self.assertEqual(result.heights, (1.0, 1.0))

    def test_tied_square(self):
        pts = points({"a": (0, 0), "b": (1, 0), "c": (0, 1), "d": (1, 1)})
        three = chromatica.cluster(pts, Linkage.COMPLETE, ClusterCut(count=3))
        self.assertEqual(three.assignments, {"a": 1, "b": 1, "c": 2, "d": 3})
        two = chromatica.cluster(pts, Linkage.COMPLETE, ClusterCut(count=2))
        self.assertEqual(two.assignments, {"a": 1, "b": 1, "c": 2, "d": 2})
        self.assertEqual(len(two.heights), 3)
        for h, expected in zip(two.heights, (1.0, 1.0, math.sqrt(2))):
            self.assertAlmostEqual(h, expected, delta=1e-12)

        for linkage in Linkage:
            for k in range(1, 5):
                result = chromatica.cluster(pts, linkage, ClusterCut(count=k))
                self.assertEqual(len(set(result.assignments.values())), k, msg=f"{linkage} k={k}")
                for order in itertools.permutations(pts):
                    self.assertEqual(chromatica.cluster(list(order), linkage, ClusterCut(count=k)), result)

    def test_grid_fixtures(self):
        # Small integer grids are full of tied distances
        rng = np.random.default_rng(23)
        for _ in range(40):
            n = int(rng.integers(2, 9))
            xy = rng.integers(0, 3, size=(n, 2))
            pts = points({f"p{i}": p for i, p in enumerate(xy)})
            for linkage in Linkage:
                for k in range(1, n + 1):
                    result = chromatica.cluster(pts, linkage, ClusterCut(count=k))
                    self.assertEqual(sorted(set(result.assignments.values())), list(range(1, k + 1)))
                    shuffled = [pts[i] for i in rng.permutation(n)]
                    self.assertEqual(chromatica.cluster(shuffled, linkage, ClusterCut(count=k)), result)

    def test_single_linkage_components(self):
        # Cutting single linkage at h joins exactly the points linked by steps of at most h
        rng = np.random.default_rng(24)
        for _ in range(30):
            n = int(rng.integers(2, 9))
            xy = rng.integers(0, 4, size=(n, 2))
            ids = [f"p{i}" for i in range(n)]
            pts = points(dict(zip(ids, xy)))
            for h in [0.5, 1.2, 1.9, 2.1, 2.5, 2.9, 3.1, 3.4, 5.0]:
                parent = list(range(n))

                def find(i):
                    while parent[i] != i:
                        i = parent[i]
                    return i

                for i, j in itertools.combinations(range(n), 2):
                    if math.dist(xy[i], xy[j]) <= h:
                        parent[find(i)] = find(j)
                expected = {}
                for i in range(n):
                    expected.setdefault(find(i), set()).add(ids[i])

                result = chromatica.cluster(pts, Linkage.SINGLE, ClusterCut(height=h))
                clusters = {frozenset(v) for v in result.clusters.values()}
                self.assertEqual(clusters, {frozenset(v) for v in expected.values()}, msg=f"h={h}")
