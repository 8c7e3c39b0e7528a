# Copyright 2026 The slot-tools Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import logging
import unittest

import numpy as np

from slot_tools.domain import (ModeStats, ModeSet, CostParams, Partition,
                               InsufficientSamples)
from slot_tools.mode_reader import read_mode_set
from slot_tools.data import SampleSet, GenConfig, generate
from slot_tools.solver import evaluate_partition, solve_exact
from slot_tools.heuristics import (FeatureSpec, ClusterConfig,
                                   feature_matrix, kmeans, kmedoids, cluster,
                                   validation_scores, crossvalidate_k,
                                   solve_heuristic)
BASE = './tests/test_modes/'

SEPARABLE = np.array([[0.0], [0.1], [0.2], [10.0], [10.1], [20.0]])


class TestFeatureSpec(unittest.TestCase):

    def test_parse(self):
        self.assertEqual(FeatureSpec("m,s").components,
                         ("mean", "semivariance"))
        self.assertEqual(FeatureSpec(" mean, sigma ,s").components,
                         ("mean", "std", "semivariance"))
        self.assertEqual(FeatureSpec("m,mean").components, ("mean",))

    def test_invalid(self):
        with self.assertRaises(ValueError):
            FeatureSpec("m,kurtosis")
        with self.assertRaises(ValueError):
            FeatureSpec(())

    def test_defaults(self):
        self.assertEqual(FeatureSpec.default_for("kmeans").components,
                         ("mean", "semivariance"))
        self.assertEqual(FeatureSpec.default_for("kmedoids").components,
                         ("mean", "std", "semivariance"))

    def test_cluster_config(self):
        self.assertEqual(ClusterConfig(3).restarts, 10)
        for bad in ({"k": 0}, {"k": 2, "restarts": 0},
                    {"k": 2, "max_iters": 0}):
            with self.assertRaises(ValueError):
                ClusterConfig(**bad)

    def test_feature_matrix(self):
        modes = ModeSet([ModeStats(100, 30, 0.1, 0.5),
                         ModeStats(200, 30, 0.3, 0.5)])
        X = feature_matrix(modes, FeatureSpec("m,sigma,s"))
        self.assertEqual(X.shape, (2, 3))
        self.assertTrue(np.allclose(X.mean(axis=0), 0))
        # The constant std column stays at zero
        self.assertTrue(np.allclose(X[:, 1], 0))
        self.assertTrue(np.allclose(X[:, 0], [-1, 1]))
        raw = feature_matrix(modes, FeatureSpec("m", standardize=False))
        self.assertTrue(np.allclose(raw[:, 0], [100, 200]))


class TestClustering(unittest.TestCase):

    def test_kmeans_separable(self):
        partition = kmeans(SEPARABLE, ClusterConfig(3, restarts=50))
        self.assertEqual(partition, ((0, 1, 2), (3, 4), (5,)))

    def test_kmedoids_separable(self):
        partition = kmedoids(SEPARABLE, ClusterConfig(3, restarts=50))
        self.assertEqual(partition, ((0, 1, 2), (3, 4), (5,)))

    def test_kmedoids_matches_kmeans(self):
        points = np.array([[10.0], [11.0], [100.0], [101.0]])
        self.assertEqual(kmedoids(points, ClusterConfig(2)),
                         kmeans(points, ClusterConfig(2)))

    def test_one_and_all(self):
        for method in ("kmeans", "kmedoids"):
            self.assertEqual(cluster(SEPARABLE, ClusterConfig(1), method),
                             (tuple(range(6)),))
            self.assertEqual(len(cluster(SEPARABLE, ClusterConfig(6),
                                         method)), 6)

    def test_coincident_points(self):
        points = np.array([[0.0], [0.0], [10.0]])
        for method in ("kmeans", "kmedoids"):
            self.assertEqual(cluster(points, ClusterConfig(3), method),
                             ((0,), (1,), (2,)))
            self.assertEqual(cluster(points, ClusterConfig(2), method),
                             ((0, 1), (2,)))

    def test_deterministic(self):
        rng = np.random.default_rng(30)
        points = rng.normal(size=(12, 2))
        for method in ("kmeans", "kmedoids"):
            first = cluster(points, ClusterConfig(4, seed=7), method)
            again = cluster(points, ClusterConfig(4, seed=7), method)
            self.assertEqual(first, again)
            self.assertIsInstance(first, Partition)
            self.assertEqual(len(first), 4)

    def test_history_nonincreasing(self):
        rng = np.random.default_rng(31)
        points = rng.normal(size=(15, 2))
        for func in (kmeans, kmedoids):
            history = []
            func(points, ClusterConfig(3, restarts=5), history)
            self.assertEqual(len(history), 5)
            for run in history:
                for a, b in zip(run, run[1:]):
                    self.assertLessEqual(b, a + 1e-9)

    def test_bad_k(self):
        with self.assertRaises(ValueError):
            kmeans(SEPARABLE, ClusterConfig(7))
        with self.assertRaises(ValueError):
            cluster(SEPARABLE, ClusterConfig(2), "dbscan")


class TestClinicHeuristic(unittest.TestCase):

    def setUp(self):
        self.modes = read_mode_set(BASE + '0-clinic-seven.json')

    def test_kmeans_partition(self):
        solution = solve_heuristic(self.modes, CostParams(), method="kmeans",
                                   k=4)
        self.assertEqual(solution.partition,
                         ((0, 1), (2,), (3, 4, 5), (6,)))
        for found, expected in zip(solution.durations, (58, 118, 217, 368)):
            self.assertAlmostEqual(found, expected, delta=1)
        self.assertAlmostEqual(solution.objective, 1410.59, delta=0.05)
        again = evaluate_partition(solution.partition, self.modes,
                                   CostParams())
        self.assertAlmostEqual(again.objective, solution.objective)

    def test_fixed_k(self):
        exact = solve_exact(self.modes, CostParams())
        for method in ("kmeans", "kmedoids"):
            solution = solve_heuristic(self.modes, CostParams(),
                                       method=method, k=4)
            self.assertEqual(len(solution.partition), 4)
            self.assertGreaterEqual(solution.objective,
                                    exact.objective - 1e-9)

    def test_auto_needs_samples(self):
        with self.assertRaises(ValueError):
            solve_heuristic(self.modes, CostParams())


def sample_set(seed, n_modes=5, per_mode=100):
    """ Lognormal samples with every mode well represented """
    rng = np.random.default_rng(seed)
    train = [np.clip(rng.lognormal(rng.uniform(np.log(100), np.log(600)),
                                   rng.uniform(0.3, 0.8), per_mode), 0, 720)
             for _ in range(n_modes)]
    probs = np.maximum(rng.dirichlet(np.ones(n_modes)), 0.05)
    names = ["type%d" % (i + 1) for i in range(n_modes)]
    return SampleSet(names, train, probs / probs.sum())


class TestCrossValidation(unittest.TestCase):

    def setUp(self):
        logging.getLogger().setLevel(level=logging.ERROR)

    def test_insufficient(self):
        samples = SampleSet(["a", "b"], [[10, 20, 30], [40, 50]], [0.5, 0.5])
        with self.assertRaises(InsufficientSamples):
            crossvalidate_k(samples, CostParams(), FeatureSpec("m"), folds=3)

    def test_scores(self):
        samples = sample_set(40, n_modes=4)
        scores = validation_scores(samples, CostParams(), FeatureSpec("m,s"),
                                   folds=3)
        self.assertEqual(sorted(scores), [1, 2, 3, 4])
        best = crossvalidate_k(samples, CostParams(), FeatureSpec("m,s"),
                               folds=3)
        self.assertEqual(scores[best], min(scores.values()))
        self.assertEqual(best, min(k for k in scores
                                   if scores[k] == scores[best]))

    def test_k_range(self):
        samples = sample_set(41, n_modes=4)
        scores = validation_scores(samples, CostParams(), FeatureSpec("m"),
                                   folds=2, k_range=[2, 3, 9])
        self.assertEqual(sorted(scores), [2, 3])
        with self.assertRaises(ValueError):
            validation_scores(samples, CostParams(), FeatureSpec("m"),
                              folds=2, k_range=[9])

    def test_auto(self):
        samples = sample_set(43, n_modes=4)
        solution = solve_heuristic(samples, CostParams(), k="auto", folds=3)
        self.assertEqual(solution.partition.n_modes, 4)


class TestHeuristicGap(unittest.TestCase):

    def setUp(self):
        logging.getLogger().setLevel(level=logging.ERROR)

    def test_gap(self):
        costs = CostParams()
        for seed in range(10):
            samples = generate(GenConfig(seed=seed))
            modes = samples.mode_set("train")
            exact = solve_exact(modes, costs)
            best = None
            for k in range(1, 6):
                solution = solve_heuristic(samples, costs, k=k)
                self.assertGreaterEqual(
                    solution.objective,
                    exact.objective - 1e-9 * exact.objective)
                if best is None or solution.objective < best:
                    best = solution.objective
            self.assertLessEqual(best, 1.3 * exact.objective)


if __name__ == '__main__':
    unittest.main()
