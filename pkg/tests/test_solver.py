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

import unittest

import numpy as np

from slot_tools.domain import (ModeStats, ModeSet, CostParams, Partition,
                               TooManyModes, semivariance_lower_bound)
from slot_tools.mode_reader import read_mode_set
from slot_tools.ambiguity import GroupObjective
from slot_tools.solver import (merged_intervals, optimize_group_rho0,
                               optimize_group, solve_group,
                               enumerate_partitions, evaluate_partition,
                               solve_exact, compute_objective,
                               solution_from_json, golden_section)
BASE = './tests/test_modes/'


def random_mode_set(rng, n_modes):
    """ A random ModeSet of realizable modes with Dirichlet probabilities """
    modes = []
    for _ in range(n_modes):
        mean = rng.uniform(30, 400)
        std = rng.uniform(10, 100)
        low = max(semivariance_lower_bound(mean, std), -0.8)
        modes.append(ModeStats(mean, std, rng.uniform(low, 0.8)))
    probs = rng.dirichlet(np.ones(n_modes))
    probs = np.maximum(probs, 1e-3)
    probs = probs / probs.sum()
    return ModeSet([m._replace(nominal_prob=p) for m, p in zip(modes, probs)])


class TestIntervals(unittest.TestCase):

    def test_single_mode(self):
        modes = ModeSet([ModeStats(100, 30, 0)])
        intervals = merged_intervals((0,), modes, CostParams())
        self.assertEqual([b for _, b in intervals], [50, 85, 115, 150, 720])

    def test_two_modes(self):
        modes = ModeSet([ModeStats(100, 30, 0, 0.5),
                         ModeStats(130, 35, 0, 0.5)])
        intervals = merged_intervals((0, 1), modes, CostParams())
        self.assertEqual(len(intervals), 9)
        self.assertEqual(intervals[0][0], 0)
        self.assertEqual(intervals[-1][1], 720)

    def test_clamped(self):
        modes = ModeSet([ModeStats(600, 50, 0)])
        intervals = merged_intervals((0,), modes, CostParams())
        self.assertEqual(intervals[-1], (625.0, 720.0))


class TestGroupOptimum(unittest.TestCase):

    def test_degenerate_rates(self):
        modes = ModeSet([ModeStats(100, 30, 0, 0.5),
                         ModeStats(200, 40, 0, 0.5)])
        solution = optimize_group_rho0((0, 1), modes,
                                       CostParams(overtime_rate=0))
        self.assertEqual(solution.duration, 0)
        self.assertAlmostEqual(solution.worst_cost, 0)
        self.assertEqual(solution.method, "boundary")
        solution = optimize_group_rho0((0, 1), modes, CostParams(idle_rate=0))
        self.assertEqual(solution.duration, 720)

    def test_flat_optimum(self):
        modes = ModeSet([ModeStats(100, 30, 0)])
        solution = optimize_group_rho0((0,), modes, CostParams(25, 25))
        self.assertAlmostEqual(solution.duration, 85)
        self.assertAlmostEqual(solution.worst_cost, 750)

    def test_grid_search(self):
        rng = np.random.default_rng(20)
        for _ in range(100):
            modes = random_mode_set(rng, 1)
            costs = CostParams(rng.uniform(1, 50), rng.uniform(1, 50))
            solution = optimize_group_rho0((0,), modes, costs)
            objective = GroupObjective((0,), modes, costs)
            coarse = np.arange(0, 721, 1.0)
            best = coarse[int(np.argmin([objective.value(t)
                                         for t in coarse]))]
            fine = np.clip(np.arange(max(0, best - 2), min(720, best + 2),
                                     0.01), 0, 720)
            grid_min = min(objective.value(t) for t in fine)
            self.assertLessEqual(solution.worst_cost, grid_min + 1e-3)

    def test_groups_by_grid(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            modes = random_mode_set(rng, 3)
            costs = CostParams(rng.uniform(1, 50), rng.uniform(1, 50))
            solution = optimize_group_rho0((0, 1, 2), modes, costs)
            objective = GroupObjective((0, 1, 2), modes, costs)
            grid = np.linspace(0, 720, 1441)
            grid_min = min(objective.value(t) for t in grid)
            self.assertLessEqual(solution.worst_cost, grid_min + 1e-6)

    def test_small_rho_limit(self):
        rng = np.random.default_rng(22)
        for _ in range(10):
            modes = random_mode_set(rng, 3)
            nominal = optimize_group_rho0((0, 1, 2), modes, CostParams())
            robust = optimize_group((0, 1, 2), modes,
                                    CostParams(tv_radius=1e-9))
            self.assertAlmostEqual(robust.worst_cost, nominal.worst_cost,
                                   delta=1e-4 * nominal.worst_cost)

    def test_singleton_ignores_rho(self):
        modes = ModeSet([ModeStats(100, 30, 0.1)])
        nominal = solve_group((0,), modes, CostParams())
        for rho in (0.1, 1.0):
            robust = solve_group((0,), modes, CostParams(tv_radius=rho))
            self.assertEqual(robust.duration, nominal.duration)
            self.assertEqual(robust.worst_cost, nominal.worst_cost)

    def test_robust_clinic_group(self):
        modes = read_mode_set(BASE + '0-clinic-seven.json')
        solution = optimize_group((2, 3, 4, 5, 6), modes,
                                  CostParams(tv_radius=0.1))
        self.assertAlmostEqual(solution.duration, 221, delta=1)
        self.assertEqual(solution.method, "golden-section")

    def test_golden_section(self):
        lo, hi = golden_section(lambda x: (x - 3.2) ** 2, 0, 10, 1e-6)
        self.assertLessEqual(hi - lo, 1e-6)
        self.assertAlmostEqual((lo + hi) / 2, 3.2, places=5)


class TestPartitions(unittest.TestCase):

    def test_counts(self):
        for n, bell in [(1, 1), (3, 5), (5, 52), (7, 877)]:
            partitions = list(enumerate_partitions(n))
            self.assertEqual(len(partitions), bell)
            self.assertEqual(len(set(partitions)), bell)

    def test_three(self):
        self.assertEqual(list(enumerate_partitions(3)), [
            ((0, 1, 2),), ((0, 1), (2,)), ((0, 2), (1,)), ((0,), (1, 2)),
            ((0,), (1,), (2,))])

    def test_too_many(self):
        with self.assertRaises(TooManyModes):
            list(enumerate_partitions(16))


class TestSolveExact(unittest.TestCase):

    def setUp(self):
        self.modes = read_mode_set(BASE + '0-clinic-seven.json')

    def check(self, solution, durations, objective, reference):
        self.assertEqual(len(solution.durations), len(durations))
        for found, expected in zip(solution.durations, durations):
            self.assertAlmostEqual(found, expected, delta=1)
        self.assertAlmostEqual(solution.objective, objective, delta=0.02)
        # The fixture holds statistics rounded to two decimals
        self.assertAlmostEqual(solution.objective, reference, delta=3)

    def test_clinic_nominal(self):
        solution = solve_exact(self.modes, CostParams())
        self.assertEqual(solution.partition, ((0,), (1,), (2, 3, 4, 5, 6)))
        self.check(solution, (39, 60, 216), 1270.7665, 1268.28)

    def test_clinic_singletons(self):
        # Both optima lie on the second piece, where the worst case is
        # sigma sqrt(q(b+q)(1-s)/2) at t = m - sigma sqrt((b+q)(1-s)/8q)
        solution = solve_exact(self.modes, CostParams())
        short, medium = solution.group_solutions[:2]
        self.assertAlmostEqual(short.duration, 39.596, delta=0.01)
        self.assertAlmostEqual(short.worst_cost, 546.24, delta=0.01)
        self.assertAlmostEqual(medium.duration, 60.065, delta=0.01)
        self.assertAlmostEqual(medium.worst_cost, 790.52, delta=0.01)

    def test_clinic_robust(self):
        for rho, durations, objective, reference in [
                (0.1, (39, 60, 221), 1315.74, 1313.28),
                (0.5, (39, 60, 218, 368), 1389.34, 1386.93),
                (1.0, (39, 60, 238, 368), 1431.59, 1429.20)]:
            solution = solve_exact(self.modes, CostParams(tv_radius=rho))
            self.check(solution, durations, objective, reference)

    def test_threads(self):
        modes = random_mode_set(np.random.default_rng(23), 4)
        serial = solve_exact(modes, CostParams(tv_radius=0.1))
        parallel = solve_exact(modes, CostParams(tv_radius=0.1), threads=2)
        self.assertEqual(serial.partition, parallel.partition)
        self.assertEqual(serial.durations, parallel.durations)

    def test_single_mode(self):
        modes = ModeSet([ModeStats(100, 30, 0)])
        solution = solve_exact(modes, CostParams())
        group = optimize_group_rho0((0,), modes, CostParams())
        self.assertAlmostEqual(solution.objective, 80 + group.worst_cost)

    def test_objective_recomputable(self):
        solution = solve_exact(self.modes, CostParams())
        self.assertAlmostEqual(
            solution.objective,
            compute_objective([g.worst_cost for g in solution.group_solutions],
                              CostParams()), places=9)

    def test_best_over_partitions(self):
        rng = np.random.default_rng(24)
        modes = random_mode_set(rng, 4)
        costs = CostParams()
        best = solve_exact(modes, costs)
        for partition in enumerate_partitions(4):
            other = evaluate_partition(partition, modes, costs)
            self.assertGreaterEqual(other.objective,
                                    best.objective - 1e-9 * best.objective)

    def test_monotone_in_rho(self):
        rng = np.random.default_rng(25)
        for _ in range(10):
            modes = random_mode_set(rng, 5)
            objectives = [solve_exact(modes, CostParams(tv_radius=rho))
                          .objective for rho in (0, 0.1, 0.5, 1)]
            for a, b in zip(objectives, objectives[1:]):
                self.assertLessEqual(a, b + 1e-6 * b)

    def test_json(self):
        solution = solve_exact(self.modes, CostParams())
        doc = solution.to_json(self.modes)
        self.assertEqual(doc["partition"][0], ["30-min"])
        again = solution_from_json(doc, CostParams())
        self.assertEqual(again.partition, solution.partition)
        self.assertEqual(again.durations, solution.durations)
        self.assertAlmostEqual(again.objective, solution.objective)

    def test_mean_variance(self):
        semi = solve_exact(self.modes, CostParams())
        mv = solve_exact(self.modes, CostParams(), "mean-variance")
        self.assertGreaterEqual(mv.objective, semi.objective)
        self.assertIsInstance(mv.partition, Partition)


if __name__ == '__main__':
    unittest.main()
