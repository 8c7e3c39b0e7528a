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

from slot_tools.domain import CostParams, TooManyModes, MissingSamples
from slot_tools.data import SampleSet
from slot_tools.evaluation import sample_costs
from slot_tools.saa import optimize_group_saa, solve_saa


class TestOptimizeGroupSAA(unittest.TestCase):

    def test_quantile(self):
        solution = optimize_group_saa((0,), [[10, 20, 30, 40]], [1.0],
                                      CostParams())
        self.assertEqual(solution.duration, 30)
        self.assertAlmostEqual(solution.worst_cost, 225)
        self.assertEqual(solution.method, "saa")

    def test_beats_grid(self):
        rng = np.random.default_rng(70)
        samples = [rng.lognormal(4.5, 0.5, 50), rng.lognormal(5, 0.4, 80)]
        costs = CostParams()
        solution = optimize_group_saa((0, 1), samples, [0.3, 0.7], costs)
        for t in np.arange(0, 721, 5.0):
            cost = (0.3 * sample_costs(samples[0], t, 30, 20)[0] +
                    0.7 * sample_costs(samples[1], t, 30, 20)[0])
            self.assertLessEqual(solution.worst_cost, cost + 1e-9)

    def test_no_overtime_cost(self):
        solution = optimize_group_saa((0,), [[10, 20, 30, 40]], [1.0],
                                      CostParams(overtime_rate=0))
        # Slots of length zero are never idle
        self.assertEqual(solution.duration, 0)
        self.assertAlmostEqual(solution.worst_cost, 0)

    def test_clamped_to_horizon(self):
        solution = optimize_group_saa((0,), [[100, 900]], [1.0],
                                      CostParams(idle_rate=0))
        self.assertEqual(solution.duration, 720)

    def test_missing(self):
        with self.assertRaises(MissingSamples):
            optimize_group_saa((0, 1), [[10], []], [0.5, 0.5], CostParams())


class TestSolveSAA(unittest.TestCase):

    def test_separates_far_modes(self):
        rng = np.random.default_rng(71)
        samples = SampleSet(["short", "long"],
                            [rng.normal(30, 5, 100).clip(1),
                             rng.normal(300, 20, 100)], [0.5, 0.5])
        solution = solve_saa(samples, CostParams())
        self.assertEqual(solution.partition, ((0,), (1,)))
        self.assertTrue(all(g.method == "saa"
                            for g in solution.group_solutions))

    def test_merges_close_modes(self):
        rng = np.random.default_rng(72)
        samples = SampleSet(["a", "b"], [rng.normal(100, 10, 100),
                                         rng.normal(101, 10, 100)],
                            [0.5, 0.5])
        solution = solve_saa(samples, CostParams())
        self.assertEqual(solution.partition, ((0, 1),))

    def test_too_many(self):
        samples = SampleSet(["m%d" % i for i in range(16)],
                            [[10, 20]] * 16, np.full(16, 1 / 16.0))
        with self.assertRaises(TooManyModes):
            solve_saa(samples, CostParams())


if __name__ == '__main__':
    unittest.main()
