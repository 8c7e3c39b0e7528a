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

import os
import shutil
import tempfile
import unittest

import numpy as np

from slot_tools.domain import MissingSamples, DegenerateSample
from slot_tools.data import (LogNormalLaw, GenConfig, SampleSet, perturb,
                             allocate_counts, clipped_lognormal_mean,
                             generate, TRAIN_FILE, TEST_FILE, TRUTH_FILE)


class TestGenConfig(unittest.TestCase):

    def test_defaults(self):
        config = GenConfig()
        self.assertEqual(config.n_modes, 5)
        self.assertEqual(config.clip_max, 720.0)
        self.assertEqual(config.epsilon, 0.0)

    def test_invalid(self):
        for bad in ({"n_modes": 0}, {"logmean_range": (6, 5)},
                    {"logstd_range": (0, 1)}, {"n_train": 3}, {"n_train": 9},
                    {"n_test": 2}, {"clip_max": 0}, {"epsilon": -0.1}):
            with self.assertRaises(ValueError):
                GenConfig(**bad)

    def test_perturb(self):
        config = perturb(GenConfig(seed=3), 0.2)
        self.assertEqual(config.epsilon, 0.2)
        self.assertEqual(config.seed, 3)
        with self.assertRaises(ValueError):
            perturb(config, -1)
        self.assertEqual(LogNormalLaw(5, 1).perturbed(0.1),
                         (5 * 1.1, 1.1))


class TestAllocateCounts(unittest.TestCase):

    def test_exact(self):
        self.assertEqual(list(allocate_counts(10, [0.5, 0.3, 0.2])),
                         [5, 3, 2])

    def test_ties_to_lower_index(self):
        self.assertEqual(list(allocate_counts(10, [1, 1, 1])), [4, 3, 3])

    def test_minimum(self):
        self.assertEqual(list(allocate_counts(5, [0.97, 0.01, 0.02])),
                         [3, 1, 1])
        with self.assertRaises(ValueError):
            allocate_counts(2, [0.5, 0.3, 0.2])
        self.assertEqual(list(allocate_counts(10, [0.9, 0.05, 0.05], 2)),
                         [6, 2, 2])

    def test_sum(self):
        rng = np.random.default_rng(60)
        for _ in range(100):
            probs = rng.dirichlet(np.ones(6))
            total = int(rng.integers(6, 500))
            counts = allocate_counts(total, probs)
            self.assertEqual(counts.sum(), total)
            self.assertTrue(np.all(counts >= 1))


class TestGenerate(unittest.TestCase):

    def test_clipped_mean(self):
        law = LogNormalLaw(5.5, 0.9)
        rng = np.random.default_rng(61)
        samples = np.minimum(rng.lognormal(law.mu, law.sigma, 400000), 720)
        expected = clipped_lognormal_mean(law, 720)
        self.assertAlmostEqual(samples.mean(), expected, delta=0.01 * expected)
        self.assertLess(expected, np.exp(law.mu + law.sigma ** 2 / 2))

    def test_deterministic(self):
        first = generate(GenConfig(seed=4))
        again = generate(GenConfig(seed=4))
        other = generate(GenConfig(seed=5))
        for a, b in zip(first.train, again.train):
            self.assertTrue(np.array_equal(a, b))
        self.assertFalse(np.array_equal(first.train[0], other.train[0]))

    def test_shape(self):
        config = GenConfig(n_modes=4, n_train=200, n_test=300, seed=6)
        samples = generate(config)
        self.assertEqual(samples.names, ["type1", "type2", "type3", "type4"])
        self.assertEqual(sum(v.size for v in samples.train), 200)
        self.assertEqual(sum(v.size for v in samples.test), 300)
        self.assertAlmostEqual(samples.nominal_probs.sum(), 1)
        self.assertAlmostEqual(samples.realized_probs.sum(), 1)
        for values in samples.train + samples.test:
            self.assertTrue(np.all(values >= 0))
            self.assertTrue(np.all(values <= 720))
        for law in samples.truth:
            self.assertTrue(np.log(100) <= law.mu <= np.log(600))
            self.assertTrue(0.5 <= law.sigma <= 1.5)
        self.assertIs(samples.config, config)

    def test_every_seed_estimable(self):
        for seed in range(30):
            samples = generate(GenConfig(seed=seed))
            for values in samples.train:
                self.assertGreaterEqual(values.size, 2)
                self.assertGreater(np.unique(values).size, 1)
            modes = samples.mode_set("train")
            self.assertEqual(len(modes), 5)
            self.assertTrue(all(modes.feasibility()))

    def test_no_spread(self):
        config = GenConfig(n_modes=2, n_train=10, n_test=10, clip_max=1e-3)
        with self.assertRaises(DegenerateSample):
            generate(config)

    def test_perturbed_test_samples(self):
        base = generate(GenConfig(seed=7, n_test=20000))
        shifted = generate(perturb(GenConfig(seed=7, n_test=20000), 0.3))
        # Training draws precede the testing draws
        for a, b in zip(base.train, shifted.train):
            self.assertTrue(np.array_equal(a, b))
        self.assertGreater(np.concatenate(shifted.test).mean(),
                           np.concatenate(base.test).mean())

    def test_mode_set(self):
        samples = generate(GenConfig(seed=8))
        modes = samples.mode_set()
        self.assertEqual(modes.names, samples.names)
        self.assertTrue(np.allclose(modes.probs, samples.nominal_probs))
        self.assertAlmostEqual(modes[0].mean, samples.train[0].mean())


class TestSampleSetFiles(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_write_read(self):
        samples = generate(GenConfig(seed=9))
        directory = os.path.join(self.tmp, "instance")
        samples.to_files(directory)
        for name in (TRAIN_FILE, TEST_FILE, TRUTH_FILE):
            self.assertTrue(os.path.exists(os.path.join(directory, name)))
        again = SampleSet.from_files(directory)
        self.assertEqual(again.names, samples.names)
        for a, b in zip(again.train + again.test,
                        samples.train + samples.test):
            self.assertTrue(np.allclose(a, b))
        self.assertTrue(np.allclose(again.nominal_probs,
                                    samples.nominal_probs))
        self.assertEqual(again.truth, samples.truth)
        self.assertEqual(again.config, samples.config)

    def test_no_test_samples(self):
        samples = SampleSet(["a"], [[10, 20, 30]], [1.0])
        samples.to_files(self.tmp)
        self.assertFalse(os.path.exists(os.path.join(self.tmp, TEST_FILE)))
        again = SampleSet.from_files(self.tmp)
        self.assertIsNone(again.test)
        with self.assertRaises(MissingSamples):
            again.samples("test")

    def test_misaligned(self):
        with self.assertRaises(ValueError):
            SampleSet(["a", "b"], [[1, 2]], [1.0])


if __name__ == '__main__':
    unittest.main()
