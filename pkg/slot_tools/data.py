"""
Synthetic instances: lognormal treatment durations per mode, clipped to a
working day, with training and testing samples.

The ground truth of mode l is a lognormal law (mu_l, sigma_l) with mu_l
and sigma_l drawn uniformly. Nominal mode probabilities are drawn
uniformly from the simplex and the n_train training samples are shared
out over the modes by largest remainder, every mode receiving at least
two distinct training values so its moments can be estimated. Test samples may be drawn from perturbed laws, mu(1+eps) and
sigma(1+eps), to study a misspecified model.
"""

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
import math
import os
from collections import namedtuple, OrderedDict

import numpy as np
from scipy.stats import norm

from .domain import (ModeSet, estimate_moments, MissingSamples,
                     DegenerateSample)
from .slot_util import write_samples, read_samples, dumps, load_json

log = logging.getLogger(__name__)

TRAIN_FILE = "train.csv"
TEST_FILE = "test.csv"
TRUTH_FILE = "truth.json"

#: The fewest training samples a generated mode receives
MIN_TRAIN_SAMPLES = 2
#: Redraws of a mode whose training values all coincide before giving up
MAX_REDRAWS = 100


class LogNormalLaw(namedtuple('LogNormalLaw', ['mu', 'sigma'])):
    """ A lognormal law, mu and sigma of the underlying normal """
    __slots__ = ()

    def perturbed(self, epsilon):
        """ The law with mu and sigma both scaled by (1 + epsilon) """
        return LogNormalLaw(self.mu * (1 + epsilon),
                            self.sigma * (1 + epsilon))


class GenConfig(namedtuple('GenConfig', [
        'n_modes', 'logmean_range', 'logstd_range', 'n_train', 'n_test',
        'clip_max', 'seed', 'epsilon'])):
    """ The parameters of a synthetic instance

        n_modes: the number of modes L
        logmean_range: mu is drawn uniformly from this range
        logstd_range: sigma is drawn uniformly from this range
        n_train, n_test: total training and testing samples
        clip_max: samples are clipped to [0, clip_max]
        seed: the random seed
        epsilon: the misspecification of the testing laws
    """
    __slots__ = ()

    def __new__(cls, n_modes=5, logmean_range=(math.log(100), math.log(600)),
                logstd_range=(0.5, 1.5), n_train=100, n_test=1000,
                clip_max=720.0, seed=0, epsilon=0.0):
        self = super(GenConfig, cls).__new__(
            cls, int(n_modes), tuple(logmean_range), tuple(logstd_range),
            int(n_train), int(n_test), float(clip_max), int(seed),
            float(epsilon))
        if self.n_modes < 1:
            raise ValueError("At least one mode is required")
        for name in ('logmean_range', 'logstd_range'):
            low, high = getattr(self, name)
            if not low <= high:
                raise ValueError("%s must be ordered (low, high)" % name)
        if self.logstd_range[0] <= 0:
            raise ValueError("Log standard deviations must be positive")
        if self.n_train < MIN_TRAIN_SAMPLES * self.n_modes:
            raise ValueError("Every mode needs %d training samples" %
                             MIN_TRAIN_SAMPLES)
        if self.n_test < self.n_modes:
            raise ValueError("Every mode needs a testing sample")
        if not self.clip_max > 0:
            raise ValueError("clip_max must be positive")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        return self


def perturb(config, epsilon):
    """ The config whose testing laws are perturbed by epsilon """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    return config._replace(epsilon=float(epsilon))


def allocate_counts(total, probs, minimum=1):
    """ Shares total out in proportion to probs by largest remainder, each
        share at least minimum. Ties go to the lower index.
    """
    probs = np.asarray(probs, dtype=float)
    if total < minimum * probs.size:
        raise ValueError("Cannot give %d modes %d samples each from %d" %
                         (probs.size, minimum, total))
    exact = total * probs / probs.sum()
    counts = np.maximum(np.floor(exact).astype(int), minimum)
    remainder = exact - np.floor(exact)
    short = total - counts.sum()
    # Stable sorts break ties by index
    if short > 0:
        for idx in np.argsort(-remainder, kind='stable')[:short]:
            counts[idx] += 1
    while short < 0:
        # Take back from the modes furthest over their exact share
        over = counts - exact
        over[counts <= minimum] = -np.inf
        idx = int(np.argmax(over))
        counts[idx] -= 1
        short += 1
    return counts


def clipped_lognormal_mean(law, clip):
    """ E[min(X, clip)] for X lognormal(mu, sigma) """
    mu, sigma = law
    log_clip = math.log(clip)
    below = math.exp(mu + sigma ** 2 / 2) * norm.cdf(
        (log_clip - mu - sigma ** 2) / sigma)
    return below + clip * norm.sf((log_clip - mu) / sigma)


class SampleSet(object):
    """ Training and testing duration samples per mode

        names: the mode names
        train, test: a list per mode of numpy arrays, test may be None
        nominal_probs: the nominal mode probabilities
        truth: a LogNormalLaw per mode, or None when not synthetic
    """
    names = None
    train = None
    test = None
    nominal_probs = None
    truth = None
    #: The GenConfig that generated the set, or None
    config = None

    def __init__(self, names, train, nominal_probs, test=None, truth=None,
                 config=None):
        self.names = list(names)
        self.train = [np.asarray(v, dtype=float) for v in train]
        self.test = None if test is None else [np.asarray(v, dtype=float)
                                                for v in test]
        self.nominal_probs = np.asarray(nominal_probs, dtype=float)
        self.truth = truth
        self.config = config
        if len(self.train) != len(self.names) or \
                self.nominal_probs.size != len(self.names):
            raise ValueError("Names, samples and probabilities must align")

    @property
    def realized_probs(self):
        """ The training share of each mode """
        counts = np.array([v.size for v in self.train], dtype=float)
        return counts / counts.sum()

    def samples(self, which="train"):
        samples = self.train if which == "train" else self.test
        if samples is None:
            raise MissingSamples("No %s samples" % which)
        return samples

    def mode_set(self, which="train", logger=None):
        """ The ModeSet estimated from the samples, with nominal probs """
        modes = [estimate_moments(values, p, name) for values, p, name in
                 zip(self.samples(which), self.nominal_probs, self.names)]
        return ModeSet(modes, logger=logger)

    def to_files(self, directory):
        """ Writes train.csv, test.csv and truth.json into directory """
        if not os.path.isdir(directory):
            os.makedirs(directory)
        write_samples(os.path.join(directory, TRAIN_FILE),
                      OrderedDict(zip(self.names, self.train)))
        if self.test is not None:
            write_samples(os.path.join(directory, TEST_FILE),
                          OrderedDict(zip(self.names, self.test)))
        truth = {"names": self.names,
                 "nominal_probs": self.nominal_probs,
                 "realized_probs": self.realized_probs}
        if self.truth is not None:
            truth["laws"] = [law._asdict() for law in self.truth]
        if self.config is not None:
            truth["config"] = self.config._asdict()
        with open(os.path.join(directory, TRUTH_FILE), 'w') as fout:
            fout.write(dumps(truth))
            fout.write("\n")

    @classmethod
    def from_files(cls, directory):
        """ Reads a SampleSet written by to_files """
        truth = load_json(os.path.join(directory, TRUTH_FILE))
        names = truth["names"]
        train = read_samples(os.path.join(directory, TRAIN_FILE), names)
        test_path = os.path.join(directory, TEST_FILE)
        test = None
        if os.path.exists(test_path):
            test = list(read_samples(test_path, names).values())
        laws = None
        if "laws" in truth:
            laws = [LogNormalLaw(l["mu"], l["sigma"]) for l in truth["laws"]]
        config = None
        if "config" in truth:
            config = GenConfig(**truth["config"])
        return cls(names, list(train.values()), truth["nominal_probs"],
                   test=test, truth=laws, config=config)


def _draw_train(rng, law, n, clip_max):
    """ Draws n clipped values, at least two of them distinct """
    for _ in range(MAX_REDRAWS):
        values = np.clip(rng.lognormal(law.mu, law.sigma, n), 0, clip_max)
        if np.unique(values).size > 1:
            return values
        log.debug("Redrawing %d coincident samples of %s", n, law)
    raise DegenerateSample("No spread in %d draws of %s clipped to %r" %
                           (MAX_REDRAWS, law, clip_max))


def generate(config):
    """ Draws a synthetic SampleSet, deterministic for config.seed """
    rng = np.random.default_rng(config.seed)
    L = config.n_modes
    mus = rng.uniform(config.logmean_range[0], config.logmean_range[1], L)
    sigmas = rng.uniform(config.logstd_range[0], config.logstd_range[1], L)
    probs = rng.dirichlet(np.ones(L))
    laws = [LogNormalLaw(float(mu), float(s)) for mu, s in zip(mus, sigmas)]

    train_counts = allocate_counts(config.n_train, probs, MIN_TRAIN_SAMPLES)
    test_counts = allocate_counts(config.n_test, probs)
    train = [_draw_train(rng, law, int(n), config.clip_max)
             for law, n in zip(laws, train_counts)]
    test = []
    for law, n in zip(laws, test_counts):
        law = law.perturbed(config.epsilon)
        test.append(np.clip(rng.lognormal(law.mu, law.sigma, int(n)), 0,
                            config.clip_max))
    log.debug("Generated %d modes, train counts %s", L, train_counts)
    names = ["type%d" % (i + 1) for i in range(L)]
    return SampleSet(names, train, probs, test=test, truth=laws,
                     config=config)
