"""
The sample average approximation benchmark.

Instead of a worst case over an ambiguity set, each group's duration
minimises the average cost over the training samples of its members,
weighted by their conditional nominal probabilities. The minimiser is the
q/(q+b) quantile of that weighted empirical distribution, as for the
newsvendor.
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

import numpy as np

from .domain import MissingSamples, TooManyModes
from .solver import (GroupSolution, Solution, compute_objective,
                     enumerate_partitions, nonempty_subsets, MAX_MODES,
                     is_better)

log = logging.getLogger(__name__)


def _weighted_samples(group, samples, probs):
    values, weights = [], []
    probs = np.asarray(probs, dtype=float)
    center = probs[list(group)] / probs[list(group)].sum()
    for p, mode in zip(center, group):
        mode_samples = np.asarray(samples[mode], dtype=float)
        if mode_samples.size == 0:
            raise MissingSamples("Mode %d has no samples" % mode)
        values.append(mode_samples)
        weights.append(np.full(mode_samples.size, p / mode_samples.size))
    return np.concatenate(values), np.concatenate(weights)


def optimize_group_saa(group, samples, probs, costs):
    """ The duration minimising the weighted sample average cost

        samples: a list per mode of training samples
        probs: the nominal mode probabilities
    """
    group = tuple(group)
    values, weights = _weighted_samples(group, samples, probs)
    order = np.argsort(values, kind='stable')
    values, weights = values[order], weights[order]
    q, b = costs.q, costs.b
    if q == 0:
        duration = 0.0
    else:
        ratio = q / (q + b)
        cumulative = np.cumsum(weights)
        idx = int(np.searchsorted(cumulative, ratio - 1e-12))
        duration = float(values[min(idx, values.size - 1)])
    duration = min(max(duration, 0.0), costs.horizon)
    cost = float(np.dot(weights, q * np.maximum(values - duration, 0) +
                        b * np.maximum(duration - values, 0)))
    return GroupSolution(group, duration, cost, None, "saa")


def solve_saa(sample_set, costs, logger=None):
    """ The partition minimising the template objective with sample average
        group costs over the training samples
    """
    log_ = logger or log
    samples = sample_set.samples("train")
    n_modes = len(samples)
    if n_modes > MAX_MODES:
        raise TooManyModes("%d modes exceeds the enumeration limit of %d" %
                           (n_modes, MAX_MODES))
    cache = dict((g, optimize_group_saa(g, samples, sample_set.nominal_probs,
                                        costs))
                 for g in nonempty_subsets(n_modes))
    best = None
    for partition in enumerate_partitions(n_modes):
        objective = compute_objective([cache[g].worst_cost
                                       for g in partition], costs)
        if best is None or is_better(objective, best[0]):
            best = (objective, partition)
    log_.info("Sample average partition %s objective %.4f", best[1],
              best[0])
    return Solution(best[1], [cache[g] for g in best[1]], costs)
