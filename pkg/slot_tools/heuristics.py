"""
Grouping modes by clustering their moment features.

K-Means and K-Medoids cluster the L mode feature vectors into K groups,
the durations of which are then optimised as in the exact solver. K may be
chosen by cross-validation over the training samples.
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
from collections import namedtuple

import numpy as np
from scipy.spatial.distance import cdist
from six import string_types

from .domain import (ModeSet, Partition, InsufficientSamples,
                     estimate_moments)
from .solver import evaluate_partition
from .evaluation import empirical_cost_of

log = logging.getLogger(__name__)

#: Accepted names of each feature component
COMPONENT_ALIASES = {"m": "mean", "mean": "mean",
                     "sigma": "std", "std": "std", "s": "semivariance",
                     "semivariance": "semivariance"}

METHODS = ("kmeans", "kmedoids")


class FeatureSpec(namedtuple('FeatureSpec', ['components', 'standardize'])):
    """ The mode features to cluster on

        components: a nonempty subset of ("mean", "std", "semivariance")
        standardize: z-score each component before clustering
    """
    __slots__ = ()

    def __new__(cls, components=("mean", "std", "semivariance"),
                standardize=True):
        if isinstance(components, string_types):
            components = components.split(",")
        names = []
        for comp in components:
            comp = comp.strip()
            if comp not in COMPONENT_ALIASES:
                raise ValueError("Unknown feature %s, expected one of %s" %
                                 (comp, ", ".join(sorted(COMPONENT_ALIASES))))
            if COMPONENT_ALIASES[comp] not in names:
                names.append(COMPONENT_ALIASES[comp])
        if not names:
            raise ValueError("At least one feature is required")
        return super(FeatureSpec, cls).__new__(cls, tuple(names),
                                               bool(standardize))

    @classmethod
    def default_for(cls, method):
        """ (m, s) for K-Means and (m, sigma, s) for K-Medoids """
        if method == "kmeans":
            return cls(("mean", "semivariance"))
        return cls(("mean", "std", "semivariance"))


class ClusterConfig(namedtuple('ClusterConfig', ['k', 'restarts',
                                                 'max_iters', 'seed'])):
    """ k clusters, best of restarts runs of at most max_iters iterations """
    __slots__ = ()

    def __new__(cls, k, restarts=10, max_iters=100, seed=0):
        self = super(ClusterConfig, cls).__new__(cls, int(k), int(restarts),
                                                 int(max_iters), int(seed))
        if self.k < 1 or self.restarts < 1 or self.max_iters < 1:
            raise ValueError("k, restarts and max_iters must be >= 1")
        return self


def feature_matrix(mode_set, spec):
    """ The L by d feature matrix of a ModeSet """
    columns = {"mean": [m.mean for m in mode_set],
               "std": [m.std_dev for m in mode_set],
               "semivariance": [m.semivariance for m in mode_set]}
    X = np.column_stack([columns[c] for c in spec.components]).astype(float)
    if spec.standardize:
        X = X - X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
        X = X / scale
    return X


def _check_k(X, config):
    if config.k > X.shape[0]:
        raise ValueError("k=%d exceeds the %d modes" % (config.k, X.shape[0]))


def _repair_empty(labels, distances, k):
    """ Moves the point furthest from its centre into each empty cluster """
    used = set()
    for cluster in range(k):
        if np.any(labels == cluster):
            continue
        own = distances[np.arange(labels.size), labels]
        counts = np.bincount(labels, minlength=k)
        # Never empty another cluster
        own[counts[labels] <= 1] = -np.inf
        for idx in used:
            own[idx] = -np.inf
        far = int(np.argmax(own))
        labels[far] = cluster
        used.add(far)
    return labels


def _lloyd(X, k, rng, max_iters):
    centroids = X[rng.choice(X.shape[0], size=k, replace=False)]
    labels = None
    history = []
    for _ in range(max_iters):
        distances = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = _repair_empty(np.argmin(distances, axis=1), distances, k)
        centroids = np.array([X[new_labels == j].mean(axis=0)
                              for j in range(k)])
        wcss = float(((X - centroids[new_labels]) ** 2).sum())
        history.append(wcss)
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
    return labels, history[-1], history


def kmeans(features, config, history=None):
    """ Clusters the rows of features by Lloyd's algorithm

        Runs from config.restarts random sets of k distinct seed points and
        keeps the lowest within-cluster sum of squares. history, if a list,
        receives the WCSS sequence of every restart.
    """
    X = np.asarray(features, dtype=float)
    _check_k(X, config)
    best = None
    for restart in range(config.restarts):
        rng = np.random.default_rng([config.seed, restart])
        labels, wcss, runs = _lloyd(X, config.k, rng, config.max_iters)
        if history is not None:
            history.append(runs)
        if best is None or wcss < best[0] - 1e-12:
            best = (wcss, labels)
    log.debug("k-means k=%d wcss %.6g", config.k, best[0])
    return Partition.from_labels(best[1])


def _medoid_cost(D, medoids):
    return float(D[:, medoids].min(axis=1).sum())


def _alternate(D, k, rng, max_iters):
    medoids = rng.choice(D.shape[0], size=k, replace=False)
    history = [_medoid_cost(D, medoids)]
    for _ in range(max_iters):
        labels = _repair_empty(np.argmin(D[:, medoids], axis=1),
                               D[:, medoids], k)
        updated = medoids.copy()
        for cluster in range(k):
            members = np.flatnonzero(labels == cluster)
            within = D[np.ix_(members, members)].sum(axis=0)
            updated[cluster] = members[int(np.argmin(within))]
        history.append(_medoid_cost(D, updated))
        if np.array_equal(np.sort(updated), np.sort(medoids)):
            break
        if history[-1] > history[-2]:
            history.pop()
            break
        medoids = updated
    labels = np.argmin(D[:, medoids], axis=1)
    # Coincident points must not take a medoid out of its own cluster
    labels[medoids] = np.arange(k)
    return labels, history[-1], history


def kmedoids(features, config, history=None):
    """ Clusters the rows of features around k member medoids

        Alternates assignment to the nearest medoid and choosing, within
        each cluster, the member with the least total Euclidean distance to
        the others; best of config.restarts runs.
    """
    X = np.asarray(features, dtype=float)
    _check_k(X, config)
    D = cdist(X, X, metric='euclidean')
    best = None
    for restart in range(config.restarts):
        rng = np.random.default_rng([config.seed, restart])
        labels, cost, runs = _alternate(D, config.k, rng, config.max_iters)
        if history is not None:
            history.append(runs)
        if best is None or cost < best[0] - 1e-12:
            best = (cost, labels)
    log.debug("k-medoids k=%d cost %.6g", config.k, best[0])
    return Partition.from_labels(best[1])


def cluster(features, config, method="kmeans"):
    if method == "kmeans":
        return kmeans(features, config)
    if method == "kmedoids":
        return kmedoids(features, config)
    raise ValueError("Unknown method %s, expected one of %s" %
                     (method, ", ".join(METHODS)))


def _folds(sample_set, folds, seed):
    """ Splits each mode's training samples into folds """
    splits = []
    for mode, values in enumerate(sample_set.samples("train")):
        if values.size < folds:
            raise InsufficientSamples(
                "Mode %s has %d samples, fewer than %d folds" %
                (sample_set.names[mode], values.size, folds))
        rng = np.random.default_rng([seed, mode])
        splits.append(np.array_split(rng.permutation(values), folds))
    return splits


def validation_scores(sample_set, costs, feature_spec, folds=5,
                      k_range=None, seed=0, method="kmeans",
                      moment_set="semivariance"):
    """ The mean held-out empirical cost of each K """
    n_modes = len(sample_set.names)
    if k_range is None:
        k_range = range(1, n_modes + 1)
    k_range = sorted(set(int(k) for k in k_range if 1 <= k <= n_modes))
    if not k_range:
        raise ValueError("No K within 1..%d" % n_modes)
    splits = _folds(sample_set, folds, seed)
    probs = sample_set.nominal_probs
    scores = dict((k, []) for k in k_range)
    for fold in range(folds):
        train = [np.concatenate([s for i, s in enumerate(parts) if i != fold])
                 for parts in splits]
        held = [parts[fold] for parts in splits]
        mode_set = ModeSet([estimate_moments(v, p, n) for v, p, n in
                            zip(train, probs, sample_set.names)])
        features = feature_matrix(mode_set, feature_spec)
        cache = {}
        for k in k_range:
            partition = cluster(features, ClusterConfig(k, seed=seed), method)
            solution = evaluate_partition(partition, mode_set, costs,
                                          moment_set, cache=cache)
            report = empirical_cost_of(solution, held, probs, costs)
            scores[k].append(report.total_cost)
    return dict((k, float(np.mean(v))) for k, v in scores.items())


def crossvalidate_k(sample_set, costs, feature_spec, folds=5, k_range=None,
                    seed=0, method="kmeans", moment_set="semivariance"):
    """ The K with the lowest mean validation cost, the smaller K on ties """
    scores = validation_scores(sample_set, costs, feature_spec, folds,
                               k_range, seed, method, moment_set)
    best = min(sorted(scores), key=lambda k: scores[k])
    log.info("Cross-validated K=%d (%s)", best, ", ".join(
        "%d: %.2f" % (k, scores[k]) for k in sorted(scores)))
    return best


def solve_heuristic(source, costs, feature_spec=None, method="kmeans",
                    k="auto", config=None, folds=5,
                    moment_set="semivariance"):
    """ Clusters the modes then optimises each group's duration

        source: a ModeSet, or a SampleSet whose training samples give the
                moments (required when k is "auto")
        k: an integer or "auto" for cross-validation
        config: a ClusterConfig supplying restarts, iterations and seed
    """
    if feature_spec is None:
        feature_spec = FeatureSpec.default_for(method)
    seed = 0 if config is None else config.seed
    if isinstance(source, ModeSet):
        mode_set, sample_set = source, None
    else:
        mode_set, sample_set = source.mode_set("train"), source
    if k == "auto":
        if sample_set is None:
            raise ValueError("Choosing K needs samples, not only a ModeSet")
        k = crossvalidate_k(sample_set, costs, feature_spec, folds,
                            seed=seed, method=method, moment_set=moment_set)
    if config is None:
        config = ClusterConfig(k)
    else:
        config = config._replace(k=int(k))
    partition = cluster(feature_matrix(mode_set, feature_spec), config,
                        method)
    log.info("%s grouped %d modes into %s", method, len(mode_set), partition)
    return evaluate_partition(partition, mode_set, costs, moment_set)
