"""
The core types shared by every part of slot_tools.

A mode is one patient type, described by the first three moments of its
treatment duration (mean, standard deviation and normalised semivariance)
and a nominal probability. A ModeSet is the ordered collection of modes,
a Partition groups mode indices and CostParams holds the overtime, idle,
activation and ambiguity parameters of a template design problem.

Mode indices are 0-based throughout the library.

All types are immutable once constructed.
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
from collections import namedtuple

import numpy as np
from six import integer_types, string_types

log = logging.getLogger(__name__)

#: Tolerance on the sum of nominal probabilities when loading a ModeSet
PROB_TOLERANCE = 1e-9


class SlotError(Exception):
    """ The base of all errors raised by slot_tools """


class InvalidParameter(SlotError, ValueError):
    """ A cost or configuration parameter is outside its domain """


class InfeasibleStats(SlotError, ValueError):
    """ Mode statistics violate the realizability condition on the mean,
        standard deviation and semivariance.
    """
    def __init__(self, report):
        self.report = report
        SlotError.__init__(self, str(report))


class DegenerateSample(SlotError, ValueError):
    """ A sample has zero variance so its moments cannot be used """


class OutOfRange(SlotError, ValueError):
    """ A duration lies outside [0, horizon] """


class UndefinedWitness(SlotError, LookupError):
    """ No extremal distribution with non-negative support exists at t """


class TooManyModes(SlotError, ValueError):
    """ Partition enumeration was asked for more modes than the guard """


class InsufficientSamples(SlotError, ValueError):
    """ A mode has fewer samples than cross-validation folds """


class MissingSamples(SlotError, LookupError):
    """ A mode used by a solution has no samples to evaluate against """


class CapacityTooSmall(SlotError, ValueError):
    """ A template capacity leaves a group without a single slot """


class ModeFormatError(SlotError, ValueError):
    """ A mode-set document could not be read """


class ModeStats(namedtuple('ModeStats', ['mean', 'std_dev', 'semivariance',
                                         'nominal_prob', 'name'])):
    """ The moment description of a single mode

        mean: minutes (m)
        std_dev: minutes (sigma)
        semivariance: normalised semivariance in [-1, 1) (s)
        nominal_prob: the nominal probability of this mode (p)
        name: an optional label, used in reports

        Construction does not enforce realizability, use check_feasibility.
    """
    __slots__ = ()

    def __new__(cls, mean, std_dev, semivariance, nominal_prob=1.0,
                name=None):
        return super(ModeStats, cls).__new__(
            cls, float(mean), float(std_dev), float(semivariance),
            float(nominal_prob), name)

    @property
    def variance(self):
        return self.std_dev ** 2

    @property
    def label(self):
        if self.name is None:
            return "%.2f/%.2f/%.3f" % (self.mean, self.std_dev,
                                       self.semivariance)
        return self.name


class Violation(namedtuple('Violation', ['bound', 'value', 'limit', 'slack'])):
    """ A single violated bound.
        slack is negative and measures how far value lies outside limit.
    """
    __slots__ = ()

    def __str__(self):
        return "%s: value %.6g, limit %.6g (slack %.3g)" % (
            self.bound, self.value, self.limit, self.slack)


class FeasibilityReport(object):
    """ The outcome of check_feasibility, violations are values, not errors """
    #: The ModeStats checked
    stats = None
    #: The lower bound (sigma^2-m^2)/(sigma^2+m^2) on the semivariance, or
    #: None when the mean or standard deviation is not positive
    lower_bound = None
    #: A list of Violation, empty when feasible
    violations = None

    def __init__(self, stats, lower_bound, violations):
        self.stats = stats
        self.lower_bound = lower_bound
        self.violations = list(violations)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok
    __nonzero__ = __bool__

    def as_dict(self):
        return {"name": self.stats.name,
                "ok": self.ok,
                "semivariance_lower_bound": self.lower_bound,
                "violations": [v._asdict() for v in self.violations]}

    def __str__(self):
        if self.ok:
            return "%s ok" % self.stats.label
        return "%s infeasible; %s" % (
            self.stats.label, "; ".join(str(v) for v in self.violations))


def semivariance_lower_bound(mean, std_dev):
    """ The smallest normalised semivariance realizable for (m, sigma) """
    var = std_dev ** 2
    sq = mean ** 2
    return (var - sq) / (var + sq)


def check_feasibility(stats):
    """ Checks mean > 0, std_dev > 0 and
        (sigma^2-m^2)/(sigma^2+m^2) <= s < 1.

        Returns a FeasibilityReport, violations name the bound and slack.
    """
    violations = []
    lower = None
    if not stats.mean > 0:
        violations.append(Violation("mean > 0", stats.mean, 0.0, stats.mean))
    if not stats.std_dev > 0:
        violations.append(Violation("std_dev > 0", stats.std_dev, 0.0,
                                    stats.std_dev))
    if not violations:
        lower = semivariance_lower_bound(stats.mean, stats.std_dev)
        if stats.semivariance < lower:
            violations.append(Violation(
                "semivariance >= (sigma^2-m^2)/(sigma^2+m^2)",
                stats.semivariance, lower, stats.semivariance - lower))
    if not stats.semivariance < 1.0:
        violations.append(Violation("semivariance < 1", stats.semivariance,
                                    1.0, 1.0 - stats.semivariance))
    if math.isnan(stats.semivariance):
        violations.append(Violation("semivariance is a number",
                                    stats.semivariance, 0.0, float('nan')))
    return FeasibilityReport(stats, lower, violations)


def require_feasible(stats):
    """ Raises InfeasibleStats unless check_feasibility(stats) is ok """
    report = check_feasibility(stats)
    if not report.ok:
        raise InfeasibleStats(report)
    return report


def estimate_moments(samples, nominal_prob=1.0, name=None):
    """ Estimates a ModeStats from a sample of durations

        The standard deviation uses divisor n and the semivariance is
        (sum((x-m)+^2) - sum((m-x)+^2)) / (n sigma^2).
    """
    values = np.asarray(samples, dtype=float)
    if values.size == 0:
        raise DegenerateSample("No samples for mode %s" % (name,))
    if np.any(values < 0):
        raise ValueError("Durations must be non-negative")
    mean = values.mean()
    dev = values - mean
    var = np.mean(dev ** 2)
    if not var > 0:
        raise DegenerateSample("Zero variance sample for mode %s (all %s)" %
                               (name, values[0]))
    upper = np.sum(np.maximum(dev, 0) ** 2)
    lower = np.sum(np.maximum(-dev, 0) ** 2)
    semivariance = (upper - lower) / (values.size * var)
    return ModeStats(mean, math.sqrt(var), semivariance, nominal_prob, name)


class ModeSet(tuple):
    """ An ordered tuple of ModeStats whose nominal probabilities sum to one

        Probabilities summing to within PROB_TOLERANCE of one are
        renormalised, otherwise a ValueError is raised.
    """

    def __new__(cls, modes, logger=None):
        modes = list(modes)
        if not modes:
            raise ModeFormatError("A ModeSet requires at least one mode")
        total = sum(m.nominal_prob for m in modes)
        if any(not m.nominal_prob > 0 for m in modes):
            raise ModeFormatError("Nominal probabilities must be positive")
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise ModeFormatError("Nominal probabilities sum to %r, not 1"
                                  % total)
        if total != 1.0:
            (logger or log).debug("Renormalising probabilities summing to %r",
                                  total)
            modes = [m._replace(nominal_prob=m.nominal_prob / total)
                     for m in modes]
        named = []
        for idx, mode in enumerate(modes):
            if mode.name is None:
                mode = mode._replace(name="mode%d" % (idx + 1))
            named.append(mode)
        return tuple.__new__(cls, named)

    @property
    def names(self):
        return [m.name for m in self]

    @property
    def probs(self):
        return np.array([m.nominal_prob for m in self])

    def index(self, key):
        """ Look up a mode index by name or index """
        if isinstance(key, integer_types):
            if 0 <= key < len(self):
                return key
            raise LookupError("No mode index %s" % key)
        if isinstance(key, string_types):
            for idx, mode in enumerate(self):
                if mode.name == key:
                    return idx
        raise LookupError("No mode named %s" % (key,))

    def feasibility(self):
        """ A FeasibilityReport per mode """
        return [check_feasibility(m) for m in self]


def conditional_probs(group, mode_set):
    """ The nominal probabilities of group members rescaled to sum to one """
    group = tuple(group)
    if not group:
        raise ValueError("A group must be nonempty")
    weights = np.array([mode_set[l].nominal_prob for l in group], dtype=float)
    return weights / weights.sum()


class CostParams(namedtuple('CostParams', ['overtime_rate', 'idle_rate',
                                           'activation_cost', 'horizon',
                                           'tv_radius'])):
    """ The cost parameters of a template design problem

        overtime_rate: cost per minute a patient runs past the slot (q)
        idle_rate: cost per minute a slot sits empty (b)
        activation_cost: cost of activating a group (c)
        horizon: the longest allowed slot in minutes (T)
        tv_radius: total-variation radius of the mode probability ball (rho)
    """
    __slots__ = ()

    def __new__(cls, overtime_rate=30.0, idle_rate=20.0, activation_cost=80.0,
                horizon=720.0, tv_radius=0.0):
        self = super(CostParams, cls).__new__(
            cls, float(overtime_rate), float(idle_rate),
            float(activation_cost), float(horizon), float(tv_radius))
        if self.overtime_rate < 0 or self.idle_rate < 0:
            raise InvalidParameter("Overtime and idle rates must be >= 0")
        if not self.overtime_rate + self.idle_rate > 0:
            raise InvalidParameter("Overtime and idle rates cannot both be 0")
        if self.activation_cost < 0:
            raise InvalidParameter("Activation cost must be >= 0")
        if not self.horizon > 0:
            raise InvalidParameter("The horizon must be positive")
        if not 0 <= self.tv_radius <= 1:
            raise InvalidParameter("The TV radius must lie in [0, 1]")
        return self

    # Short names used in the closed forms
    @property
    def q(self):
        return self.overtime_rate

    @property
    def b(self):
        return self.idle_rate

    @property
    def c(self):
        return self.activation_cost

    @property
    def T(self):
        return self.horizon

    @property
    def rho(self):
        return self.tv_radius


class Partition(tuple):
    """ A set partition of mode indices 0..L-1

        Groups are stored as sorted tuples, ordered by their smallest member,
        so two partitions of the same sets compare equal.
    """

    def __new__(cls, groups, n_modes=None):
        canon = sorted((tuple(sorted(g)) for g in groups), key=lambda g: g[:1])
        seen = set()
        for group in canon:
            if not group:
                raise ValueError("Partitions cannot contain an empty group")
            for idx in group:
                if idx in seen:
                    raise ValueError("Mode %s appears in two groups" % idx)
                seen.add(idx)
        if n_modes is None:
            n_modes = len(seen)
        if seen != set(range(n_modes)):
            raise ValueError("Partition groups %s do not cover 0..%d" %
                             (canon, n_modes - 1))
        return tuple.__new__(cls, canon)

    @classmethod
    def from_labels(cls, labels):
        """ Builds a Partition from a cluster label per mode """
        groups = {}
        for idx, label in enumerate(labels):
            groups.setdefault(label, []).append(idx)
        return cls(groups.values(), len(labels))

    @property
    def n_modes(self):
        return sum(len(g) for g in self)

    def restricted_growth_string(self):
        """ The canonical label string, group k holds the k-th new label """
        labels = [0] * self.n_modes
        for gid, group in enumerate(self):
            for idx in group:
                labels[idx] = gid
        return tuple(labels)

    def group_of(self, idx):
        for gid, group in enumerate(self):
            if idx in group:
                return gid
        raise LookupError("Mode %s is not in the partition" % idx)

    def __str__(self):
        return " ".join("{%s}" % ",".join(str(i + 1) for i in g) for g in self)
