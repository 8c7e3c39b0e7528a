"""
Out-of-sample evaluation of a template, slot allocation within a daily
capacity and override counting against realised demand.
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

from .domain import MissingSamples, CapacityTooSmall

log = logging.getLogger(__name__)


class GroupEval(namedtuple('GroupEval', ['group', 'duration', 'cost',
                                         'idle_minutes', 'overtime_minutes'])):
    """ The empirical means of one group, weighted by the conditional
        nominal probabilities of its members
    """
    __slots__ = ()


class EvalReport(object):
    """ The empirical cost of a template on a set of samples """
    #: c|P| + (1/|P|) sum of group costs
    total_cost = None
    #: c|P|
    activation = None
    #: The average over groups of the mean idle minutes
    idle_minutes_mean = None
    #: The average over groups of the mean overtime minutes
    overtime_minutes_mean = None
    #: A GroupEval per group
    groups = None

    def __init__(self, groups, activation_cost):
        self.groups = list(groups)
        n = len(self.groups)
        self.activation = activation_cost * n
        self.total_cost = self.activation + sum(g.cost for g in groups) / n
        self.idle_minutes_mean = sum(g.idle_minutes for g in groups) / n
        self.overtime_minutes_mean = sum(g.overtime_minutes
                                         for g in groups) / n

    def to_json(self):
        return {"total_cost": self.total_cost,
                "activation": self.activation,
                "idle_minutes_mean": self.idle_minutes_mean,
                "overtime_minutes_mean": self.overtime_minutes_mean,
                "per_group": [g._asdict() for g in self.groups]}

    def to_text(self, names=None):
        """ An aligned text table """
        lines = ["%-24s %9s %11s %9s %9s" % ("group", "duration", "cost",
                                              "idle", "overtime")]
        for g in self.groups:
            if names is None:
                label = ",".join(str(i + 1) for i in g.group)
            else:
                label = ",".join(names[i] for i in g.group)
            lines.append("%-24s %9.2f %11.2f %9.2f %9.2f" % (
                label[:24], g.duration, g.cost, g.idle_minutes,
                g.overtime_minutes))
        lines.append("%-24s %9s %11.2f %9.2f %9.2f" % (
            "total", "", self.total_cost, self.idle_minutes_mean,
            self.overtime_minutes_mean))
        return "\n".join(lines)


def sample_costs(samples, duration, overtime_rate, idle_rate):
    """ Returns the mean (cost, idle minutes, overtime minutes) of a slot of
        duration against samples
    """
    samples = np.asarray(samples, dtype=float)
    over = np.maximum(samples - duration, 0)
    idle = np.maximum(duration - samples, 0)
    return (float(np.mean(overtime_rate * over + idle_rate * idle)),
            float(np.mean(idle)), float(np.mean(over)))


def empirical_cost_of(solution, samples, probs, costs):
    """ The empirical cost of solution against raw samples

        samples: a list per mode of duration samples
        probs: the nominal mode probabilities used to weight members
        costs: the CostParams
    """
    probs = np.asarray(probs, dtype=float)
    groups = []
    for group, gsol in zip(solution.partition, solution.group_solutions):
        weights = probs[list(group)]
        weights = weights / weights.sum()
        parts = []
        for mode in group:
            if mode >= len(samples) or len(samples[mode]) == 0:
                raise MissingSamples("Mode %d has no samples" % mode)
            parts.append(sample_costs(samples[mode], gsol.duration,
                                      costs.q, costs.b))
        parts = np.array(parts)
        cost, idle, over = np.dot(weights, parts)
        groups.append(GroupEval(tuple(group), gsol.duration, float(cost),
                                float(idle), float(over)))
    return EvalReport(groups, costs.activation_cost)


def empirical_cost(solution, sample_set, costs, which="test"):
    """ The empirical cost of solution on a SampleSet's test (or train)
        samples, members weighted by conditional nominal probabilities
    """
    return empirical_cost_of(solution, sample_set.samples(which),
                             sample_set.nominal_probs, costs)


class TemplateAllocation(object):
    """ A daily template: the slot count of each group within a capacity """
    capacity_minutes = None
    #: The slot duration of each group
    durations = None
    #: The number of slots of each group
    slots = None

    def __init__(self, capacity_minutes, durations, slots):
        self.capacity_minutes = capacity_minutes
        self.durations = list(durations)
        self.slots = [int(s) for s in slots]

    @property
    def used_minutes(self):
        return sum(d * s for d, s in zip(self.durations, self.slots))

    def to_json(self):
        return {"capacity_minutes": self.capacity_minutes,
                "used_minutes": self.used_minutes,
                "per_group": [{"duration": d, "slots": s}
                              for d, s in zip(self.durations, self.slots)]}


def group_shares(solution, probs):
    """ The nominal probability mass of each group """
    probs = np.asarray(probs, dtype=float)
    return [float(probs[list(g)].sum()) for g in solution.partition]


def allocate_slots(capacity, solution, shares):
    """ Allocates slots of each duration within capacity minutes

        Each group receives floor(share * capacity / duration) slots, the
        leftover minutes then go one slot at a time to the group gaining the
        most whole slots per minute, the shorter duration on ties.
    """
    durations = [float(d) for d in getattr(solution, "durations", solution)]
    shares = [float(s) for s in shares]
    if len(durations) != len(shares):
        raise ValueError("A share is needed for every group")
    if abs(sum(shares) - 1.0) > 1e-9:
        raise ValueError("Group shares sum to %r, not 1" % sum(shares))
    if any(not d > 0 for d in durations):
        raise ValueError("Durations must be positive")
    slots = [int(math.floor(s * capacity / d))
             for s, d in zip(shares, durations)]
    leftover = capacity - sum(d * n for d, n in zip(durations, slots))
    while True:
        fits = [i for i, d in enumerate(durations) if d <= leftover]
        if not fits:
            break
        best = min(fits, key=lambda i: (durations[i], i))
        slots[best] += 1
        leftover -= durations[best]
    empty = [i for i, n in enumerate(slots) if n == 0]
    if empty:
        raise CapacityTooSmall("Capacity %g leaves groups %s without a slot"
                               % (capacity, empty))
    return TemplateAllocation(capacity, durations, slots)


class OverrideReport(namedtuple('OverrideReport', ['total', 'per_group',
                                                   'days'])):
    """ Override counts, total and per group, over days """
    __slots__ = ()


def count_overrides(allocation, demand, per_day_indicator=False):
    """ Counts demand exceeding the allocated slots

        demand: a days by groups table of patient counts
        per_day_indicator: count a day once per group with any shortfall
                           rather than the shortfall units
    """
    demand = np.asarray(demand, dtype=float)
    if demand.ndim != 2:
        raise ValueError("Demand must be a days by groups table")
    slots = np.asarray(allocation.slots, dtype=float)
    if demand.shape[1] != slots.size:
        raise ValueError("Demand has %d groups, the template %d" %
                         (demand.shape[1], slots.size))
    shortfall = np.maximum(demand - slots, 0)
    if per_day_indicator:
        shortfall = (shortfall > 0).astype(float)
    per_group = [int(v) for v in shortfall.sum(axis=0)]
    return OverrideReport(int(sum(per_group)), per_group, demand.shape[0])
