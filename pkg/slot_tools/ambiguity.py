"""
Worst-case mode probabilities within a total-variation ball, and the
worst-case cost of a group of modes.

The ball around a nominal vector c holds every probability vector p with
sum |p - c| <= rho. Moving a unit of mass from one mode to another costs
two units of radius, so at most rho/2 can be moved. Maximising p.v over
the ball is solved exactly by a greedy transfer from the lowest valued
modes to the highest valued.
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

from collections import namedtuple

import numpy as np

from .domain import conditional_probs
from .piecewise import build_curve


class TVBall(namedtuple('TVBall', ['center', 'radius'])):
    """ The probability vectors within total variation radius of center """
    __slots__ = ()

    def __new__(cls, center, radius):
        center = np.asarray(center, dtype=float)
        if center.ndim != 1 or center.size == 0:
            raise ValueError("The center must be a nonempty vector")
        if np.any(center < 0) or abs(center.sum() - 1.0) > 1e-9:
            raise ValueError("The center must be a probability vector")
        if not 0 <= radius <= 2:
            raise ValueError("The radius must lie in [0, 2]")
        return super(TVBall, cls).__new__(cls, center, float(radius))

    def contains(self, probs, tolerance=1e-9):
        probs = np.asarray(probs, dtype=float)
        return bool(np.all(probs >= -tolerance) and
                    abs(probs.sum() - 1) <= tolerance and
                    np.abs(probs - self.center).sum() <= self.radius +
                    tolerance)


def worst_case_probs(ball, values):
    """ The probability vector in ball maximising sum(p * values)

        Mass is drained from members in ascending value order and filled
        into members in descending value order, ties broken by index, until
        radius/2 has moved or no transfer raises the objective.
    """
    values = np.asarray(values, dtype=float)
    probs = ball.center.copy()
    budget = ball.radius / 2
    if budget <= 0 or probs.size < 2:
        return probs
    # A stable sort keeps ties in index order
    drain = [int(i) for i in np.argsort(values, kind='stable')]
    fill = [int(i) for i in np.argsort(-values, kind='stable')]
    d = f = 0
    while budget > 0 and d < len(drain) and f < len(fill):
        low, high = drain[d], fill[f]
        if not values[high] > values[low]:
            break
        if probs[low] <= 0:
            d += 1
            continue
        room = 1.0 - probs[high]
        if room <= 0:
            f += 1
            continue
        amount = min(budget, probs[low], room)
        probs[low] -= amount
        probs[high] += amount
        budget -= amount
    return probs


def group_curves(group, mode_set, costs, moment_set="semivariance"):
    """ The worst-case curve of each member of group """
    return [build_curve(mode_set[l], costs, moment_set) for l in group]


class GroupObjective(object):
    """ The worst-case cost Omega(t) of a group, caching member curves

        group: the mode indices
        mode_set: the ModeSet
        costs: the CostParams, tv_radius sets the ball
    """
    #: The member mode indices
    group = None
    #: The conditional nominal probabilities of the members
    center = None
    #: A WorstCaseCurve per member
    curves = None
    costs = None
    #: The TVBall over the members
    ball = None

    def __init__(self, group, mode_set, costs, moment_set="semivariance"):
        self.group = tuple(group)
        self.costs = costs
        self.center = conditional_probs(self.group, mode_set)
        self.curves = group_curves(self.group, mode_set, costs, moment_set)
        self.ball = TVBall(self.center, costs.tv_radius)

    def member_values(self, t):
        return np.array([c.value(t) for c in self.curves])

    def probs(self, t):
        """ The worst-case member probabilities at t """
        if len(self.group) == 1:
            return np.ones(1)
        return worst_case_probs(self.ball, self.member_values(t))

    def value(self, t):
        values = self.member_values(t)
        if len(self.group) == 1:
            return float(values[0])
        return float(np.dot(worst_case_probs(self.ball, values), values))

    def nominal_value(self, t):
        """ The nominal mixture sum(p_l Pi_l(t)) """
        return float(np.dot(self.center, self.member_values(t)))

    def nominal_derivative(self, t):
        return float(sum(p * c.derivative(t)
                         for p, c in zip(self.center, self.curves)))

    def __call__(self, t):
        return self.value(t)


def omega(group, mode_set, costs, t, moment_set="semivariance"):
    """ The worst-case group cost max_p sum(p_l Pi_l(t)) over the TV ball """
    return GroupObjective(group, mode_set, costs, moment_set).value(t)
