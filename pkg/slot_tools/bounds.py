"""
Analytic bounds on a group's optimal worst-case cost and closed-form tests
for an optimal duration on the boundary of [0, T].
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

from .domain import conditional_probs
from .ambiguity import TVBall, worst_case_probs
from .piecewise import build

log = logging.getLogger(__name__)

NONE = "none"
ZERO = "zero"
HORIZON = "horizon"


class GroupBounds(namedtuple('GroupBounds', [
        'lower', 'upper', 'm_min', 'm_max', 'sigma_max', 'p_bar_min',
        'p_bar_max'])):
    """ Lower and upper bounds on a group's optimal cost and the statistics
        they are computed from.
    """
    __slots__ = ()


class BoundaryResult(namedtuple('BoundaryResult', ['kind', 'duration',
                                                   'diagnostic'])):
    """ The outcome of boundary_conditions

        kind: NONE, ZERO (t* = 0) or HORIZON (t* = T)
        duration: the forced duration, None for NONE
        diagnostic: why the test could not be applied, or None
    """
    __slots__ = ()

    @property
    def forced(self):
        return self.kind != NONE


def _max_mass(ball, members):
    """ The largest total probability the ball can place on members """
    indicator = np.zeros(ball.center.size)
    indicator[list(members)] = 1.0
    return float(np.dot(worst_case_probs(ball, indicator), indicator))


def group_bounds(group, mode_set, costs):
    """ Computes the GroupBounds of a group """
    group = tuple(group)
    means = np.array([mode_set[l].mean for l in group])
    sigmas = np.array([mode_set[l].std_dev for l in group])
    ball = TVBall(conditional_probs(group, mode_set), costs.tv_radius)
    m_min, m_max = float(means.min()), float(means.max())
    p_min = _max_mass(ball, np.flatnonzero(means == m_min))
    p_max = _max_mass(ball, np.flatnonzero(means == m_max))
    q, b = costs.q, costs.b

    denom = b * p_min + q * p_max
    if denom == 0 or m_max == m_min:
        lower = 0.0
    else:
        lower = b * p_min * q * p_max / denom * (m_max - m_min)
    upper = max(b, q) * (float(sigmas.max()) + (m_max - m_min) / 2)
    return GroupBounds(lower, upper, m_min, m_max, float(sigmas.max()),
                       p_min, p_max)


def lower_bound(group, mode_set, costs):
    """ b p_min q p_max / (b p_min + q p_max) (m_max - m_min) """
    return group_bounds(group, mode_set, costs).lower


def upper_bound(group, mode_set, costs):
    """ max(b, q) (sigma_max + (m_max - m_min)/2) """
    return group_bounds(group, mode_set, costs).upper


def _horizon_terms(pw, t):
    """ The piece-5 slope term X(t), the derivative there is
        b - (b+q)/2 X(t)
    """
    m = pw.stats.mean
    delta = t - m
    S = pw.beta * (pw.beta + pw.w1 / delta ** 2 - 2 * pw.w2 / (m * delta))
    H = pw.beta * (pw.w1 / delta ** 2 - pw.w2 / (m * delta))
    root = math.sqrt(max(S, 0.0))
    if root == 0:
        return None
    return pw.beta - root + H / root


def boundary_conditions(group, mode_set, costs, robust=None):
    """ Tests whether the optimal duration of a group is forced to 0 or T

        The weights are the conditional nominal probabilities. With robust
        (the default when tv_radius > 0) every member must satisfy the
        condition on its own, which forces the worst-case mixture too.

        Returns a BoundaryResult.
    """
    group = tuple(group)
    q, b, T = costs.q, costs.b, costs.horizon
    if robust is None:
        robust = costs.tv_radius > 0
    if q == 0:
        return BoundaryResult(ZERO, 0.0, None)
    if b == 0:
        return BoundaryResult(HORIZON, T, None)

    probs = conditional_probs(group, mode_set)
    curves = [build(mode_set[l], costs) for l in group]

    ratios = np.array([(1 - pw.stats.semivariance) *
                       (pw.stats.std_dev / pw.stats.mean) ** 2
                       for pw in curves])
    threshold = 2 * q / (b + q)
    if robust:
        zero = bool(np.all(ratios >= threshold))
    else:
        zero = float(np.dot(probs, ratios)) >= threshold
    if zero:
        return BoundaryResult(ZERO, 0.0, None)

    late = [mode_set[l].name for l, pw in zip(group, curves)
            if not T > pw.raw_breakpoints[3]]
    if late:
        diagnostic = ("horizon %g does not reach the last piece of %s" %
                      (T, ", ".join(late)))
        log.debug("Horizon test undefined: %s", diagnostic)
        return BoundaryResult(NONE, None, diagnostic)
    terms = [_horizon_terms(pw, T) for pw in curves]
    if any(x is None for x in terms):
        return BoundaryResult(NONE, None, "degenerate moments at the horizon")
    terms = np.array(terms)
    threshold = 2 * b / (b + q)
    if robust:
        horizon = bool(np.all(terms >= threshold))
    else:
        horizon = float(np.dot(probs, terms)) >= threshold
    if horizon:
        return BoundaryResult(HORIZON, T, None)
    return BoundaryResult(NONE, None, None)
