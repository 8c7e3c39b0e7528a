"""
The worst-case expected idle and overtime cost of a single mode.

For a slot of t minutes and a mode with mean m, standard deviation sigma
and normalised semivariance s, the largest expected cost
E[q(X-t)+ + b(t-X)+] over all non-negative distributions with those three
moments is a convex function of t made of five pieces:

    piece 1  [0, tau1]      linear
    piece 2  [tau1, tau2]   hyperbolic in (m - t)
    piece 3  [tau2, tau3]   linear
    piece 4  [tau3, tau4]   hyperbolic in (t - m)
    piece 5  [tau4, inf)    square-root

with w1 = (1+s)sigma^2/2, w2 = (1-s)sigma^2/2 the upper and lower
semi-second moments and beta = 1 - w2/m^2. Breakpoints are clamped to the
horizon [0, T]; clamping changes which pieces t can reach, never the
formulas.

Each t also has an extremal (witness) distribution attaining the worst
case, a two or three point distribution found by witness_distribution.

MeanVarianceWorstCase is the same bound without the semivariance
constraint, used as a benchmark.
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

import numpy as np

from .domain import (ModeStats, OutOfRange, UndefinedWitness, InfeasibleStats,
                     require_feasible, Violation,
                     FeasibilityReport)

log = logging.getLogger(__name__)

#: The names of the moment sets a curve can be built for
MOMENT_SETS = ("semivariance", "mean-variance")


class DiscreteDistribution(tuple):
    """ A finite distribution, a sorted tuple of (support, prob) atoms.
        Atoms with zero probability are dropped.
    """

    def __new__(cls, atoms, tolerance=1e-9):
        clean = []
        for support, prob in atoms:
            support, prob = float(support), float(prob)
            if prob < -tolerance:
                raise ValueError("Negative probability %r at %r" %
                                 (prob, support))
            if prob > 0:
                clean.append((support, prob))
        clean.sort()
        total = sum(p for _, p in clean)
        if abs(total - 1.0) > tolerance:
            raise ValueError("Probabilities sum to %r" % total)
        return tuple.__new__(cls, clean)

    @property
    def support(self):
        return np.array([x for x, _ in self])

    @property
    def probs(self):
        return np.array([p for _, p in self])

    def mean(self):
        return float(np.dot(self.probs, self.support))

    def variance(self):
        dev = self.support - self.mean()
        return float(np.dot(self.probs, dev ** 2))

    def semivariance(self):
        """ The normalised semivariance about the mean """
        dev = self.support - self.mean()
        upper = np.dot(self.probs, np.maximum(dev, 0) ** 2)
        lower = np.dot(self.probs, np.maximum(-dev, 0) ** 2)
        return float((upper - lower) / self.variance())

    def expected_cost(self, t, overtime_rate, idle_rate):
        """ E[q(X-t)+ + b(t-X)+] """
        over = np.maximum(self.support - t, 0)
        idle = np.maximum(t - self.support, 0)
        return float(np.dot(self.probs, overtime_rate * over +
                            idle_rate * idle))

    def to_stats(self, name=None):
        return ModeStats(self.mean(), math.sqrt(self.variance()),
                         self.semivariance(), 1.0, name)


class WorstCaseCurve(object):
    """ The common interface of a mode's worst-case cost as a function of
        the slot duration t in [0, T].
    """
    #: The ModeStats
    stats = None
    #: The CostParams
    costs = None
    #: The unclamped breakpoints, the ends of each piece but the last
    raw_breakpoints = ()
    #: The breakpoints clamped to [0, T]
    breakpoints = ()

    def __init__(self, stats, costs):
        self.stats = stats
        self.costs = costs

    def _clamp(self, points):
        return tuple(min(max(p, 0.0), self.costs.horizon) for p in points)

    def check_t(self, t):
        if not 0 <= t <= self.costs.horizon:
            raise OutOfRange("t=%r is outside [0, %r]" %
                             (t, self.costs.horizon))

    def piece(self, t):
        """ The 1-based piece containing t, a breakpoint belongs to the
            piece it ends
        """
        for idx, tau in enumerate(self.raw_breakpoints, 1):
            if t <= tau:
                return idx
        return len(self.raw_breakpoints) + 1

    def _right_piece(self, t):
        for idx, tau in enumerate(self.raw_breakpoints, 1):
            if t < tau:
                return idx
        return len(self.raw_breakpoints) + 1

    def value(self, t):
        self.check_t(t)
        return self._value(self.piece(t), t)

    def slopes(self, t):
        """ Returns the (left, right) derivatives at t """
        self.check_t(t)
        left = self._slope(self.piece(t), t)
        right_piece = self._right_piece(t)
        if right_piece == self.piece(t):
            return left, left
        return left, self._slope(right_piece, t)

    def derivative(self, t):
        """ The derivative in the interior of a piece """
        return self._slope(self.piece(t), t)

    def _value(self, piece, t):
        raise NotImplementedError

    def _slope(self, piece, t):
        raise NotImplementedError

    def witness(self, t):
        raise NotImplementedError


class PiecewiseWorstCase(WorstCaseCurve):
    """ The five piece worst-case cost of a mode under the mean, variance
        and semivariance moment set.
    """
    #: Upper semi-second moment (1+s)sigma^2/2
    w1 = None
    #: Lower semi-second moment (1-s)sigma^2/2
    w2 = None
    #: 1 - w2/m^2
    beta = None

    def __init__(self, stats, costs):
        require_feasible(stats)
        WorstCaseCurve.__init__(self, stats, costs)
        m, sigma, s = stats.mean, stats.std_dev, stats.semivariance
        self.w1 = (1 + s) * sigma ** 2 / 2
        self.w2 = (1 - s) * sigma ** 2 / 2
        self.beta = 1 - self.w2 / m ** 2
        self.raw_breakpoints = (
            m / 2,
            m - sigma / 2 * math.sqrt((1 - s) / (1 + s)),
            m + sigma / 2 * math.sqrt((1 + s) / (1 - s)),
            m + m * (1 + s) / (2 * (1 - s)))
        self.breakpoints = self._clamp(self.raw_breakpoints)

    def _piece5_terms(self, t):
        """ Returns (delta, R) with R = beta(beta + w1/delta^2 - 2w2/(m delta))
        """
        m = self.stats.mean
        delta = t - m
        inner = self.beta + self.w1 / delta ** 2 - 2 * self.w2 / (m * delta)
        return delta, max(self.beta * inner, 0.0)

    def _value(self, piece, t):
        m = self.stats.mean
        q, b = self.costs.q, self.costs.b
        # Pieces 2 and 4 are singular at t = m, which lies inside piece 3
        if piece == 2 and t >= m or piece == 4 and t <= m:
            piece = 3
        if piece == 1:
            return ((b + q) * self.w2 / m ** 2 - q) * t + q * m
        if piece == 2:
            return (b + q) * self.w2 / (4 * (m - t)) + q * (m - t)
        if piece == 3:
            s = self.stats.semivariance
            return ((b + q) * self.stats.std_dev / 2 *
                    math.sqrt(1 - s ** 2) +
                    (m - t) * ((q - b) - (q + b) * s) / 2)
        if piece == 4:
            return (b + q) * self.w1 / (4 * (t - m)) + b * (t - m)
        delta, R = self._piece5_terms(t)
        return (b * t + q * m -
                (b + q) / 2 * (m + self.beta * t - delta * math.sqrt(R)))

    def _slope(self, piece, t):
        m = self.stats.mean
        q, b = self.costs.q, self.costs.b
        if piece == 2 and t >= m or piece == 4 and t <= m:
            piece = 3
        if piece == 1:
            return (b + q) * self.w2 / m ** 2 - q
        if piece == 2:
            return (b + q) * self.w2 / (4 * (m - t) ** 2) - q
        if piece == 3:
            s = self.stats.semivariance
            return -((q - b) - (q + b) * s) / 2
        if piece == 4:
            return -(b + q) * self.w1 / (4 * (t - m) ** 2) + b
        delta, R = self._piece5_terms(t)
        root = math.sqrt(R)
        if root == 0:
            # Only on the boundary of the feasible moments
            h = 1e-6 * max(1.0, t)
            return (self._value(5, t + h) - self._value(5, t - h)) / (2 * h)
        x = (self.beta - root + self.beta *
             (self.w1 / delta ** 2 - self.w2 / (m * delta)) / root)
        return b - (b + q) / 2 * x

    def witness_case(self, t):
        """ The label of the extremal distribution family used at t """
        tau1, tau2, tau3, tau4 = self.raw_breakpoints
        if t <= tau1:
            return "1a"
        if t < tau2:
            return "1b"
        if t <= tau3:
            return "1c" if t < self.stats.mean else "2a"
        if t < tau4:
            return "2b"
        return "2c"

    def _three_point(self, anchor, anchor_prob, side, second_moment,
                     cap=None):
        """ An atom at anchor with anchor_prob, the remaining mass split
            over two atoms on one side of the mean (side +1 above, -1 below)
            matching the mean and that side's semi-second moment.

            cap: the largest deviation from the mean allowed on that side
        """
        m = self.stats.mean
        mass = 1 - anchor_prob
        if not 0 < anchor_prob < 1:
            raise UndefinedWitness("Anchor probability %r outside (0, 1)" %
                                   anchor_prob)
        mu = anchor_prob * abs(m - anchor) / mass
        raw = second_moment / mass
        var = raw - mu ** 2
        if var < -1e-12 * raw:
            raise UndefinedWitness("Negative conditional variance %r" % var)
        if var <= 1e-14 * raw:
            return DiscreteDistribution([(anchor, anchor_prob),
                                         (m + side * mu, mass)])
        pi_min = var / (var + mu ** 2)
        pi_max = 1.0
        if cap is not None:
            if not cap > mu:
                raise UndefinedWitness("No room for the support below the"
                                       " mean")
            pi_max = (cap - mu) ** 2 / ((cap - mu) ** 2 + var)
        if not pi_min < pi_max:
            raise UndefinedWitness("Empty admissible interval [%r, %r)" %
                                   (pi_min, pi_max))
        pi = (pi_min + pi_max) / 2
        near = mu - math.sqrt(var * (1 - pi) / pi)
        far = mu + math.sqrt(var * pi / (1 - pi))
        return DiscreteDistribution([(anchor, anchor_prob),
                                     (m + side * near, mass * pi),
                                     (m + side * far, mass * (1 - pi))])

    def witness(self, t):
        self.check_t(t)
        m = self.stats.mean
        w1, w2 = self.w1, self.w2
        case = self.witness_case(t)
        if case == "1a":
            return self._three_point(0.0, w2 / m ** 2, 1, w1)
        if case == "1b":
            return self._three_point(2 * t - m, w2 / (4 * (m - t) ** 2), 1,
                                     w1)
        if case in ("1c", "2a"):
            total = w1 + w2
            return DiscreteDistribution([
                (m + math.sqrt(w1 * total / w2), w2 / total),
                (m - math.sqrt(w2 * total / w1), w1 / total)])
        if case == "2b":
            return self._three_point(2 * t - m, w1 / (4 * (t - m) ** 2), -1,
                                     w2, cap=m)
        # 2c: atom at 0 and two atoms placed symmetrically about t
        p0 = w2 / m ** 2
        mass = 1 - p0
        mu = (w2 / m) / mass
        delta = t - m
        R = math.sqrt(max(w1 / mass - 2 * delta * mu + delta ** 2, 0.0))
        if R == 0 or delta - R < -1e-9 * max(1.0, delta):
            raise UndefinedWitness("t=%r leaves the upper atoms below the"
                                   " mean" % t)
        upper = mass * (1 + (mu - delta) / R) / 2
        return DiscreteDistribution([(0.0, p0), (t - R, mass - upper),
                                     (t + R, upper)])


class MeanVarianceWorstCase(WorstCaseCurve):
    """ The worst-case cost of a mode when only its mean and variance are
        known (non-negative support), with a single breakpoint
        t0 = (m^2 + sigma^2)/(2m).
    """

    def __init__(self, stats, costs):
        if not (stats.mean > 0 and stats.std_dev > 0):
            violations = [Violation("mean > 0 and std_dev > 0",
                                    min(stats.mean, stats.std_dev), 0.0,
                                    min(stats.mean, stats.std_dev))]
            raise InfeasibleStats(FeasibilityReport(stats, None, violations))
        WorstCaseCurve.__init__(self, stats, costs)
        m, var = stats.mean, stats.std_dev ** 2
        self.raw_breakpoints = ((m ** 2 + var) / (2 * m),)
        self.breakpoints = self._clamp(self.raw_breakpoints)

    def _value(self, piece, t):
        m, var = self.stats.mean, self.stats.std_dev ** 2
        q, b = self.costs.q, self.costs.b
        if piece == 1:
            return (q + b) * (m - t * m ** 2 / (m ** 2 + var)) + b * (t - m)
        delta = t - m
        return (q + b) * (math.sqrt(var + delta ** 2) - delta) / 2 + b * delta

    def _slope(self, piece, t):
        m, var = self.stats.mean, self.stats.std_dev ** 2
        q, b = self.costs.q, self.costs.b
        if piece == 1:
            return b - (q + b) * m ** 2 / (m ** 2 + var)
        delta = t - m
        return (q + b) * (delta / math.sqrt(var + delta ** 2) - 1) / 2 + b

    def witness(self, t):
        self.check_t(t)
        m, var = self.stats.mean, self.stats.std_dev ** 2
        if t <= self.raw_breakpoints[0]:
            return DiscreteDistribution([(0.0, var / (m ** 2 + var)),
                                         ((m ** 2 + var) / m,
                                          m ** 2 / (m ** 2 + var))])
        delta = t - m
        r = math.sqrt(var + delta ** 2)
        upper = (r - delta) / (2 * r)
        return DiscreteDistribution([(t - r, 1 - upper), (t + r, upper)])


def build(stats, costs):
    """ Builds the PiecewiseWorstCase of a mode, raising InfeasibleStats
        when the moments are not realizable.
    """
    return PiecewiseWorstCase(stats, costs)


def build_mean_variance(stats, costs):
    """ Builds the semivariance-free MeanVarianceWorstCase of a mode """
    return MeanVarianceWorstCase(stats, costs)


def build_curve(stats, costs, moment_set="semivariance"):
    """ Builds the worst-case curve of a mode for the named moment set """
    if moment_set == "semivariance":
        return PiecewiseWorstCase(stats, costs)
    if moment_set == "mean-variance":
        return MeanVarianceWorstCase(stats, costs)
    raise ValueError("Unknown moment set %s, expected one of %s" %
                     (moment_set, ", ".join(MOMENT_SETS)))


def eval_pi(pw, t):
    """ The worst-case cost at t """
    return pw.value(t)


def eval_pi_derivative(pw, t):
    """ The (left, right) derivatives at t """
    return pw.slopes(t)


def witness_distribution(pw, t):
    """ A distribution matching the mode's moments that attains eval_pi(t) """
    return pw.witness(t)
