"""
Optimal slot durations for groups of modes and the exact template design
by enumerating every set partition of the modes.

A group's worst-case cost is convex in the duration and smooth between the
breakpoints of its members. The horizon [0, T] is split at every member
breakpoint and each resulting interval is searched on its own:

 - with rho = 0, by bisection on the derivative of the nominal mixture
 - with rho > 0, by golden-section search on the worst-case mixture

The best interval winner or interval endpoint is returned, the smallest
duration winning ties.

The objective of a partition P is c|P| + (1/|P|) sum_g Omega_g(t_g).
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

import itertools
import logging
import math
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

from .domain import Partition, TooManyModes
from .ambiguity import GroupObjective, group_curves
from .bounds import boundary_conditions

log = logging.getLogger(__name__)

#: The largest number of modes solve_exact will enumerate
MAX_MODES = 15

#: Relative tolerance under which two costs are a tie
TIE_TOLERANCE = 1e-9

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


class GroupSolution(namedtuple('GroupSolution', [
        'group', 'duration', 'worst_cost', 'interval_id', 'method'])):
    """ The optimal duration of one group

        group: the member mode indices
        duration: the optimal duration t*
        worst_cost: the worst-case cost at t*
        interval_id: the merged interval holding t*
        method: 'boundary', 'bisection', 'golden-section' or 'saa'
    """
    __slots__ = ()


def is_better(cost, best):
    return cost < best - TIE_TOLERANCE * max(1.0, abs(best))


class Solution(object):
    """ A template: a partition with a duration per group """
    #: The Partition
    partition = None
    #: A GroupSolution per group, in partition order
    group_solutions = None
    #: c|P| + (1/|P|) sum of group worst costs
    objective = None
    #: The CostParams solved with
    costs = None

    def __init__(self, partition, group_solutions, costs):
        self.partition = partition
        self.group_solutions = list(group_solutions)
        self.costs = costs
        self.objective = compute_objective(
            [g.worst_cost for g in self.group_solutions], costs)

    @property
    def durations(self):
        return [g.duration for g in self.group_solutions]

    def duration_of(self, mode):
        """ The duration assigned to a mode index """
        return self.group_solutions[self.partition.group_of(mode)].duration

    def to_json(self, mode_set=None):
        groups = [list(g) for g in self.partition]
        doc = {"groups": groups,
               "durations": self.durations,
               "objective": self.objective,
               "per_group": [{"duration": g.duration,
                              "worst_cost": g.worst_cost,
                              "interval_id": g.interval_id,
                              "method": g.method}
                             for g in self.group_solutions]}
        if mode_set is not None:
            doc["partition"] = [[mode_set[l].name for l in g] for g in groups]
        return doc

    def __str__(self):
        return "%s durations (%s) objective %.2f" % (
            self.partition, ", ".join("%.1f" % d for d in self.durations),
            self.objective)


def compute_objective(worst_costs, costs):
    """ c|P| + (1/|P|) sum worst_costs """
    worst_costs = list(worst_costs)
    n = len(worst_costs)
    return costs.activation_cost * n + sum(worst_costs) / n


def solution_from_json(doc, costs):
    """ Rebuilds a Solution from Solution.to_json output. Worst costs are
        taken as recorded.
    """
    partition = Partition(doc["groups"])
    per_group = doc.get("per_group") or [{} for _ in partition]
    solutions = []
    for idx, (group, duration) in enumerate(zip(partition, doc["durations"])):
        info = per_group[idx]
        solutions.append(GroupSolution(group, float(duration),
                                       float(info.get("worst_cost", 0.0)),
                                       info.get("interval_id", 0),
                                       info.get("method", "loaded")))
    return Solution(partition, solutions, costs)


def merged_intervals(group, mode_set, costs, moment_set="semivariance"):
    """ Splits [0, T] at every member's clamped breakpoints

        Returns a sorted list of (start, end) intervals with positive length.
    """
    points = set([0.0, costs.horizon])
    for curve in group_curves(group, mode_set, costs, moment_set):
        points.update(curve.breakpoints)
    points = sorted(points)
    return [(a, b) for a, b in zip(points, points[1:]) if b > a]


def _interval_of(intervals, t):
    for idx, (a, b) in enumerate(intervals):
        if a <= t <= b:
            return idx
    return len(intervals) - 1


def _nominal_slopes(objective, t):
    left = right = 0.0
    for p, curve in zip(objective.center, objective.curves):
        l, r = curve.slopes(t)
        left += p * l
        right += p * r
    return left, right


def _bisect(objective, a, b, tolerance, max_iters=200):
    """ The root of the nominal derivative in (a, b), which is known to be
        negative just right of a and positive just left of b
    """
    lo, hi = a, b
    for _ in range(max_iters):
        if hi - lo <= tolerance:
            break
        mid = (lo + hi) / 2
        if objective.nominal_derivative(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def golden_section(func, a, b, tolerance):
    """ Golden-section search for the minimum of a unimodal func on [a, b]

        Returns the final bracket (c, d) with d - c <= tolerance.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tolerance:
        return a, b

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tolerance / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = func(c)
    yd = func(d)

    for _ in range(n - 1):
        if yc <= yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = func(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = func(d)

    if yc <= yd:
        return a, d
    return c, b


def _pick(candidates, cost_of):
    """ The lowest cost candidate, the smallest t winning ties """
    best_t = best_cost = None
    for t in sorted(set(candidates)):
        cost = cost_of(t)
        if best_cost is None or is_better(cost, best_cost):
            best_t, best_cost = t, cost
    return best_t, best_cost


def _forced(group, mode_set, costs, moment_set, robust):
    if moment_set != "semivariance":
        return None
    result = boundary_conditions(group, mode_set, costs, robust=robust)
    if result.forced:
        log.debug("Group %s forced to %s", group, result.kind)
        return result.duration
    return None


def optimize_group_rho0(group, mode_set, costs, moment_set="semivariance"):
    """ The optimal duration of a group under its nominal probabilities

        Each merged interval is searched by bisection on the derivative of
        sum(p_l Pi_l(t)); the best root or interval endpoint wins.
    """
    group = tuple(group)
    costs = costs._replace(tv_radius=0.0)
    objective = GroupObjective(group, mode_set, costs, moment_set)
    intervals = merged_intervals(group, mode_set, costs, moment_set)

    forced = _forced(group, mode_set, costs, moment_set, robust=False)
    if forced is not None:
        return GroupSolution(group, forced, objective.value(forced),
                             _interval_of(intervals, forced), "boundary")

    tolerance = 1e-12 * max(1.0, costs.horizon)
    candidates = [costs.horizon]
    for a, b in intervals:
        candidates.append(a)
        right_at_a = _nominal_slopes(objective, a)[1]
        left_at_b = _nominal_slopes(objective, b)[0]
        if right_at_a >= 0:
            continue
        if left_at_b <= 0:
            candidates.append(b)
            continue
        candidates.append(_bisect(objective, a, b, tolerance))
    best_t, best_cost = _pick(candidates, objective.value)
    return GroupSolution(group, best_t, best_cost,
                         _interval_of(intervals, best_t), "bisection")


def optimize_group(group, mode_set, costs, moment_set="semivariance"):
    """ The optimal duration of a group under the worst-case probabilities
        of the TV ball, by golden-section search on every merged interval.
    """
    group = tuple(group)
    if costs.tv_radius == 0 or len(group) == 1:
        return optimize_group_rho0(group, mode_set, costs, moment_set)
    objective = GroupObjective(group, mode_set, costs, moment_set)
    intervals = merged_intervals(group, mode_set, costs, moment_set)

    forced = _forced(group, mode_set, costs, moment_set, robust=True)
    if forced is not None:
        return GroupSolution(group, forced, objective.value(forced),
                             _interval_of(intervals, forced), "boundary")

    tolerance = 1e-6 * costs.horizon
    candidates = [costs.horizon]
    for a, b in intervals:
        candidates.append(a)
        lo, hi = golden_section(objective.value, a, b, tolerance)
        candidates.append((lo + hi) / 2)
    best_t, best_cost = _pick(candidates, objective.value)
    return GroupSolution(group, best_t, best_cost,
                         _interval_of(intervals, best_t), "golden-section")


def solve_group(group, mode_set, costs, moment_set="semivariance"):
    """ Dispatches on the TV radius """
    if costs.tv_radius > 0:
        return optimize_group(group, mode_set, costs, moment_set)
    return optimize_group_rho0(group, mode_set, costs, moment_set)


def enumerate_partitions(n_modes):
    """ Yields every Partition of range(n_modes) once, in lexicographic
        restricted growth string order.
    """
    if n_modes < 1:
        raise ValueError("At least one mode is required")
    if n_modes > MAX_MODES:
        raise TooManyModes("%d modes exceeds the enumeration limit of %d" %
                           (n_modes, MAX_MODES))
    labels = [0] * n_modes
    while True:
        yield Partition.from_labels(labels)
        # Find the rightmost label that can still grow
        idx = n_modes - 1
        while idx > 0 and labels[idx] > max(labels[:idx]):
            idx -= 1
        if idx == 0:
            return
        labels[idx] += 1
        for j in range(idx + 1, n_modes):
            labels[j] = 0


def nonempty_subsets(n_modes):
    for size in range(1, n_modes + 1):
        for group in itertools.combinations(range(n_modes), size):
            yield group


def _solve_group_task(args):
    return solve_group(*args)


def evaluate_partition(partition, mode_set, costs, moment_set="semivariance",
                       cache=None):
    """ Solves every group of a given partition """
    solutions = []
    for group in partition:
        if cache is not None and group in cache:
            solutions.append(cache[group])
            continue
        solution = solve_group(group, mode_set, costs, moment_set)
        if cache is not None:
            cache[group] = solution
        solutions.append(solution)
    return Solution(partition, solutions, costs)


def solve_all_groups(mode_set, costs, moment_set="semivariance", threads=1):
    """ Solves every nonempty group of modes, returning a dict keyed by the
        sorted member tuple.
    """
    groups = list(nonempty_subsets(len(mode_set)))
    tasks = [(g, mode_set, costs, moment_set) for g in groups]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_solve_group_task, tasks,
                                    chunksize=max(1, len(tasks) //
                                                  (4 * threads))))
    else:
        results = [_solve_group_task(t) for t in tasks]
    return dict(zip(groups, results))


def solve_exact(mode_set, costs, moment_set="semivariance", threads=1,
                logger=None):
    """ The partition and durations minimising the template objective

        Ties are broken by the lexicographically smallest restricted growth
        string, so the result does not depend on threads.
    """
    log_ = logger or log
    if len(mode_set) > MAX_MODES:
        raise TooManyModes("%d modes exceeds the enumeration limit of %d" %
                           (len(mode_set), MAX_MODES))
    cache = solve_all_groups(mode_set, costs, moment_set, threads)
    log_.info("Solved %d groups of %d modes", len(cache), len(mode_set))

    best = None
    count = 0
    for partition in enumerate_partitions(len(mode_set)):
        count += 1
        worst = [cache[g].worst_cost for g in partition]
        objective = compute_objective(worst, costs)
        if best is None or is_better(objective, best[0]):
            best = (objective, partition)
    log_.info("Evaluated %d partitions, best %s objective %.4f", count,
              best[1], best[0])
    partition = best[1]
    return Solution(partition, [cache[g] for g in partition], costs)
