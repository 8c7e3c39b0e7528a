"""
Brute-force checks of the closed forms by linear programming.

lp_solve is a dense two-phase simplex method using Bland's rule. On top of
it worst_case_discrete maximises the expected slot cost over distributions
on a grid whose moments lie within a small band of the target moments, and
tv_lp maximises a linear function over a total-variation ball.

These are correctness instruments: small dense problems only.
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

from .domain import (SlotError, InvalidParameter, OutOfRange,
                     require_feasible)
from .piecewise import DiscreteDistribution

log = logging.getLogger(__name__)

#: Pivot and reduced cost tolerance
EPS = 1e-10


class LPError(SlotError):
    """ The simplex method did not terminate """


class LPInfeasible(LPError):
    """ No point satisfies the constraints

        rows: the constraint rows (inequalities first, then equalities)
              whose artificial variables remained positive
    """
    def __init__(self, rows, msg=None):
        self.rows = list(rows)
        LPError.__init__(self, msg or "Infeasible LP, rows %s" % self.rows)


class LPUnbounded(LPError):
    """ The objective increases without bound """


class GridInfeasible(LPInfeasible):
    """ No distribution on the grid meets the moment band

        constraints: the names of the moment constraints left unmet
    """
    def __init__(self, rows, constraints):
        self.constraints = list(constraints)
        LPInfeasible.__init__(
            self, rows, "No distribution on the grid satisfies %s, widen "
            "the moment band or refine the grid" % ", ".join(self.constraints))


class LinearProgram(namedtuple('LinearProgram', ['c', 'A_ub', 'b_ub',
                                                 'A_eq', 'b_eq'])):
    """ maximise c.x subject to A_ub x <= b_ub, A_eq x = b_eq and x >= 0 """
    __slots__ = ()

    def __new__(cls, c, A_ub=None, b_ub=None, A_eq=None, b_eq=None):
        c = np.asarray(c, dtype=float).ravel()
        A_ub, b_ub = _rows(A_ub, b_ub, c.size, "inequality")
        A_eq, b_eq = _rows(A_eq, b_eq, c.size, "equality")
        return super(LinearProgram, cls).__new__(cls, c, A_ub, b_ub,
                                                 A_eq, b_eq)


def _rows(A, b, n, kind):
    if A is None:
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape[1] != n or A.shape[0] != b.size:
        raise ValueError("The %s rows are %s, expected (%d, %d)" %
                         (kind, A.shape, b.size, n))
    return A, b


class LPSolution(namedtuple('LPSolution', ['x', 'value', 'duals_ub',
                                           'duals_eq'])):
    """ An optimal basic solution with its dual prices

        duals_ub are non-negative and duals_eq free; together they satisfy
        c - A_ub' y_ub - A_eq' y_eq <= 0 with equality on basic columns.
    """
    __slots__ = ()


def _pivot(T, row, col):
    T[row, :] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0:
            T[r, :] -= T[r, col] * T[row, :]


def _simplex(T, basis, max_iters):
    """ Pivots the tableau T to optimality, the last row holding reduced
        costs. Bland's rule: the lowest index improving column enters and
        the lowest index basic variable leaves among tied ratios.
    """
    for _ in range(max_iters):
        improving = np.flatnonzero(T[-1, :-1] < -EPS)
        if improving.size == 0:
            return
        col = int(improving[0])
        column = T[:-1, col]
        rows = np.flatnonzero(column > EPS)
        if rows.size == 0:
            raise LPUnbounded("Column %d is unbounded" % col)
        ratios = T[rows, -1] / column[rows]
        least = ratios.min()
        tied = rows[ratios <= least + EPS * max(1.0, abs(least))]
        row = min(tied, key=lambda r: basis[r])
        _pivot(T, row, col)
        basis[row] = col
    raise LPError("Simplex did not converge in %d iterations" % max_iters)


def _objective_row(T, basis, costs):
    """ The reduced cost row c_B B^-1 A - c, last entry the objective """
    n_rows = len(basis)
    row = costs[basis].dot(T[:n_rows, :])
    row[:-1] -= costs
    return row


def lp_solve(lp, max_iters=None):
    """ Solves a LinearProgram by the two-phase simplex method

        Returns an LPSolution. Raises LPInfeasible or LPUnbounded.
    """
    c = lp.c
    n = c.size
    m_ub = lp.b_ub.size
    A = np.vstack([lp.A_ub, lp.A_eq])
    b = np.concatenate([lp.b_ub, lp.b_eq])
    m = b.size
    if m == 0:
        if np.any(c > EPS):
            raise LPUnbounded("No constraints and a positive objective")
        return LPSolution(np.zeros(n), 0.0, np.zeros(0), np.zeros(0))

    # Rows with a negative right hand side are negated
    sign = np.where(b < 0, -1.0, 1.0)
    art_rows = [i for i in range(m) if i >= m_ub or b[i] < 0]
    n_struct = n + m_ub
    total = n_struct + len(art_rows)

    T = np.zeros((m + 1, total + 1))
    T[:m, :n] = A * sign[:, None]
    T[np.arange(m_ub), n + np.arange(m_ub)] = sign[:m_ub]
    T[:m, -1] = b * sign
    basis = [n + i for i in range(m)]
    for k, i in enumerate(art_rows):
        T[i, n_struct + k] = 1.0
        basis[i] = n_struct + k
    if max_iters is None:
        max_iters = 50 * (m + total)

    # Phase one minimises the sum of artificials
    phase1 = np.zeros(total)
    phase1[n_struct:] = -1.0
    T[-1, :] = _objective_row(T, basis, phase1)
    _simplex(T, basis, max_iters)
    scale = max(1.0, np.abs(b).max())
    if T[-1, -1] < -1e-9 * scale:
        rows = [i for i, var in enumerate(basis)
                if var >= n_struct and T[i, -1] > 1e-9 * scale]
        raise LPInfeasible(rows)

    # Drive zero artificials out of the basis, dropping redundant rows
    kept = []
    for i, var in enumerate(basis):
        if var < n_struct:
            kept.append(i)
            continue
        candidates = np.flatnonzero(np.abs(T[i, :n_struct]) > 1e-9)
        if candidates.size:
            _pivot(T, i, int(candidates[0]))
            basis[i] = int(candidates[0])
            kept.append(i)
        else:
            log.debug("Dropping redundant constraint row %d", i)
    columns = list(range(n_struct)) + [total]
    T = T[np.ix_(kept + [m], columns)]
    basis = [basis[i] for i in kept]

    phase2 = np.concatenate([c, np.zeros(m_ub)])
    T[-1, :] = _objective_row(T, basis, phase2)
    _simplex(T, basis, max_iters)

    x = np.zeros(n_struct)
    x[basis] = T[:-1, -1]
    x = np.maximum(x[:n], 0.0)

    # Dual prices from B' y = c_B on the sign adjusted rows
    M = np.hstack([A * sign[:, None], np.zeros((m, m_ub))])
    M[np.arange(m_ub), n + np.arange(m_ub)] = sign[:m_ub]
    y = np.zeros(m)
    if kept:
        B = M[np.ix_(kept, basis)]
        y[kept] = np.linalg.solve(B.T, phase2[basis]) * sign[kept]
    return LPSolution(x, float(c.dot(x)), y[:m_ub], y[m_ub:])


class OracleConfig(namedtuple('OracleConfig', ['support_max', 'grid_step',
                                               'moment_band'])):
    """ The discretisation of worst_case_discrete

        support_max: the largest grid point, in minutes
        grid_step: the grid spacing h, in minutes
        moment_band: the relative band delta around each target moment,
                     0 for equality
    """
    __slots__ = ()

    def __new__(cls, support_max=2000.0, grid_step=1.0, moment_band=1e-3):
        self = super(OracleConfig, cls).__new__(
            cls, float(support_max), float(grid_step), float(moment_band))
        if not self.grid_step > 0:
            raise InvalidParameter("The grid step must be positive")
        if not self.support_max > 0:
            raise InvalidParameter("The support maximum must be positive")
        if self.moment_band < 0:
            raise InvalidParameter("The moment band must be >= 0")
        return self

    def grid(self):
        count = int(np.floor(self.support_max / self.grid_step + 1e-9)) + 1
        return np.arange(count) * self.grid_step


def _moment_rows(stats, grid, use_semivariance):
    """ (name, coefficients, target, band scale) of each moment constraint

        Moments are taken about the target mean so every row is linear in
        the probabilities. The semivariance row constrains
        E[(X-m)+^2] - E[(m-X)+^2] to s sigma^2 and shares the band scale of
        the variance, as s may be 0.
    """
    dev = grid - stats.mean
    rows = [("mean", grid, stats.mean, stats.mean),
            ("variance", dev ** 2, stats.variance, stats.variance)]
    if use_semivariance:
        rows.append(("semivariance", np.sign(dev) * dev ** 2,
                     stats.semivariance * stats.variance, stats.variance))
    return rows


def worst_case_discrete(stats, costs, t, config=None, use_semivariance=True):
    """ The worst-case expected cost of a slot of duration t over
        distributions on the grid of config with moments near stats

        Returns (value, DiscreteDistribution). Without the semivariance
        only the mean and variance are constrained.
        Raises GridInfeasible when the band is too narrow for the grid.
    """
    if config is None:
        config = OracleConfig()
    require_feasible(stats)
    if config.support_max < costs.horizon:
        raise InvalidParameter("The support maximum %g is below the horizon "
                               "%g" % (config.support_max, costs.horizon))
    if not 0 <= t <= costs.horizon:
        raise OutOfRange("t=%r outside [0, %r]" % (t, costs.horizon))

    grid = config.grid()
    objective = (costs.q * np.maximum(grid - t, 0) +
                 costs.b * np.maximum(t - grid, 0))
    delta = config.moment_band
    A_ub, b_ub, A_eq, b_eq = [], [], [np.ones(grid.size)], [1.0]
    # Names follow the row order of lp_solve, inequalities first
    names, row_names = [], []
    for name, coeffs, target, scale in _moment_rows(stats, grid,
                                                    use_semivariance):
        # Rows are scaled to unit largest coefficient
        norm = np.abs(coeffs).max()
        names.append(name)
        if delta == 0:
            A_eq.append(coeffs / norm)
            b_eq.append(target / norm)
            continue
        width = delta * abs(scale)
        A_ub.append(coeffs / norm)
        b_ub.append((target + width) / norm)
        A_ub.append(-coeffs / norm)
        b_ub.append(-(target - width) / norm)
        row_names.extend(["%s <= %.6g" % (name, target + width),
                          "%s >= %.6g" % (name, target - width)])
    if delta == 0:
        row_names = ["sum of probabilities"] + names
    else:
        row_names.append("sum of probabilities")

    lp = LinearProgram(objective, A_ub or None, b_ub if A_ub else None,
                       A_eq, b_eq)
    try:
        solution = lp_solve(lp)
    except LPInfeasible as e:
        unmet = [row_names[i] for i in e.rows]
        raise GridInfeasible(e.rows, unmet or names)

    probs = solution.x / solution.x.sum()
    atoms = [(grid[i], probs[i]) for i in np.flatnonzero(probs > 1e-12)]
    total = sum(p for _, p in atoms)
    dist = DiscreteDistribution([(x, p / total) for x, p in atoms])
    log.debug("Grid worst case at t=%g: %.6g on %d atoms", t,
              solution.value, len(dist))
    return solution.value, dist


def tv_lp(center, values, rho):
    """ max values.p over probability vectors p with sum|p - center| <= rho

        The absolute values are linearised with d >= p - center and
        d >= center - p. rho above 2 is clamped to 2.
    """
    center = np.asarray(center, dtype=float)
    values = np.asarray(values, dtype=float)
    n = center.size
    eye = np.eye(n)
    rho = min(max(float(rho), 0.0), 2.0)
    # Variables are (p, d)
    c = np.concatenate([values, np.zeros(n)])
    A_ub = np.vstack([np.hstack([eye, -eye]),
                      np.hstack([-eye, -eye]),
                      np.concatenate([np.zeros(n), np.ones(n)]),
                      np.hstack([eye, np.zeros((n, n))])])
    b_ub = np.concatenate([center, -center, [rho], np.ones(n)])
    A_eq = np.concatenate([np.ones(n), np.zeros(n)])[None, :]
    solution = lp_solve(LinearProgram(c, A_ub, b_ub, A_eq, [1.0]))
    return solution.value
