#!/usr/bin/python
""" The slot_design command line tool

    Subcommands check mode statistics, design templates, plot worst-case
    curves, compare the closed forms with the LP oracle, generate synthetic
    samples and evaluate templates against samples and daily demand.

    Exit codes: 0 on success, 1 on a usage error and 2 on a domain error,
    which is also written to stderr as JSON.
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

from __future__ import print_function
import argparse
import datetime
import json
import logging
import os
import sys
import time
from collections import namedtuple

import numpy as np
import pandas as pd

from . import __version__
from .domain import (ModeStats, CostParams, SlotError, InfeasibleStats,
                     DegenerateSample, InsufficientSamples)
from .mode_reader import ModeSetReader, read_mode_set, write_mode_set
from .piecewise import build_curve, MOMENT_SETS
from .solver import solve_exact, solution_from_json
from .bounds import group_bounds
from .heuristics import (FeatureSpec, ClusterConfig, solve_heuristic,
                         METHODS)
from .saa import solve_saa
from .oracle import OracleConfig, worst_case_discrete
from .data import GenConfig, SampleSet, generate
from .evaluation import (empirical_cost_of, group_shares, allocate_slots,
                         count_overrides)
from .slot_util import (dumps, digest, default_threads, load_json,
                        read_samples, read_demand, parse_list)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2


class RunManifest(namedtuple('RunManifest', ['command', 'config_digest',
                                             'seed', 'version', 'wall_time',
                                             'timestamp'])):
    """ Attached to every JSON output so a run can be reproduced

        wall_time and timestamp differ between runs of the same command.
        Outputs of identical inputs and seed are byte-identical only once
        both are dropped, see stable().
    """
    __slots__ = ()

    #: The fields that vary between otherwise identical runs
    VOLATILE = ('wall_time', 'timestamp')

    def stable(self):
        """ The manifest as a dict without the VOLATILE fields """
        return dict((k, v) for k, v in self._asdict().items()
                    if k not in self.VOLATILE)

    @classmethod
    def for_args(cls, args, started):
        config = dict((k, v) for k, v in vars(args).items()
                      if k not in ('func', 'verbose', 'quiet'))
        return cls(args.command, digest(config), getattr(args, 'seed', None),
                   __version__, time.time() - started,
                   datetime.datetime.now(datetime.timezone.utc).strftime(
                       "%Y-%m-%dT%H:%M:%S.%fZ"))


class SlotArgumentParser(argparse.ArgumentParser):
    """ Exits with EXIT_USAGE rather than argparse's 2 """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _stats_arg(value):
    mean, std, semi = parse_list(value)
    return ModeStats(mean, std, semi)


def _k_arg(value):
    if value == "auto":
        return value
    return int(value)


def _add_costs(parser):
    group = parser.add_argument_group("costs")
    group.add_argument('--q', type=float, default=30.0,
                       help="overtime cost per minute (default: 30)")
    group.add_argument('--b', type=float, default=20.0,
                       help="idle cost per minute (default: 20)")
    group.add_argument('--c', type=float, default=80.0,
                       help="activation cost per group (default: 80)")
    group.add_argument('--horizon', type=float, default=720.0,
                       help="the longest slot in minutes (default: 720)")
    group.add_argument('--rho', type=float, default=0.0,
                       help="the total variation radius (default: 0)")
    group.add_argument('--moment-set', choices=MOMENT_SETS,
                       default="semivariance",
                       help="the moment ambiguity set (default: "
                            "semivariance)")


def _costs(args):
    return CostParams(args.q, args.b, args.c, args.horizon, args.rho)


def parse_args(argv=None):
    """ Parse command line arguments """
    parser = SlotArgumentParser(
        prog="slot_design",
        description="Designs robust appointment slot templates")
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    parser.add_argument('-v', '--verbose', action="store_true",
                        help="log debugging output")
    parser.add_argument('-q', '--quiet', action="store_true",
                        help="disable all logging")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    sub = subparsers.add_parser(
        'feasibility', help="check mode statistics are realizable")
    sub.add_argument('modes', help="a mode-set JSON document")
    sub.set_defaults(func=cmd_feasibility)

    sub = subparsers.add_parser('solve', help="design a template")
    sub.add_argument('modes', help="a mode-set JSON document")
    method = sub.add_mutually_exclusive_group()
    method.add_argument('--exact', action='store_true',
                        help="enumerate every partition (default)")
    method.add_argument('--heuristic', choices=METHODS,
                        help="cluster the modes")
    method.add_argument('--saa', action='store_true',
                        help="sample average approximation, needs --samples")
    sub.add_argument('--features', default=None,
                     help="clustering features from m,sigma,s (default: m,s "
                          "for kmeans, m,sigma,s for kmedoids)")
    sub.add_argument('--k', type=_k_arg, default="auto",
                     help="the number of clusters or auto (default: auto)")
    sub.add_argument('--folds', type=int, default=5,
                     help="cross-validation folds (default: 5)")
    sub.add_argument('--samples', default=None,
                     help="a training sample CSV, for auto K and --saa")
    sub.add_argument('--threads', type=int, default=None,
                     help="worker processes (default: $SLOT_TOOLS_THREADS "
                          "or 1)")
    sub.add_argument('--seed', type=int, default=0,
                     help="the clustering seed (default: 0)")
    sub.add_argument('-o', '--output', default=None,
                     help="the output file (default: stdout)")
    _add_costs(sub)
    sub.set_defaults(func=cmd_solve)

    sub = subparsers.add_parser(
        'pi-curve', help="write a mode's worst-case cost curve as CSV")
    sub.add_argument('--stats', type=_stats_arg, required=True,
                     help="the mode as mean,std,semivariance")
    sub.add_argument('--start', type=float, default=0.0)
    sub.add_argument('--stop', type=float, default=None,
                     help="the last t (default: the horizon)")
    sub.add_argument('--step', type=float, default=1.0)
    sub.add_argument('-o', '--output', default=None,
                     help="the output file (default: stdout)")
    _add_costs(sub)
    sub.set_defaults(func=cmd_pi_curve)

    sub = subparsers.add_parser(
        'oracle-check', help="compare the closed form with the LP oracle")
    sub.add_argument('--stats', type=_stats_arg, required=True,
                     help="the mode as mean,std,semivariance")
    sub.add_argument('--t', default=None,
                     help="comma separated durations (default: 11 points "
                          "over the horizon)")
    sub.add_argument('--support-max', type=float, default=2000.0)
    sub.add_argument('--grid-step', type=float, default=1.0)
    sub.add_argument('--band', type=float, default=1e-3,
                     help="the relative moment band (default: 1e-3)")
    _add_costs(sub)
    sub.set_defaults(func=cmd_oracle_check)

    sub = subparsers.add_parser('datagen', help="generate synthetic samples")
    sub.add_argument('output', help="the output directory")
    sub.add_argument('--modes', type=int, default=5)
    sub.add_argument('--train', type=int, default=100)
    sub.add_argument('--test', type=int, default=1000)
    sub.add_argument('--clip', type=float, default=720.0)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--epsilon', type=float, default=0.0,
                     help="perturb the testing laws by epsilon")
    sub.set_defaults(func=cmd_datagen)

    sub = subparsers.add_parser(
        'eval', help="the empirical cost of a template on samples")
    sub.add_argument('solution', help="a solution JSON written by solve")
    sub.add_argument('--modes', required=True,
                     help="the mode-set JSON the solution was designed for")
    sub.add_argument('--samples', required=True, help="a sample CSV")
    sub.add_argument('--format', choices=('json', 'text'), default='json')
    sub.set_defaults(func=cmd_eval)

    sub = subparsers.add_parser(
        'overrides', help="allocate slots and count demand overrides")
    sub.add_argument('solution', help="a solution JSON written by solve")
    sub.add_argument('--demand', required=True,
                     help="a daily demand CSV date,group_id,count")
    sub.add_argument('--capacity', type=float, required=True,
                     help="the daily capacity in minutes")
    sub.add_argument('--shares', default=None,
                     help="comma separated group shares (default: the "
                          "nominal mass of each group, needs --modes)")
    sub.add_argument('--modes', default=None,
                     help="the mode-set JSON the solution was designed for")
    sub.add_argument('--per-day', action='store_true',
                     help="count days with a shortfall, not shortfall units")
    sub.set_defaults(func=cmd_overrides)

    sub = subparsers.add_parser(
        'bench', help="compare solvers on seeded synthetic instances")
    sub.add_argument('--instances', type=int, default=10)
    sub.add_argument('--seed', type=int, default=0,
                     help="the first instance seed (default: 0)")
    sub.add_argument('--modes', type=int, default=5)
    sub.add_argument('--train', type=int, default=100)
    sub.add_argument('--test', type=int, default=1000)
    sub.add_argument('--epsilon', type=float, default=0.0,
                     help="perturb the testing laws by epsilon")
    sub.add_argument('--folds', type=int, default=5)
    sub.add_argument('--threads', type=int, default=None)
    _add_costs(sub)
    sub.set_defaults(func=cmd_bench)

    return parser.parse_args(argv)


def _write(doc, output=None):
    text = dumps(doc)
    if output:
        with open(output, 'w') as fout:
            fout.write(text)
            fout.write("\n")
    else:
        print(text)


def _logger(args):
    if args.quiet:
        for name in ("null", "slot_tools"):
            logger = logging.getLogger(name)
            logger.addHandler(logging.NullHandler())
            logger.propagate = 0
        return logging.getLogger("null")
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    return logging.getLogger("slot_tools")


def cmd_feasibility(args, logger, started):
    reader = ModeSetReader(args.modes, logger=logger)
    doc = {"modes": [r.as_dict() for r in reader.reports],
           "issues": [{"message": msg, "mode": mode}
                      for msg, mode in reader.issues],
           "manifest": RunManifest.for_args(args, started)._asdict()}
    _write(doc)
    for report in reader.reports:
        if not report.ok:
            raise InfeasibleStats(report)
    return EXIT_OK


def _sample_set(path, mode_set):
    samples = read_samples(path, mode_set.names)
    return SampleSet(mode_set.names, list(samples.values()), mode_set.probs)


def cmd_solve(args, logger, started):
    mode_set = read_mode_set(args.modes, logger=logger)
    costs = _costs(args)
    if args.saa or (args.heuristic and args.k == "auto"):
        if not args.samples:
            raise SlotError("--samples is required for --saa and --k auto")
    if args.saa:
        solution = solve_saa(_sample_set(args.samples, mode_set), costs,
                             logger=logger)
    elif args.heuristic:
        spec = None
        if args.features:
            spec = FeatureSpec(args.features)
        source = mode_set
        if args.k == "auto":
            source = _sample_set(args.samples, mode_set)
        solution = solve_heuristic(
            source, costs, feature_spec=spec, method=args.heuristic,
            k=args.k, config=ClusterConfig(1, seed=args.seed),
            folds=args.folds, moment_set=args.moment_set)
    else:
        threads = args.threads or default_threads()
        solution = solve_exact(mode_set, costs, args.moment_set,
                               threads=threads, logger=logger)
    doc = solution.to_json(mode_set)
    for entry, group in zip(doc["per_group"], solution.partition):
        bounds = group_bounds(group, mode_set, costs)
        entry["lower_bound"] = bounds.lower
        entry["upper_bound"] = bounds.upper
    doc["costs"] = costs._asdict()
    doc["moment_set"] = args.moment_set
    doc["manifest"] = RunManifest.for_args(args, started)._asdict()
    _write(doc, args.output)
    return EXIT_OK


def _t_grid(start, stop, step):
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + np.arange(count) * step


def cmd_pi_curve(args, logger, started):
    costs = _costs(args)
    curve = build_curve(args.stats, costs, args.moment_set)
    stop = costs.horizon if args.stop is None else args.stop
    rows = []
    for t in _t_grid(args.start, stop, args.step):
        left, right = curve.slopes(float(t))
        rows.append((float(t), curve.value(float(t)), left, right))
    frame = pd.DataFrame(rows, columns=["t", "pi", "slope_left",
                                        "slope_right"])
    frame.to_csv(args.output or sys.stdout, index=False)
    return EXIT_OK


def cmd_oracle_check(args, logger, started):
    costs = _costs(args)
    curve = build_curve(args.stats, costs, args.moment_set)
    config = OracleConfig(args.support_max, args.grid_step, args.band)
    if args.t:
        points = parse_list(args.t)
    else:
        points = list(np.linspace(0, costs.horizon, 11))
    use_semivariance = args.moment_set == "semivariance"
    rows = []
    for t in points:
        closed = curve.value(t)
        value, dist = worst_case_discrete(args.stats, costs, t, config,
                                          use_semivariance=use_semivariance)
        gap = (value - closed) / max(abs(closed), 1e-12)
        logger.info("t=%g closed %.6g oracle %.6g gap %.3g", t, closed,
                    value, gap)
        rows.append({"t": t, "closed_form": closed, "oracle": value,
                     "relative_gap": gap, "atoms": len(dist)})
    _write({"points": rows,
            "manifest": RunManifest.for_args(args, started)._asdict()})
    return EXIT_OK


def cmd_datagen(args, logger, started):
    config = GenConfig(n_modes=args.modes, n_train=args.train,
                       n_test=args.test, clip_max=args.clip, seed=args.seed,
                       epsilon=args.epsilon)
    sample_set = generate(config)
    sample_set.to_files(args.output)
    try:
        write_mode_set(os.path.join(args.output, "modes.json"),
                       sample_set.mode_set("train", logger=logger))
    except DegenerateSample as e:
        logger.warning("Not writing modes.json: %s", e)
    _write({"output": args.output,
            "train_counts": [int(v.size) for v in sample_set.train],
            "manifest": RunManifest.for_args(args, started)._asdict()})
    return EXIT_OK


def _load_solution(path):
    doc = load_json(path)
    costs = CostParams(**doc["costs"]) if "costs" in doc else CostParams()
    return solution_from_json(doc, costs), costs


def cmd_eval(args, logger, started):
    solution, costs = _load_solution(args.solution)
    mode_set = read_mode_set(args.modes, logger=logger)
    samples = read_samples(args.samples, mode_set.names)
    report = empirical_cost_of(solution, list(samples.values()),
                               mode_set.probs, costs)
    if args.format == "text":
        print(report.to_text(mode_set.names))
    else:
        doc = report.to_json()
        doc["manifest"] = RunManifest.for_args(args, started)._asdict()
        _write(doc)
    return EXIT_OK


def cmd_overrides(args, logger, started):
    solution, _ = _load_solution(args.solution)
    if args.shares:
        shares = parse_list(args.shares)
    elif args.modes:
        shares = group_shares(solution,
                              read_mode_set(args.modes, logger=logger).probs)
    else:
        raise SlotError("Either --shares or --modes is required")
    allocation = allocate_slots(args.capacity, solution, shares)
    _, demand = read_demand(args.demand)
    report = count_overrides(allocation, demand, args.per_day)
    doc = {"allocation": allocation.to_json(),
           "overrides": report._asdict(),
           "manifest": RunManifest.for_args(args, started)._asdict()}
    _write(doc)
    return EXIT_OK


def _timed(func, *args, **kwargs):
    start = time.time()
    result = func(*args, **kwargs)
    return result, time.time() - start


def _bench_instance(seed, args, costs, threads, logger):
    """ One JSON record per solver on a generated instance, or None """
    config = GenConfig(n_modes=args.modes, n_train=args.train,
                       n_test=args.test, seed=seed, epsilon=args.epsilon)
    try:
        sample_set = generate(config)
        mode_set = sample_set.mode_set("train", logger=logger)
    except DegenerateSample as e:
        logger.warning("Skipping seed %d: %s", seed, e)
        return None

    exact, wall = _timed(solve_exact, mode_set, costs, args.moment_set,
                         threads=threads, logger=logger)
    results = [("exact", exact, wall)]
    folds = min(args.folds, min(v.size for v in sample_set.train))
    if folds < 2:
        logger.warning("Seed %d has too few samples to choose K", seed)
    else:
        for method in METHODS:
            try:
                solution, wall = _timed(
                    solve_heuristic, sample_set, costs, method=method,
                    config=ClusterConfig(1, seed=seed), folds=folds,
                    moment_set=args.moment_set)
            except (InsufficientSamples, DegenerateSample) as e:
                logger.warning("Seed %d %s: %s", seed, method, e)
                continue
            results.append((method, solution, wall))
    solution, wall = _timed(solve_saa, sample_set, costs, logger=logger)
    results.append(("saa", solution, wall))

    records = []
    for name, solution, wall in results:
        record = {"seed": seed, "method": name,
                  "partition": [list(g) for g in solution.partition],
                  "durations": solution.durations,
                  "out_of_sample": empirical_cost_of(
                      solution, sample_set.test, sample_set.nominal_probs,
                      costs).total_cost,
                  "wall_time": wall}
        if name != "saa":
            record["objective"] = solution.objective
            record["gap"] = ((solution.objective - exact.objective) /
                             exact.objective)
        records.append(record)
    return records


def cmd_bench(args, logger, started):
    costs = _costs(args)
    threads = args.threads or default_threads()
    summary = {}
    for seed in range(args.seed, args.seed + args.instances):
        records = _bench_instance(seed, args, costs, threads, logger)
        for record in records or []:
            print(json.dumps(record, sort_keys=True))
            summary.setdefault(record["method"], []).append(record)
    doc = {"summary": dict(
        (name, {"instances": len(recs),
                "mean_out_of_sample": float(np.mean(
                    [r["out_of_sample"] for r in recs])),
                "mean_gap": (float(np.mean([r["gap"] for r in recs]))
                             if "gap" in recs[0] else None),
                "mean_wall_time": float(np.mean(
                    [r["wall_time"] for r in recs]))})
        for name, recs in summary.items()),
        "manifest": RunManifest.for_args(args, started)._asdict()}
    _write(doc)
    return EXIT_OK


def dispatch(argv=None):
    """ Runs a subcommand, returning the exit code """
    started = time.time()
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_OK
    logger = _logger(args)
    try:
        return args.func(args, logger, started)
    except (SlotError, ValueError, LookupError) as e:
        logger.debug("Failed", exc_info=True)
        print(json.dumps({"error": type(e).__name__, "message": str(e)}),
              file=sys.stderr)
        return EXIT_DOMAIN


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
