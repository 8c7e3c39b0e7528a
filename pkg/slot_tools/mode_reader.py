"""
Loads a mode-set JSON document into a ModeSet.

The document is a list of modes, or an object with a "modes" list:

    [{"name": "30-min", "mean": 48.70, "std": 31.15,
      "semivariance": 0.59, "prob": 0.1383}, ...]

Problems found while loading are logged against the mode they concern
and recorded on the reader, whatever the logging level, so that callers
such as the feasibility tool can report every issue at once rather than
only the first.
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

import json
import logging
import math

from six import integer_types, string_types

from .domain import ModeStats, ModeSet, ModeFormatError, check_feasibility
from .slot_util import expect_list, load_json, dumps


class ModeReader(object):
    """ Reads one mode object, logging any issue found """
    #: The input JSON object
    input_ = None
    #: The name of the mode, or its 1-based position
    name = None
    #: The logger
    log = None
    #: The list of (message, mode name) issues are appended to
    issues = None
    #: Set when a required value could not be read
    failed = False

    def __init__(self, input_, position, log, issues=None):
        self.input_ = input_
        self.log = log
        self.issues = [] if issues is None else issues
        self.name = "mode%d" % position
        if isinstance(input_, dict) and isinstance(input_.get("name"),
                                                   string_types):
            self.name = input_["name"].strip()
            if self.name != input_["name"]:
                self._issue("Mode name '%s' contains leading or trailing"
                            " whitespace", input_["name"])

    def _issue(self, msg, *args):
        self.issues.append((msg % args, self.name))
        self.log.warning(msg, *args)

    def read_value(self, attr, opt=False, default=None):
        """ reads in a value of any type and logs if not found """
        value = None
        if isinstance(self.input_, dict):
            value = self.input_.get(attr, None)
        if value is None:
            if not opt:
                self._issue("Required attribute %s not found in mode %s",
                            attr, self.name)
                self.failed = True
            return default
        return value

    def read_number(self, attr, opt=False, default=None):
        """ Reads a finite number, numeric strings are accepted with an
            issue logged
        """
        value = self.read_value(attr, opt, default=None)
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(
                value, (float,) + integer_types):
            try:
                value = float(value)
                self._issue("Number expected for %s but found a string in"
                            " mode %s", attr, self.name)
            except (TypeError, ValueError):
                self._issue("Number expected for %s but found %r in mode %s",
                            attr, value, self.name)
                self.failed = True
                return default
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            self._issue("Attribute %s of mode %s is not finite", attr,
                        self.name)
            self.failed = True
            return default
        return value

    def to_stats(self):
        mean = self.read_number("mean")
        std = self.read_number("std")
        semivariance = self.read_number("semivariance")
        prob = self.read_number("prob")
        if self.failed:
            return None
        stats = ModeStats(mean, std, semivariance, prob, self.name)
        report = check_feasibility(stats)
        for violation in report.violations:
            self._issue("Mode %s violates %s", self.name, violation)
        return stats


class ModeSetReader(object):
    """ Loads a mode-set JSON document

        path: the path to the document, or with as_unicode the JSON text
        logger: the logger issues are logged to
        require_feasible: when True infeasible statistics raise
                          ModeFormatError, otherwise they are only reported
                          in issues.
    """
    #: The path loaded from, None for a string
    path = None
    #: The ModeSet loaded
    mode_set = None
    #: A list of (message, mode name)
    issues = None
    #: A list of FeasibilityReport, one per mode
    reports = None
    log = None

    def __init__(self, path, logger=None, as_unicode=False,
                 require_feasible=False):
        if logger:
            self.log = logger
        else:
            self.log = logging.getLogger(__name__)
        self.issues = []
        if as_unicode:
            self.log.info("Loading modes from the string")
            doc = json.loads(path)
        else:
            self.path = path
            self.log.info("Loading modes from the file %s", path)
            doc = load_json(path, self.log)
        self._load(doc, require_feasible)

    def _load(self, doc, require_feasible):
        if isinstance(doc, dict):
            doc = doc.get("modes", doc)
        modes = []
        failed = False
        for position, item in enumerate(expect_list(doc), 1):
            reader = ModeReader(item, position, self.log, self.issues)
            stats = reader.to_stats()
            if stats is None:
                failed = True
            else:
                modes.append(stats)
        if failed:
            raise ModeFormatError("Unable to read modes: " + "; ".join(
                msg for msg, _ in self.issues))
        names = [m.name for m in modes]
        for name in set(names):
            if names.count(name) > 1:
                self.issues.append(("Duplicate mode name %s" % name, name))
                self.log.warning("Duplicate mode name %s", name)
        total = sum(m.nominal_prob for m in modes)
        if modes and total != 1.0:
            self.log.info("Nominal probabilities sum to %r", total)
        self.mode_set = ModeSet(modes, logger=self.log)
        self.reports = self.mode_set.feasibility()
        if require_feasible and not all(self.reports):
            raise ModeFormatError("Infeasible modes: " + "; ".join(
                str(r) for r in self.reports if not r.ok))


def read_mode_set(path, logger=None, require_feasible=True):
    """ Loads a ModeSet from a JSON document path """
    return ModeSetReader(path, logger=logger,
                         require_feasible=require_feasible).mode_set


def mode_set_to_json(mode_set):
    """ The JSON document form of a ModeSet """
    return [{"name": m.name, "mean": m.mean, "std": m.std_dev,
             "semivariance": m.semivariance, "prob": m.nominal_prob}
            for m in mode_set]


def write_mode_set(path, mode_set):
    with open(path, 'w') as fout:
        fout.write(dumps(mode_set_to_json(mode_set)))
        fout.write("\n")
