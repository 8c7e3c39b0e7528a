"""
Some helpful methods used throughout slot_tools and by its tools.

This includes loading JSON in any of the UTF encodings, the CSV sample and
demand formats and the canonical JSON form used to digest run
configurations.
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

import hashlib
import io
import json
import logging
import os
from collections import OrderedDict

import numpy as np
import pandas as pd
from six import string_types

#: Environment variable holding the default worker count
THREADS_ENV = "SLOT_TOOLS_THREADS"

#: CSV header of the sample file
SAMPLE_COLUMNS = ["type_id", "duration_min"]
#: CSV header of the daily demand file
DEMAND_COLUMNS = ["date", "group_id", "count"]


def expect_list(obj):
    """ Returns the given object within a list if it is not already """
    return obj if isinstance(obj, list) else [obj]


def load_json(path, logger=None):
    """ Loads a JSON document trying utf-8, utf-16 then utf-32 """
    log = logger or logging.getLogger(__name__)
    first_error = None
    for enc in ['utf-8', 'utf-16', 'utf-32']:
        try:
            with io.open(path, encoding=enc) as data_file:
                return json.load(data_file)
        except (UnicodeError, ValueError) as e:
            if first_error is None:
                first_error = e
            continue
    log.critical("Unable to open JSON file %s", path)
    raise first_error


def _plain(obj):
    """ Converts numpy scalars and arrays for json """
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError("Cannot serialise %r" % (obj,))


def dumps(obj, pretty=True):
    """ Serialises to JSON, numpy values included """
    if pretty:
        return json.dumps(obj, indent=2, default=_plain)
    return json.dumps(obj, default=_plain)


def canonical_json(obj):
    """ A deterministic JSON encoding, keys sorted and no whitespace """
    return json.dumps(obj, sort_keys=True, separators=(',', ':'),
                      default=_plain)


def digest(obj):
    """ A sha256 hex digest of the canonical JSON of obj """
    return hashlib.sha256(canonical_json(obj).encode('utf-8')).hexdigest()


def default_threads():
    """ The worker count from SLOT_TOOLS_THREADS, otherwise 1 """
    value = os.environ.get(THREADS_ENV)
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        logging.getLogger(__name__).warning(
            "Ignoring non-integer %s=%s", THREADS_ENV, value)
        return 1


def read_samples(path, names=None):
    """ Reads a CSV sample file with header type_id,duration_min

        names: if given, the order of the returned modes, otherwise modes
               are ordered by first appearance.
        Returns an OrderedDict of type_id -> numpy array of durations.
    """
    frame = pd.read_csv(path, dtype={"type_id": str})
    missing = [c for c in SAMPLE_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError("Sample file %s is missing columns %s" %
                         (path, missing))
    grouped = OrderedDict()
    for type_id, rows in frame.groupby("type_id", sort=False):
        grouped[type_id] = rows["duration_min"].to_numpy(dtype=float)
    if names is None:
        return grouped
    return OrderedDict((n, grouped.get(n, np.zeros(0))) for n in names)


def write_samples(path, samples):
    """ Writes a mapping of type_id -> durations as a CSV sample file """
    rows = []
    for type_id, values in samples.items():
        for value in values:
            rows.append((type_id, float(value)))
    frame = pd.DataFrame(rows, columns=SAMPLE_COLUMNS)
    frame.to_csv(path, index=False)


def read_demand(path):
    """ Reads a daily demand CSV with header date,group_id,count

        Returns (dates, table) where table[d][g] is the demand of group g on
        the d-th date. group_id is a 0-based group index.
    """
    frame = pd.read_csv(path, dtype={"date": str})
    missing = [c for c in DEMAND_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError("Demand file %s is missing columns %s" %
                         (path, missing))
    pivot = frame.pivot_table(index="date", columns="group_id",
                              values="count", aggfunc="sum", fill_value=0)
    pivot = pivot.sort_index()
    n_groups = int(pivot.columns.max()) + 1 if len(pivot.columns) else 0
    pivot = pivot.reindex(columns=range(n_groups), fill_value=0)
    return list(pivot.index), pivot.to_numpy(dtype=int)


def parse_list(value, convert=float):
    """ Parses a comma separated command line list """
    if isinstance(value, string_types):
        return [convert(v) for v in value.split(",") if v.strip()]
    return [convert(v) for v in expect_list(value)]
