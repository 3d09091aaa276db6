"""Dataset loaders: raw text, HDFS, BGL-family supercomputer logs, Hadoop.

Each loader turns a text log into an event table (one row per event) and,
for datasets with a grouping key, a sequence table with labels. Lines that
do not match the expected field layout are treated as continuations of the
previous event's message (appended with a newline) when a previous event
exists in the same file, otherwise they are dropped; both cases are counted
in ``table.meta`` and reported through the module logger, so no input is
silently lost.

Low-cardinality string columns are interned, which keeps multi-gigabyte
datasets loadable and is also measurably faster than storing fresh strings.
"""

from __future__ import annotations

import csv
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date as _date
from pathlib import Path
from sys import intern

import numpy as np

from .tables import EventTable, SequenceTable

logger = logging.getLogger("logbench.loaders")

FORMATS = ("raw", "hdfs", "bgl", "thunderbird", "spirit", "liberty", "hadoop")
SUPERCOMPUTER_FORMATS = ("bgl", "thunderbird", "spirit", "liberty")

_EPOCH_ORDINAL = _date(1970, 1, 1).toordinal()
_BLOCK_RE = re.compile(r"blk_-?\d+")


@dataclass
class LoaderSpec:
    """Where a dataset lives and how to read it."""

    format: str
    log_path: Path
    label_path: Path | None = None

    def __post_init__(self):
        self.format = str(self.format).lower()
        self.log_path = Path(self.log_path)
        if self.label_path is not None:
            self.label_path = Path(self.label_path)
        if self.format not in FORMATS:
            raise ValueError(
                f"unknown format {self.format!r}, expected one of {FORMATS}")


def load(spec: LoaderSpec):
    """Dispatch on spec.format. Returns (events, sequences or None)."""
    if spec.format == "raw":
        return load_raw(spec.log_path), None
    if spec.format == "hdfs":
        return load_hdfs(spec.log_path, spec.label_path)
    if spec.format in SUPERCOMPUTER_FORMATS:
        return load_supercomputer(spec.log_path, spec.format), None
    if spec.format == "hadoop":
        if spec.label_path is None:
            raise ValueError("hadoop loading requires label_path")
        return load_hadoop(spec.log_path, spec.label_path)
    raise ValueError(f"unknown format {spec.format!r}")


def _to_timestamps(epoch_us: list) -> np.ndarray:
    return (np.asarray(epoch_us, dtype=np.int64)
            .view(np.dtype("datetime64[us]")))


def _object_column(values: list) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = v
    return out


def _warn_counts(name: str, meta: dict) -> None:
    issues = {k: v for k, v in meta.items()
              if k.startswith(("dropped", "merged", "rows_without",
                               "sequences_unlabeled")) and v}
    if issues:
        logger.warning("%s: %s", name, issues)


# ---------------------------------------------------------------------------
# raw text


def load_raw(path) -> EventTable:
    """Load an unstructured text file: one line, one event.

    There is no timestamp in the data, so every row is stamped with the
    wall-clock time at which the load ran (a single stamp for the whole
    table). Nothing is dropped; empty lines become empty messages.
    """
    messages = []
    with open(path, "r", encoding="utf-8", errors="replace", newline="\n") as f:
        for line in f:
            messages.append(line.rstrip("\n"))
    now_us = time.time_ns() // 1000
    ts = np.full(len(messages), now_us, dtype=np.int64) \
        .view(np.dtype("datetime64[us]"))
    meta = {"source": str(path), "lines_read": len(messages),
            "dropped_lines": 0, "merged_continuations": 0}
    return EventTable({"m_message": _object_column(messages),
                       "m_timestamp": ts}, meta=meta)


# ---------------------------------------------------------------------------
# HDFS


def _hdfs_epoch_seconds(datestr: str, timestr: str, cache: dict):
    """Seconds since epoch for yymmdd + HHMMSS, None if out of range."""
    day = cache.get(datestr)
    if day is None:
        try:
            day = _date(2000 + int(datestr[0:2]), int(datestr[2:4]),
                        int(datestr[4:6])).toordinal() - _EPOCH_ORDINAL
        except ValueError:
            return None
        cache[datestr] = day
    h = int(timestr[0:2])
    m = int(timestr[2:4])
    s = int(timestr[4:6])
    if h > 23 or m > 59 or s > 59:
        return None
    return day * 86400 + h * 3600 + m * 60 + s


def load_hdfs(log_path, label_path=None):
    """Load an HDFS log and its block labels.

    Expected line layout::

        <yymmdd> <HHMMSS> <pid> <LEVEL> <component>: <message>

    The sequence id of an event is the first ``blk_`` block id found in the
    message; lines without one keep seq_id None and are counted. Returns
    (events, sequences) where the sequence table carries one row per distinct
    block in first-seen order with its label from the label file (blocks
    missing from the label file count as normal, with a warning).
    """
    messages, epochs, seqs = [], [], []
    pids, levels, comps = [], [], []
    dropped = merged = no_seq = 0
    lines_read = 0
    date_cache: dict = {}

    with open(log_path, "r", encoding="utf-8", errors="replace",
              newline="\n") as f:
        for line in f:
            lines_read += 1
            line = line.rstrip("\n")
            p = line.split(" ", 5)
            ok = (len(p) == 6 and len(p[0]) == 6 and len(p[1]) == 6
                  and p[0].isdigit() and p[1].isdigit() and p[2].isdigit()
                  and p[4].endswith(":"))
            sec = _hdfs_epoch_seconds(p[0], p[1], date_cache) if ok else None
            if sec is None:
                if messages:
                    messages[-1] = messages[-1] + "\n" + line
                    merged += 1
                else:
                    dropped += 1
                continue
            msg = p[5]
            m = _BLOCK_RE.search(msg)
            if m is None:
                seqs.append(None)
                no_seq += 1
            else:
                seqs.append(intern(m.group()))
            messages.append(msg)
            epochs.append(sec * 1_000_000)
            pids.append(int(p[2]))
            levels.append(intern(p[3]))
            comps.append(intern(p[4][:-1]))

    meta = {"source": str(log_path), "lines_read": lines_read,
            "dropped_lines": dropped, "merged_continuations": merged,
            "rows_without_seq_id": no_seq}
    events = EventTable({
        "seq_id": _object_column(seqs),
        "m_message": _object_column(messages),
        "m_timestamp": _to_timestamps(epochs),
        "pid": np.asarray(pids, dtype=np.int64) if pids
               else np.zeros(0, dtype=np.int64),
        "level": _object_column(levels),
        "component": _object_column(comps),
    }, meta=meta)

    labels = read_hdfs_labels(label_path) if label_path is not None else {}
    seq_ids, seq_counts = [], {}
    for sid in seqs:
        if sid is None:
            continue
        if sid not in seq_counts:
            seq_ids.append(sid)
            seq_counts[sid] = 0
        seq_counts[sid] += 1
    unlabeled = sum(1 for sid in seq_ids if sid not in labels) \
        if label_path is not None else 0
    seq_meta = {"source": str(log_path), "sequences_unlabeled": unlabeled}
    sequences = SequenceTable({
        "seq_id": _object_column(seq_ids),
        "label": np.asarray([labels.get(s, False) for s in seq_ids],
                            dtype=bool),
        "seq_len": np.asarray([seq_counts[s] for s in seq_ids],
                              dtype=np.int64),
    }, meta=seq_meta)
    events.meta["sequences"] = len(seq_ids)
    _warn_counts("hdfs", {**events.meta, **seq_meta})
    return events, sequences


def read_hdfs_labels(path) -> dict[str, bool]:
    """Read a ``BlockId,Label`` csv; Label is Normal or Anomaly."""
    labels: dict[str, bool] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != \
                ["blockid", "label"]:
            raise ValueError(f"{path}: expected header BlockId,Label")
        for row in reader:
            if not row:
                continue
            value = row[1].strip().lower()
            if value == "anomaly":
                labels[row[0].strip()] = True
            elif value == "normal":
                labels[row[0].strip()] = False
            else:
                raise ValueError(
                    f"{path}: label must be Normal or Anomaly, got {row[1]!r}")
    return labels


# ---------------------------------------------------------------------------
# BGL / Thunderbird / Spirit / Liberty


def load_supercomputer(log_path, format: str) -> EventTable:
    """Load one of the space-delimited supercomputer logs.

    ``bgl`` lines carry ten fields::

        <alert> <epoch> <date> <node> <datetime> <node> <type> <component>
        <level> <message>

    ``thunderbird``, ``spirit`` and ``liberty`` share a nine-field layout::

        <alert> <epoch> <date> <admin> <month> <day> <time> <location>
        <message>

    An alert tag of ``-`` means normal; anything else labels the event as an
    anomaly. Timestamps come from the epoch field.
    """
    if format not in SUPERCOMPUTER_FORMATS:
        raise ValueError(f"format must be one of {SUPERCOMPUTER_FORMATS}")
    if format == "bgl":
        return _load_bgl(log_path)
    return _load_tbird_family(log_path, format)


def _load_bgl(log_path) -> EventTable:
    alerts, epochs, dates, nodes = [], [], [], []
    fulltimes, nodereps, types_, comps, levels, messages = \
        [], [], [], [], [], []
    dropped = merged = 0
    lines_read = 0
    with open(log_path, "r", encoding="utf-8", errors="replace",
              newline="\n") as f:
        for line in f:
            lines_read += 1
            p = line.rstrip("\n").split(" ", 9)
            if len(p) == 10:
                try:
                    epoch = int(p[1])
                except ValueError:
                    epoch = None
                if epoch is not None:
                    alerts.append(intern(p[0]))
                    epochs.append(epoch * 1_000_000)
                    dates.append(intern(p[2]))
                    nodes.append(intern(p[3]))
                    fulltimes.append(p[4])
                    nodereps.append(intern(p[5]))
                    types_.append(intern(p[6]))
                    comps.append(intern(p[7]))
                    levels.append(intern(p[8]))
                    messages.append(p[9])
                    continue
            if messages:
                messages[-1] = messages[-1] + "\n" + line.rstrip("\n")
                merged += 1
            else:
                dropped += 1

    meta = {"source": str(log_path), "lines_read": lines_read,
            "dropped_lines": dropped, "merged_continuations": merged}
    label = np.asarray([a != "-" for a in alerts], dtype=bool)
    table = EventTable({
        "label": label,
        "alert_tag": _object_column(alerts),
        "m_timestamp": _to_timestamps(epochs),
        "date": _object_column(dates),
        "node": _object_column(nodes),
        "time_full": _object_column(fulltimes),
        "node_repeat": _object_column(nodereps),
        "type": _object_column(types_),
        "component": _object_column(comps),
        "level": _object_column(levels),
        "m_message": _object_column(messages),
    }, meta=meta)
    _warn_counts("bgl", meta)
    return table


def _load_tbird_family(log_path, format: str) -> EventTable:
    alerts, epochs, dates, admins = [], [], [], []
    months, days, times, locations, messages = [], [], [], [], []
    dropped = merged = 0
    lines_read = 0
    with open(log_path, "r", encoding="utf-8", errors="replace",
              newline="\n") as f:
        for line in f:
            lines_read += 1
            p = line.rstrip("\n").split(" ", 8)
            if len(p) == 9:
                try:
                    epoch = int(p[1])
                except ValueError:
                    epoch = None
                if epoch is not None:
                    alerts.append(intern(p[0]))
                    epochs.append(epoch * 1_000_000)
                    dates.append(intern(p[2]))
                    admins.append(intern(p[3]))
                    months.append(intern(p[4]))
                    days.append(intern(p[5]))
                    times.append(p[6])
                    locations.append(intern(p[7]))
                    messages.append(p[8])
                    continue
            if messages:
                messages[-1] = messages[-1] + "\n" + line.rstrip("\n")
                merged += 1
            else:
                dropped += 1

    meta = {"source": str(log_path), "lines_read": lines_read,
            "dropped_lines": dropped, "merged_continuations": merged}
    label = np.asarray([a != "-" for a in alerts], dtype=bool)
    table = EventTable({
        "label": label,
        "alert_tag": _object_column(alerts),
        "m_timestamp": _to_timestamps(epochs),
        "date": _object_column(dates),
        "admin": _object_column(admins),
        "month": _object_column(months),
        "day": _object_column(days),
        "time": _object_column(times),
        "location": _object_column(locations),
        "m_message": _object_column(messages),
    }, meta=meta)
    _warn_counts(format, meta)
    return table


# ---------------------------------------------------------------------------
# Hadoop


_HADOOP_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_HADOOP_TIME_RE = re.compile(r"^\d{2}:\d{2}:\d{2},\d{3}$")


def _hadoop_epoch_us(datestr: str, timestr: str, cache: dict):
    day = cache.get(datestr)
    if day is None:
        try:
            day = _date(int(datestr[0:4]), int(datestr[5:7]),
                        int(datestr[8:10])).toordinal() - _EPOCH_ORDINAL
        except ValueError:
            return None
        cache[datestr] = day
    h = int(timestr[0:2])
    m = int(timestr[3:5])
    s = int(timestr[6:8])
    ms = int(timestr[9:12])
    if h > 23 or m > 59 or s > 59:
        return None
    return (day * 86400 + h * 3600 + m * 60 + s) * 1_000_000 + ms * 1000


def _read_hadoop_file(app: str, path: Path):
    """Parse one container log file. Layout per event line::

        YYYY-MM-DD HH:MM:SS,mmm LEVEL class: message

    Anything else continues the previous event in the same file.
    """
    rows = {"epoch": [], "level": [], "component": [], "message": []}
    dropped = merged = 0
    lines_read = 0
    cache: dict = {}
    with open(path, "r", encoding="utf-8", errors="replace",
              newline="\n") as f:
        for line in f:
            lines_read += 1
            line = line.rstrip("\n")
            p = line.split(" ", 4)
            epoch = None
            if (len(p) >= 4 and _HADOOP_DATE_RE.match(p[0])
                    and _HADOOP_TIME_RE.match(p[1]) and p[3].endswith(":")):
                epoch = _hadoop_epoch_us(p[0], p[1], cache)
            if epoch is None:
                if rows["message"]:
                    rows["message"][-1] = rows["message"][-1] + "\n" + line
                    merged += 1
                else:
                    dropped += 1
                continue
            rows["epoch"].append(epoch)
            rows["level"].append(intern(p[2]))
            rows["component"].append(intern(p[3][:-1]))
            rows["message"].append(p[4] if len(p) == 5 else "")
    return app, rows, {"lines_read": lines_read, "dropped_lines": dropped,
                       "merged_continuations": merged}


def read_app_labels(path) -> dict[str, bool]:
    """Read an ``application,label`` csv.

    A label of Normal (case-insensitive) is normal; any other non-empty
    value (for instance a failure type) marks the application anomalous.
    """
    labels: dict[str, bool] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != \
                ["application", "label"]:
            raise ValueError(f"{path}: expected header application,label")
        for row in reader:
            if not row:
                continue
            labels[row[0].strip()] = row[1].strip().lower() != "normal"
    return labels


def load_hadoop(root_dir, app_labels):
    """Load a tree of per-application Hadoop logs.

    ``root_dir`` contains one directory per application run; every regular
    file inside (any depth) is a container log. Files are read in parallel
    but merged in sorted (application, file path) order, so the result does
    not depend on scheduling. ``app_labels`` is either a dict or the path of
    an ``application,label`` csv. Returns (events, sequences) with the
    application name as seq_id.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise NotADirectoryError(f"{root}: hadoop loader expects a directory")
    labels = app_labels if isinstance(app_labels, dict) \
        else read_app_labels(app_labels)

    apps = sorted(d.name for d in root.iterdir() if d.is_dir())
    if not apps:
        logger.warning("hadoop: no application directories under %s", root)
    jobs = []
    for app in apps:
        files = sorted(p for p in (root / app).rglob("*") if p.is_file())
        for path in files:
            jobs.append((app, path))

    results = []
    if jobs:
        with ThreadPoolExecutor(max_workers=min(8, len(jobs))) as pool:
            results = list(pool.map(lambda j: _read_hadoop_file(*j), jobs))

    seqs, epochs, levels, comps, messages = [], [], [], [], []
    dropped = merged = lines_read = 0
    per_app_counts: dict[str, int] = {a: 0 for a in apps}
    for app, rows, counts in results:
        n = len(rows["message"])
        seqs.extend([app] * n)
        epochs.extend(rows["epoch"])
        levels.extend(rows["level"])
        comps.extend(rows["component"])
        messages.extend(rows["message"])
        per_app_counts[app] += n
        dropped += counts["dropped_lines"]
        merged += counts["merged_continuations"]
        lines_read += counts["lines_read"]

    meta = {"source": str(root), "lines_read": lines_read,
            "dropped_lines": dropped, "merged_continuations": merged,
            "sequences": len(apps)}
    events = EventTable({
        "seq_id": _object_column([intern(s) for s in seqs]),
        "m_message": _object_column(messages),
        "m_timestamp": _to_timestamps(epochs),
        "level": _object_column(levels),
        "component": _object_column(comps),
    }, meta=meta)

    unlabeled = sum(1 for a in apps if a not in labels)
    seq_meta = {"source": str(root), "sequences_unlabeled": unlabeled}
    sequences = SequenceTable({
        "seq_id": _object_column(apps),
        "label": np.asarray([labels.get(a, False) for a in apps], dtype=bool),
        "seq_len": np.asarray([per_app_counts[a] for a in apps],
                              dtype=np.int64),
    }, meta=seq_meta)
    _warn_counts("hadoop", {**meta, **seq_meta})
    return events, sequences
