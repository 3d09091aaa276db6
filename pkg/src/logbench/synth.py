"""Seeded synthetic log generation.

Three layers, all driven by stdlib ``random.Random`` so output is stable
across platforms and library versions:

* :func:`make_template_corpus` builds an in-memory corpus of messages with
  known template structure, for exercising and validating template miners.
* :func:`make_sequence_dataset` builds labeled event and sequence tables in
  memory; anomalous sequences carry both learnable fault tokens and a token
  unique to the sequence, and every normal sequence covers the full normal
  vocabulary, so vocabulary-based detectors behave predictably under any
  train/test split.
* :func:`generate_synthetic` writes loadable log files (bgl or hdfs layout)
  of arbitrary size plus truth sidecars, streaming so multi-million-line
  files do not need proportional memory.

Corpus structure: templates within a corpus have pairwise distinct token
counts, the first two tokens of a template are constants unique to it, and
parameter slots sit at positions two onward, always fewer than half of the
positions, with fixed-width value pools. That keeps the templates cleanly
recoverable by count-, prefix- and subsequence-based miners alike.
"""

from __future__ import annotations

import random
from datetime import date as _date
from pathlib import Path

import numpy as np

from .tables import EventTable, SequenceTable

_WORDS = [
    "accept", "alloc", "attach", "batch", "buffer", "cache", "channel",
    "client", "close", "commit", "config", "daemon", "detach", "device",
    "disk", "driver", "entry", "error", "fetch", "flush", "frame", "group",
    "handle", "index", "init", "input", "kernel", "link", "lookup", "merge",
    "mount", "node", "offset", "open", "packet", "page", "probe", "queue",
    "read", "ready", "reply", "report", "request", "retry", "route",
    "scan", "send", "server", "session", "slot", "socket", "start", "state",
    "status", "sync", "table", "thread", "timer", "update", "worker",
    "write",
]

FORMATS = ("bgl", "hdfs")


def _build_templates(rng: random.Random, n_templates: int):
    """Templates as token lists with None at parameter slots, plus pools.

    Token counts are sampled without replacement from 5..14, so a corpus can
    hold at most 10 templates. Constant tokens carry the template index as a
    suffix, which keeps the templates disjoint in vocabulary.
    """
    if not 1 <= n_templates <= 10:
        raise ValueError("n_templates must be in 1..10")
    counts = rng.sample(range(5, 15), n_templates)
    templates = []
    pools = []
    for t, length in enumerate(counts):
        # strictly fewer parameters than half the positions: a message then
        # shares fewer tokens with any other template (even counting masked
        # placeholders) than a half-length subsequence, so no miner that
        # requires half-overlap can merge across templates
        n_params = rng.randint(1, max(1, (length - 1) // 2))
        param_positions = set(rng.sample(range(2, length), n_params))
        tokens: list = []
        slot_pools: dict[int, list[str]] = {}
        for i in range(length):
            if i in param_positions:
                tokens.append(None)
                kind = rng.choice(("num", "hex", "ip", "tok"))
                pool = []
                for v in rng.sample(range(100), 6):
                    if kind == "num":
                        pool.append(str(10000 + t * 1000 + i * 100 + v))
                    elif kind == "hex":
                        pool.append(f"0x{t * 4096 + i * 256 + v:04x}")
                    elif kind == "ip":
                        pool.append(f"10.{t}.{i}.{v:02d}")
                    else:
                        pool.append(f"u{t}s{i}v{v:02d}")
                slot_pools[i] = pool
            else:
                tokens.append(f"{rng.choice(_WORDS)}_{t}")
        templates.append(tokens)
        pools.append(slot_pools)
    return templates, pools


def _instantiate(template, slot_pools, rng: random.Random) -> str:
    parts = []
    for i, tok in enumerate(template):
        if tok is None:
            parts.append(rng.choice(slot_pools[i]))
        else:
            parts.append(tok)
    return " ".join(parts)


def make_template_corpus(n_templates: int, n_lines: int, seed: int) -> dict:
    """A corpus with known template ids.

    Every template occurs at least once as long as n_lines >= n_templates.
    Returns a dict with ``messages``, ``template_ids`` and ``templates``
    (token lists with None marking parameter slots).
    """
    if n_lines < 1:
        raise ValueError("n_lines must be positive")
    rng = random.Random(seed)
    templates, pools = _build_templates(rng, n_templates)
    ids = list(range(min(n_templates, n_lines)))
    ids += [rng.randrange(n_templates) for _ in range(n_lines - len(ids))]
    rng.shuffle(ids)
    messages = [_instantiate(templates[t], pools[t], rng) for t in ids]
    return {"messages": messages, "template_ids": ids,
            "templates": templates}


def make_sequence_dataset(n_sequences: int = 300, n_templates: int = 6,
                          anomaly_rate: float = 0.15, seed: int = 0):
    """Labeled (events, sequences) tables for detector benchmarks.

    Every sequence contains at least one event of every normal template, so
    the normal vocabulary of any train subset covers every normal test
    sequence. Anomalous sequences additionally contain one or two fault
    events whose tokens mix two constant markers with a token unique to the
    sequence; the unique token can never occur in training data, the constant
    markers make the anomalies learnable from counts.
    """
    if not 0.0 <= anomaly_rate <= 1.0:
        raise ValueError("anomaly_rate must be in [0, 1]")
    rng = random.Random(seed)
    templates, pools = _build_templates(rng, n_templates)
    n_anomalous = round(anomaly_rate * n_sequences)
    anomalous = set(rng.sample(range(n_sequences), n_anomalous))

    seq_ids, seq_labels, seq_lens = [], [], []
    ev_seq, ev_msg, ev_ts = [], [], []
    epoch_us = 1254312000 * 1_000_000
    for s in range(n_sequences):
        sid = f"seq_{s:05d}"
        order = list(range(n_templates))
        rng.shuffle(order)
        order += [rng.randrange(n_templates) for _ in range(rng.randint(0, 4))]
        events = [_instantiate(templates[t], pools[t], rng) for t in order]
        if s in anomalous:
            for j in range(rng.randint(1, 2)):
                unique = f"q{s}z{j}q"
                events.insert(rng.randrange(len(events) + 1),
                              f"fault_marker burst_marker {unique}")
        for msg in events:
            ev_seq.append(sid)
            ev_msg.append(msg)
            ev_ts.append(epoch_us)
            epoch_us += 1_000_000
        seq_ids.append(sid)
        seq_labels.append(s in anomalous)
        seq_lens.append(len(events))

    events = EventTable({
        "seq_id": ev_seq,
        "m_message": ev_msg,
        "m_timestamp": np.asarray(ev_ts, dtype=np.int64)
            .view(np.dtype("datetime64[us]")),
    }, meta={"source": f"synthetic(seed={seed})"})
    sequences = SequenceTable({
        "seq_id": seq_ids,
        "label": np.asarray(seq_labels, dtype=bool),
        "seq_len": np.asarray(seq_lens, dtype=np.int64),
    })
    return events, sequences


_FAULT_TEMPLATE = ["fault_marker", "machine", "check", "interrupt", None]
_FAULT_POOL = {4: [f"0x{v:06x}" for v in range(16, 22)]}


def _bgl_day_strings(day: int, cache: dict):
    strings = cache.get(day)
    if strings is None:
        d = _date.fromordinal(day + _date(1970, 1, 1).toordinal())
        strings = (f"{d.year}.{d.month:02d}.{d.day:02d}",
                   f"{d.year}-{d.month:02d}-{d.day:02d}")
        cache[day] = strings
    return strings


def generate_synthetic(out_dir, format: str = "bgl", n_templates: int = 8,
                       n_lines: int = 10000, anomaly_rate: float = 0.0,
                       seed: int = 0, name: str | None = None) -> dict:
    """Write a synthetic log in a loadable layout, streaming.

    For ``bgl`` the output is ``<name>.log`` plus ``<name>_truth.csv``
    (``line,template_id,label``); anomalous lines use a dedicated fault
    template and a non ``-`` alert tag. For ``hdfs`` the output adds
    ``<name>_labels.csv`` (``BlockId,Label``) and the block id rides at the
    end of each message. Returns the paths. Same arguments, same bytes.
    """
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    if not 0.0 <= anomaly_rate <= 1.0:
        raise ValueError("anomaly_rate must be in [0, 1]")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = name or f"synthetic_{format}_{n_lines}"
    log_path = out_dir / f"{stem}.log"
    truth_path = out_dir / f"{stem}_truth.csv"
    rng = random.Random(seed)
    templates, pools = _build_templates(rng, n_templates)

    if format == "bgl":
        _write_bgl(log_path, truth_path, templates, pools, rng,
                   n_lines, anomaly_rate)
        return {"log": log_path, "truth": truth_path, "labels": None}
    labels_path = out_dir / f"{stem}_labels.csv"
    _write_hdfs(log_path, truth_path, labels_path, templates, pools, rng,
                n_lines, anomaly_rate)
    return {"log": log_path, "truth": truth_path, "labels": labels_path}


_CHUNK = 100_000


def _write_bgl(log_path, truth_path, templates, pools, rng,
               n_lines, anomaly_rate) -> None:
    n_templates = len(templates)
    nodes = [f"R{rng.randrange(64):02d}-M{rng.randrange(4)}-N{rng.randrange(8)}"
             for _ in range(12)]
    base_epoch = 1117838570
    day_cache: dict = {}
    lines: list[str] = []
    truth: list[str] = ["line,template_id,label"]
    with open(log_path, "w", encoding="utf-8", newline="\n") as logf, \
            open(truth_path, "w", encoding="utf-8", newline="\n") as truthf:
        for i in range(n_lines):
            epoch = base_epoch + i
            sec = epoch % 86400
            datestr, datedash = _bgl_day_strings(epoch // 86400, day_cache)
            fulltime = (f"{datedash}-{sec // 3600:02d}."
                        f"{(sec % 3600) // 60:02d}.{sec % 60:02d}.{i % 997:06d}")
            if anomaly_rate and rng.random() < anomaly_rate:
                tid = n_templates
                alert = "FAULT"
                level = "FATAL"
                msg = _instantiate(_FAULT_TEMPLATE, _FAULT_POOL, rng)
            else:
                tid = rng.randrange(n_templates)
                alert = "-"
                level = "INFO"
                msg = _instantiate(templates[tid], pools[tid], rng)
            node = nodes[i % len(nodes)]
            lines.append(f"{alert} {epoch} {datestr} {node} {fulltime} "
                         f"{node} RAS KERNEL {level} {msg}")
            truth.append(f"{i},{tid},{int(alert != '-')}")
            if len(lines) >= _CHUNK:
                logf.write("\n".join(lines))
                logf.write("\n")
                truthf.write("\n".join(truth))
                truthf.write("\n")
                lines, truth = [], []
        if lines:
            logf.write("\n".join(lines))
            logf.write("\n")
        if truth:
            truthf.write("\n".join(truth))
            truthf.write("\n")


def _write_hdfs(log_path, truth_path, labels_path, templates, pools, rng,
                n_lines, anomaly_rate) -> None:
    n_templates = len(templates)
    components = ["dfs.DataNode$PacketResponder", "dfs.FSNamesystem",
                  "dfs.DataNode$DataXceiver", "dfs.DataBlockScanner"]
    lines: list[str] = []
    truth: list[str] = ["line,template_id,label"]
    label_rows: list[str] = ["BlockId,Label"]
    written = 0
    seq_index = 0
    base_sec = 0
    with open(log_path, "w", encoding="utf-8", newline="\n") as logf, \
            open(truth_path, "w", encoding="utf-8", newline="\n") as truthf:
        while written < n_lines:
            block = f"blk_{rng.randrange(10**9, 10**10)}"
            anomalous = bool(anomaly_rate) and rng.random() < anomaly_rate
            length = rng.randint(4, 12)
            events = []
            for _ in range(length):
                tid = rng.randrange(n_templates)
                events.append((tid, _instantiate(templates[tid], pools[tid],
                                                 rng)))
            if anomalous:
                for j in range(rng.randint(1, 2)):
                    unique = f"q{seq_index}z{j}q"
                    events.insert(
                        rng.randrange(len(events) + 1),
                        (n_templates,
                         f"fault_marker burst_marker {unique}"))
            label_rows.append(f"{block},{'Anomaly' if anomalous else 'Normal'}")
            for tid, msg in events:
                if written >= n_lines:
                    break
                sec = (base_sec + written) % 86400
                timestr = (f"{sec // 3600:02d}{(sec % 3600) // 60:02d}"
                           f"{sec % 60:02d}")
                comp = components[written % len(components)]
                lines.append(f"081109 {timestr} {written % 9000 + 100} INFO "
                             f"{comp}: {msg} {block}")
                truth.append(f"{written},{tid},{int(anomalous)}")
                written += 1
            seq_index += 1
            if len(lines) >= _CHUNK:
                logf.write("\n".join(lines))
                logf.write("\n")
                truthf.write("\n".join(truth))
                truthf.write("\n")
                lines, truth = [], []
        if lines:
            logf.write("\n".join(lines))
            logf.write("\n")
        if truth:
            truthf.write("\n".join(truth))
            truthf.write("\n")
    with open(labels_path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(label_rows))
        f.write("\n")
