"""Acceptance gate: eight end-to-end criteria, one test and one verdict each.

Every test prints a single ``[acceptance] ... PASS/FAIL`` line (run with
``-s`` or read the captured output) and asserts the same condition, so the
pytest result mirrors the printed verdict.
"""

import json
import math
import random
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from logbench import bench, detectors, features, loaders, masking, synth
from logbench.detectors import (EvalReport, auc_roc, evaluate,
                                logistic_gradient, logistic_loss)
from logbench.enhancers import (add_normalized, add_tokens,
                                aggregate_sequences)
from logbench.ngram import START_ID, ngram_score, ngram_train
from logbench.parsers import make_parser
from logbench.pipeline import PipelineConfig, run_pipeline
from logbench.synth import (generate_synthetic, make_sequence_dataset,
                            make_template_corpus)
from logbench.tables import EventTable, split_train_test


def _report(label, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"\n[acceptance] {label}: {status}{suffix}")
    assert ok, f"{label}: {status}{suffix}"


def _grouping_accuracy(pred, truth):
    """Fraction of messages whose predicted group equals their true group.

    A message counts as correct only when the full member set of its
    predicted cluster coincides with the member set of its ground-truth
    template.
    """
    pred_groups, truth_groups = {}, {}
    for i, (p, t) in enumerate(zip(pred, truth)):
        pred_groups.setdefault(p, []).append(i)
        truth_groups.setdefault(t, []).append(i)
    correct = 0
    for members in pred_groups.values():
        t = truth[members[0]]
        if truth_groups[t] == members:
            correct += len(members)
    return correct / len(truth)


def test_c1_parsers_recover_known_templates():
    rng = np.random.default_rng(20260801)
    rules = masking.default_rules()
    failures = []
    t0 = time.perf_counter()
    for i in range(200):
        k = 3 + (i % 8)
        n_lines = int(rng.integers(200, 1001))
        corpus = make_template_corpus(k, n_lines, seed=1000 + i)
        truth = corpus["template_ids"]
        masked = masking.normalize(corpus["messages"], rules)

        ids = make_parser("drain", depth=4, sim_threshold=0.5).parse(masked)
        ga = _grouping_accuracy(ids, truth)
        if len(set(ids)) != k or ga != 1.0:
            failures.append((i, "drain", len(set(ids)), ga))
        for kind in ("spell", "lenma"):
            ga = _grouping_accuracy(make_parser(kind).parse(masked), truth)
            if ga < 0.95:
                failures.append((i, kind, ga))
    elapsed = time.perf_counter() - t0
    if elapsed >= 60.0:
        failures.append(("runtime_s", elapsed))
    _report("C1 template recovery on 200 seeded corpora", not failures,
            f"{elapsed:.1f}s" if not failures else f"failures: {failures[:4]}")


def test_c2_aggregation_and_ngram_match_brute_force():
    failures = []
    for trial in range(100):
        rng = random.Random(5000 + trial)
        n_events = rng.randint(20, 1000)
        n_seqs = rng.randint(1, 20)
        pool = [f"s{j:03d}" for j in range(n_seqs)]
        seq_ids = [rng.choice(pool) if rng.random() > 0.1 else None
                   for _ in range(n_events)]
        event_ids = [rng.randrange(12) for _ in range(n_events)]
        ts_us = [rng.randrange(10 ** 9) for _ in range(n_events)]
        words = [[f"w{rng.randrange(30)}" for _ in range(rng.randint(1, 5))]
                 for _ in range(n_events)]
        labels = {s: rng.random() < 0.5 for s in pool if rng.random() < 0.7}

        events = EventTable({
            "seq_id": seq_ids,
            "m_message": [" ".join(w) for w in words],
            "m_timestamp": np.asarray(ts_us, dtype=np.int64)
                .view(np.dtype("datetime64[us]")),
            "e_words": words,
            "e_event_id": np.asarray(event_ids, dtype=np.int64),
        })
        got = aggregate_sequences(events, labels)

        # brute-force aggregation: first-seen order, row-order members
        order, members = [], {}
        for idx, sid in enumerate(seq_ids):
            if sid is None:
                continue
            if sid not in members:
                members[sid] = []
                order.append(sid)
            members[sid].append(idx)

        ok = list(got["seq_id"]) == order
        ok = ok and list(got["seq_len"]) == [len(members[s]) for s in order]
        for pos, sid in enumerate(order):
            idxs = members[sid]
            span = max(ts_us[i] for i in idxs) - min(ts_us[i] for i in idxs)
            ok = ok and got["duration"][pos] == np.timedelta64(span, "us")
            ok = ok and got["event_ids"][pos] == [event_ids[i] for i in idxs]
            flat = [w for i in idxs for w in words[i]]
            ok = ok and got["words"][pos] == flat
            ok = ok and bool(got["label"][pos]) == labels.get(sid, False)
        missing = sum(1 for s in seq_ids if s is None)
        ok = ok and got.meta.get("events_without_seq_id", 0) == missing
        unlabeled = sum(1 for s in order if s not in labels)
        ok = ok and got.meta.get("sequences_unlabeled", 0) == unlabeled

        # brute-force n-gram counts over the aggregated id sequences
        n = rng.choice([2, 3])
        seqs = [got["event_ids"][pos] for pos in range(len(order))]
        model = ngram_train(seqs, n=n)
        counts, totals = {}, {}
        for s in seqs:
            padded = [START_ID] * (n - 1) + list(s)
            for i in range(len(padded) - n + 1):
                ctx, nxt = tuple(padded[i:i + n - 1]), padded[i + n - 1]
                counts.setdefault(ctx, {})
                counts[ctx][nxt] = counts[ctx].get(nxt, 0) + 1
                totals[ctx] = totals.get(ctx, 0) + 1
        ok = ok and model.counts == counts and model.context_totals == totals

        p0 = rng.choice([0.01, 0.05, 0.2])
        for s in seqs[:10]:
            padded = [START_ID] * (n - 1) + list(s)
            probs = []
            for i in range(len(padded) - n + 1):
                ctx, nxt = tuple(padded[i:i + n - 1]), padded[i + n - 1]
                probs.append(counts[ctx].get(nxt, 0) / totals[ctx])
            expected = sum(1 for p in probs if p < p0) / len(probs)
            got_probs, got_score = ngram_score(model, s, p0)
            ok = ok and got_probs == probs and got_score == expected

        if not ok:
            failures.append(trial)
    _report("C2 aggregation and n-gram brute-force equality (100 trials)",
            not failures, f"failing trials: {failures[:5]}" if failures
            else "exact match")


def test_c3_metrics_match_confusion_oracle():
    failures = []
    for trial in range(100):
        rng = np.random.default_rng(31000 + trial)
        n = int(rng.integers(1, 400))
        pred = rng.random(n) < rng.uniform(0.05, 0.95)
        truth = rng.random(n) < rng.uniform(0.05, 0.95)
        rep = evaluate(pred, truth)
        tp = fp = fn = tn = 0
        for p, t in zip(pred.tolist(), truth.tolist()):
            if p and t:
                tp += 1
            elif p and not t:
                fp += 1
            elif not p and t:
                fn += 1
            else:
                tn += 1
        ok = (rep.tp, rep.fp, rep.fn, rep.tn) == (tp, fp, fn, tn)
        ok = ok and rep.accuracy == (tp + tn) / n
        ok = ok and rep.precision == (tp / (tp + fp) if tp + fp else 0.0)
        ok = ok and rep.recall == (tp / (tp + fn) if tp + fn else 0.0)
        if tp + fp == 0 or tp + fn == 0:
            f1 = 0.0
        else:
            p, r = tp / (tp + fp), tp / (tp + fn)
            f1 = 2.0 * p * r / (p + r) if p + r else 0.0
        ok = ok and rep.f1_binary == f1
        if not ok:
            failures.append(trial)

    hand = EvalReport(tp=9, fp=1, fn=1, tn=0)
    hand_ok = abs(hand.f1_binary - 0.9) <= 1e-15
    _report("C3 confusion-matrix oracle (100 seeds) and hand case f1=0.9",
            not failures and hand_ok,
            f"hand f1={hand.f1_binary!r}")


def test_c4_detectors_separate_constructed_anomalies():
    failures = []
    for seed in range(10):
        events, sequences = make_sequence_dataset(
            n_sequences=300, n_templates=6, anomaly_rate=0.15, seed=seed)
        events = add_tokens(add_normalized(events, masking.default_rules()))
        seq = aggregate_sequences(events, sequences)
        train, test = split_train_test(seq, 0.5, seed)
        train_docs = [list(w) for w in train["words"]]
        test_docs = [list(w) for w in test["words"]]

        oov = detectors.OOVDetector(0.0).fit(train_docs)
        f1 = evaluate(oov.score(test_docs) > 0.0, test["label"]).f1_binary
        if f1 != 1.0:
            failures.append((seed, "oov", f1))

        # presence indicators: the injected signal is marker presence, and
        # raw counts would fold sequence length into every margin
        vocab = features.fit_vocabulary(train_docs)
        Xtr = features.vectorize(train_docs, vocab, binary=True)
        Xte = features.vectorize(test_docs, vocab, binary=True)
        for kind in ("lr", "dt"):
            model = detectors.train_supervised(Xtr, train["label"], kind,
                                               seed=0)
            f1 = evaluate(model.predict(Xte), test["label"]).f1_binary
            if f1 < 0.95:
                failures.append((seed, kind, f1))
    _report("C4 detector sanity on constructed anomalies (10 seeds)",
            not failures, f"failures: {failures[:4]}" if failures
            else "oov f1=1.0, lr/dt f1>=0.95")


def test_c5_masking_offload_is_directional():
    messages = make_template_corpus(8, 60000, seed=123)["messages"]
    report = bench.bench_masking_offload(messages, parser="drain", repeats=5)
    pipeline = report.row("pipeline_total").median
    internal = report.row("parser_internal_total").median
    _report("C5 column masking beats in-parser masking (60k lines)",
            pipeline < internal,
            f"pipeline={pipeline:.3f}s internal={internal:.3f}s")


def test_c6_loader_throughput_and_scaling():
    t_start = time.perf_counter()
    with tempfile.TemporaryDirectory() as tmp:
        small = generate_synthetic(tmp, format="bgl", n_templates=8,
                                   n_lines=1_000_000, seed=7, name="m1")
        large = generate_synthetic(tmp, format="bgl", n_templates=8,
                                   n_lines=4_000_000, seed=8, name="m4")

        def best_of_two(path):
            times = []
            for _ in range(2):
                t0 = time.perf_counter()
                events, _ = loaders.load(loaders.LoaderSpec("bgl", path))
                times.append(time.perf_counter() - t0)
                n = len(events)
            return min(times), n

        t1, n1 = best_of_two(small["log"])
        t4, n4 = best_of_two(large["log"])
    elapsed = time.perf_counter() - t_start

    throughput = n1 / t1
    ratio = t4 / t1
    ok = (n1 == 1_000_000 and n4 == 4_000_000
          and throughput >= 100_000 and 3.0 <= ratio <= 5.0
          and elapsed < 120.0)
    _report("C6 loader throughput and 4x scaling", ok,
            f"{throughput:,.0f} lines/s, t4/t1={ratio:.2f}, "
            f"total {elapsed:.0f}s")


def test_c7_reruns_are_byte_identical(tmp_path):
    data = generate_synthetic(tmp_path / "data", format="hdfs",
                              n_templates=5, n_lines=2000, anomaly_rate=0.2,
                              seed=11)
    problems = []

    # full pipeline twice
    outs = []
    for run in ("a", "b"):
        cfg = tmp_path / f"c7_{run}.ini"
        out = tmp_path / f"out_{run}"
        cfg.write_text(f"""
[loader]
format = hdfs
log = {data["log"]}
labels = {data["labels"]}

[enhance]
chain = normalize, tokenize, drain, ngram, aggregate

[features]
source = event_ids

[detect]
kind = dt

[output]
dir = {out}
save_tables = true
""")
        run_pipeline(PipelineConfig.from_file(cfg))
        outs.append(out)
    for name in ("model.json", "templates.json", "ngram_model.json",
                 "events.table.json", "sequences.table.json",
                 "report.csv"):
        if (outs[0] / name).read_bytes() != (outs[1] / name).read_bytes():
            problems.append(name)
    ra = json.loads((outs[0] / "report.json").read_text())
    rb = json.loads((outs[1] / "report.json").read_text())
    ra.pop("wall_clock_ms")
    rb.pop("wall_clock_ms")
    if ra != rb:
        problems.append("report.json")

    # split twice
    events, sequences = make_sequence_dataset(100, 5, 0.2, seed=3)
    for which, part in enumerate(zip(split_train_test(sequences, 0.4, 9),
                                     split_train_test(sequences, 0.4, 9))):
        p0 = tmp_path / f"sp0_{which}.json"
        p1 = tmp_path / f"sp1_{which}.json"
        part[0].save(p0)
        part[1].save(p1)
        if p0.read_bytes() != p1.read_bytes():
            problems.append(f"split_{which}")

    # every detector kind twice with the same seed
    rng = np.random.default_rng(0)
    X = rng.random((60, 5))
    y = np.r_[np.zeros(50, dtype=bool), np.ones(10, dtype=bool)]
    docs = [[f"t{int(v * 8)}" for v in row] for row in X]
    for kind in ("lr", "dt", "kmeans", "iforest", "oov", "rarity"):
        models = []
        for _ in range(2):
            if kind in ("lr", "dt"):
                m = detectors.train_supervised(X, y, kind, seed=5)
            elif kind in ("kmeans", "iforest"):
                m = detectors.train_unsupervised(X, kind, seed=5)
            elif kind == "oov":
                m = detectors.OOVDetector(0.0).fit(docs)
            else:
                m = detectors.RarityDetector().fit(docs)
            path = tmp_path / f"{kind}_{len(models)}.json"
            detectors.save_model(m, path)
            models.append(path.read_bytes())
        if models[0] != models[1]:
            problems.append(kind)

    _report("C7 seeded reruns produce byte-identical artifacts",
            not problems, f"differing: {problems}" if problems
            else "pipeline, split, 6 detectors")


def test_c8_numerical_checks():
    failures = []
    for seed in range(50):
        rng = np.random.default_rng(77000 + seed)

        # central finite differences on the logistic loss gradient
        n, d = int(rng.integers(5, 40)), int(rng.integers(1, 8))
        X = rng.normal(size=(n, d))
        y = rng.random(n) < 0.5
        if y.all() or not y.any():
            y[0] = not y[0]
        w = rng.normal(size=d)
        b = float(rng.normal())
        l2 = float(rng.choice([0.0, 1e-4, 1e-2]))
        gw, gb = logistic_gradient(w, b, X, y, l2)
        h = 1e-6
        fd = np.empty(d)
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            fd[j] = (logistic_loss(w + e, b, X, y, l2)
                     - logistic_loss(w - e, b, X, y, l2)) / (2 * h)
        fdb = (logistic_loss(w, b + h, X, y, l2)
               - logistic_loss(w, b - h, X, y, l2)) / (2 * h)
        rel = np.abs(np.append(gw, gb) - np.append(fd, fdb)) \
            / np.maximum(np.abs(np.append(fd, fdb)), 1e-8)
        if rel.max() > 1e-5:
            failures.append((seed, "gradient", float(rel.max())))

        # training loss is monotonically non-increasing
        model = detectors.LogisticRegressionDetector(max_epochs=200) \
            .fit(X, y)
        diffs = np.diff(model.loss_history)
        if len(model.loss_history) < 2 or diffs.max() > 1e-12:
            failures.append((seed, "loss_monotone"))

        # AUC is invariant under strictly monotone score transforms
        m = int(rng.integers(4, 200))
        scores = rng.integers(-16, 17, size=m) / 8.0  # exact, with ties
        truth = rng.random(m) < 0.5
        if truth.all() or not truth.any():
            truth[0] = not truth[0]
        base = auc_roc(scores, truth)
        for transformed in (3.0 * scores + 1.0, np.exp(scores),
                            scores ** 3, np.arctan(scores)):
            if abs(auc_roc(transformed, truth) - base) > 1e-12:
                failures.append((seed, "auc_invariance"))
                break
    _report("C8 gradient, loss monotonicity and AUC invariance (50 seeds)",
            not failures, f"failures: {failures[:4]}" if failures
            else "max checks within tolerance")
