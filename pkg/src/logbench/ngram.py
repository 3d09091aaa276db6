"""Next-event n-gram model over event id sequences.

Counts how often each event id follows each (n-1)-length context of ids,
then scores sequences by how surprising their transitions are. Sequences are
padded on the left with n-1 start sentinels so the first events are scored
against a real context too.
"""

from __future__ import annotations

import json

START_ID = -1  # reserved sentinel, never a real event id


class NGramModel:
    """Transition counts for contexts of n-1 event ids."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("n must be at least 2")
        self.n = n
        self.counts: dict[tuple[int, ...], dict[int, int]] = {}
        self.context_totals: dict[tuple[int, ...], int] = {}

    def update(self, sequence) -> None:
        seq = [START_ID] * (self.n - 1) + [int(e) for e in sequence]
        counts = self.counts
        totals = self.context_totals
        span = self.n - 1
        for i in range(len(seq) - span):
            context = tuple(seq[i:i + span])
            nxt = seq[i + span]
            bucket = counts.get(context)
            if bucket is None:
                bucket = {}
                counts[context] = bucket
            bucket[nxt] = bucket.get(nxt, 0) + 1
            totals[context] = totals.get(context, 0) + 1

    def probability(self, context: tuple[int, ...], event: int) -> float:
        """P(event | context): count ratio, 0.0 for unseen pairs."""
        bucket = self.counts.get(context)
        if not bucket:
            return 0.0
        return bucket.get(event, 0) / self.context_totals[context]

    def save(self, path) -> None:
        obj = {
            "kind": "ngram",
            "n": self.n,
            "counts": [
                {"context": list(ctx),
                 "next": sorted((int(e), c) for e, c in bucket.items())}
                for ctx, bucket in sorted(self.counts.items())
            ],
        }
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(obj, f, ensure_ascii=False, separators=(",", ":"))
            f.write("\n")

    @classmethod
    def load(cls, path) -> "NGramModel":
        with open(path, "r", encoding="utf-8") as f:
            obj = json.load(f)
        model = cls(int(obj["n"]))
        for entry in obj["counts"]:
            context = tuple(int(x) for x in entry["context"])
            bucket = {int(e): int(c) for e, c in entry["next"]}
            model.counts[context] = bucket
            model.context_totals[context] = sum(bucket.values())
        return model


def ngram_train(sequences, n: int = 2) -> NGramModel:
    """Fit transition counts on an iterable of event id sequences."""
    model = NGramModel(n)
    for seq in sequences:
        model.update(seq)
    return model


def ngram_score(model: NGramModel, sequence, p0: float = 0.05):
    """Score one sequence: (per-event probabilities, anomaly score).

    The anomaly score is the fraction of events whose next-event probability
    falls strictly below ``p0``. An empty sequence scores 0.0.
    """
    seq = [START_ID] * (model.n - 1) + [int(e) for e in sequence]
    span = model.n - 1
    probs = []
    low = 0
    for i in range(len(seq) - span):
        p = model.probability(tuple(seq[i:i + span]), seq[i + span])
        probs.append(p)
        if p < p0:
            low += 1
    score = low / len(probs) if probs else 0.0
    return probs, score
