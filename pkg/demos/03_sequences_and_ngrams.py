"""Aggregate events into labeled sequences and score them with an n-gram.

Sequences group events that share an identifier (an HDFS block, an
application run). After template mining, each sequence becomes a list of
event ids; an n-gram model trained on normal-looking history estimates how
surprising each transition is, and the fraction of transitions below a
probability floor becomes the sequence's anomaly score.
"""

import argparse

import numpy as np

from logbench import masking
from logbench.enhancers import (add_event_ids, add_normalized, add_tokens,
                                aggregate_sequences)
from logbench.ngram import ngram_score, ngram_train
from logbench.parsers import make_parser
from logbench.synth import make_sequence_dataset
from logbench.tables import split_train_test


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sequences", type=int, default=400)
    ap.add_argument("--anomaly-rate", type=float, default=0.1)
    ap.add_argument("--ngram", type=int, default=2)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    events, sequences = make_sequence_dataset(
        n_sequences=args.sequences, anomaly_rate=args.anomaly_rate,
        seed=args.seed)
    events = add_normalized(events, masking.default_rules())
    events = add_tokens(events)
    events = add_event_ids(events, make_parser("drain"))
    seq = aggregate_sequences(events, sequences)
    print(f"{len(events)} events -> {len(seq)} sequences, "
          f"columns {seq.column_names}")

    train, test = split_train_test(seq, 0.5, seed=args.seed)
    model = ngram_train(train["event_ids"], n=args.ngram)
    print(f"{args.ngram}-gram model: {len(model.counts)} contexts")

    scores = np.array([ngram_score(model, s, p0=0.05)[1]
                       for s in test["event_ids"]])
    labels = np.asarray(test["label"])
    print(f"mean score  normal: {scores[~labels].mean():.4f}   "
          f"anomalous: {scores[labels].mean():.4f}")

    print("\nmost surprising test sequences:")
    for idx in np.argsort(-scores)[:5]:
        flag = "ANOMALY" if labels[idx] else "normal"
        print(f"  {test['seq_id'][idx]}  score={scores[idx]:.3f}  "
              f"len={test['seq_len'][idx]}  [{flag}]")


if __name__ == "__main__":
    main()
