"""Turn sequences into bag-of-words vectors and compare six detectors.

Two supervised models (logistic regression, decision tree) learn from
labeled training sequences; two unsupervised ones (k-means distance,
isolation forest) fit the training distribution and flag the far tail; two
vocabulary models (out-of-vocabulary rate, token rarity) need no matrix at
all. All detectors share one evaluation report format.
"""

import argparse

from logbench import detectors, features, masking
from logbench.detectors import evaluate
from logbench.enhancers import add_normalized, add_tokens, aggregate_sequences
from logbench.synth import make_sequence_dataset
from logbench.tables import split_train_test


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sequences", type=int, default=400)
    ap.add_argument("--anomaly-rate", type=float, default=0.15)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    events, sequences = make_sequence_dataset(
        n_sequences=args.sequences, anomaly_rate=args.anomaly_rate,
        seed=args.seed)
    events = add_tokens(add_normalized(events, masking.default_rules()))
    seq = aggregate_sequences(events, sequences)
    train, test = split_train_test(seq, 0.5, seed=args.seed)

    train_docs = [list(w) for w in train["words"]]
    test_docs = [list(w) for w in test["words"]]
    vocab = features.fit_vocabulary(train_docs)
    X_train = features.vectorize(train_docs, vocab, binary=True)
    X_test = features.vectorize(test_docs, vocab, binary=True)
    print(f"vocabulary: {len(vocab.index)} terms; "
          f"train {X_train.matrix.shape}, test {X_test.matrix.shape}")
    print(f"{'detector':10s} {'f1':>6s} {'prec':>6s} {'rec':>6s} {'auc':>6s}")

    contamination = args.anomaly_rate
    for kind in ("lr", "dt", "kmeans", "iforest", "oov", "rarity"):
        if kind in ("lr", "dt"):
            model = detectors.train_supervised(X_train, train["label"],
                                               kind, seed=0)
            pred, scores = model.predict(X_test), model.score(X_test)
        elif kind in ("kmeans", "iforest"):
            model = detectors.train_unsupervised(
                X_train, kind, seed=0, contamination=contamination)
            pred, scores = model.predict(X_test), model.score(X_test)
        elif kind == "oov":
            model = detectors.OOVDetector(0.0).fit(train_docs)
            scores = model.score(test_docs)
            pred = scores > 0.0
        else:
            model = detectors.RarityDetector().fit(train_docs)
            scores = model.score(test_docs)
            pred = detectors.scores_to_labels(scores, contamination)
        rep = evaluate(pred, test["label"], scores=scores)
        auc = "n/a" if rep.auc_roc is None else f"{rep.auc_roc:.3f}"
        print(f"{kind:10s} {rep.f1_binary:6.3f} {rep.precision:6.3f} "
              f"{rep.recall:6.3f} {auc:>6s}")


if __name__ == "__main__":
    main()
