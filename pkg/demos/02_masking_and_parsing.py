"""Mask variable substrings, then mine templates with three parsers.

Masking replaces IPs, hex literals and numbers with fixed placeholders so
that messages produced by the same logging call collapse onto one skeleton.
The three miners then group messages and emit one template per group:

  drain  - fixed-depth prefix tree over leading tokens, similarity merge
  spell  - longest-common-subsequence clustering
  lenma  - cosine similarity of token-length vectors

On a corpus with known ground truth we can score each parser's grouping
accuracy: a message counts as correct when its predicted group contains
exactly the messages of its true template.
"""

import argparse
from collections import Counter

from logbench import masking
from logbench.parsers import make_parser
from logbench.synth import make_template_corpus


def grouping_accuracy(pred, truth):
    pred_groups, truth_groups = {}, {}
    for i, (p, t) in enumerate(zip(pred, truth)):
        pred_groups.setdefault(p, []).append(i)
        truth_groups.setdefault(t, []).append(i)
    correct = sum(len(m) for m in pred_groups.values()
                  if truth_groups[truth[m[0]]] == m)
    return correct / len(truth)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--templates", type=int, default=6)
    ap.add_argument("--lines", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    corpus = make_template_corpus(args.templates, args.lines, args.seed)
    messages, truth = corpus["messages"], corpus["template_ids"]

    rules = masking.default_rules()
    masked = masking.normalize(messages, rules)
    print("masking examples:")
    for raw, clean in list(zip(messages, masked))[:3]:
        print(f"  {raw}")
        print(f"  -> {clean}")
    print()

    for kind in ("drain", "spell", "lenma"):
        parser = make_parser(kind)
        ids = parser.parse(masked)
        ga = grouping_accuracy(ids, truth)
        sizes = Counter(ids)
        strings = parser.store.template_strings()
        print(f"{kind}: {len(parser.store)} templates, "
              f"grouping accuracy {ga:.3f}")
        for event_id, count in sizes.most_common(3):
            print(f"  {count:5d} x {strings[event_id]}")
        print()


if __name__ == "__main__":
    main()
