"""Time the loading, parsing and masking phases on synthetic data.

Three benchmark harnesses, all reporting medians over repeated runs:

  loading  - file to event table, per format and file size
  parsers  - template mining throughput for drain / spell / lenma
  offload  - masking done once on the message column versus inside the
             parser loop, message by message; batching the column wins

Sizes here are kept small enough for a quick run; raise --lines to stress.
"""

import argparse
import tempfile
from pathlib import Path

from logbench import bench, loaders, synth
from logbench.synth import make_template_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lines", type=int, default=100_000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        paths = synth.generate_synthetic(Path(tmp), format="bgl",
                                         n_lines=args.lines, seed=args.seed)
        spec = loaders.LoaderSpec("bgl", paths["log"])
        report = bench.bench_loading([spec], repeats=args.repeats)
        print("loading:")
        print(report)
        row = report.row("load")
        print(f"-> {row.lines / row.median:,.0f} lines/s\n")

    messages = make_template_corpus(8, min(args.lines, 30_000),
                                    args.seed)["messages"]
    print(f"parsers ({len(messages)} messages):")
    print(bench.bench_parsers(messages, ("drain", "spell", "lenma"),
                              repeats=args.repeats))
    print()

    print(f"masking offload ({len(messages)} messages):")
    report = bench.bench_masking_offload(messages, parser="drain",
                                         repeats=args.repeats)
    print(report)
    pipeline = report.row("pipeline_total").median
    internal = report.row("parser_internal_total").median
    print(f"-> column masking is {internal / pipeline:.2f}x the speed of "
          f"in-parser masking on this corpus")


if __name__ == "__main__":
    main()
